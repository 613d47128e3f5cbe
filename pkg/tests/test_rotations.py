import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voltgraph.errors import DimensionError, ProjectionError
from voltgraph.rotations import (
    axis_rotation,
    eigenspace_one,
    project_to_rotation,
    rotation_2d,
    sample_haar,
    sample_haar_batch,
    validate_rotation,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=6)


def test_validate_identity_and_reflection():
    assert validate_rotation(np.eye(3), 1e-9)
    assert not validate_rotation(np.diag([1.0, -1.0]), 1e-9)


def test_validate_perturbed_rotation():
    R = rotation_2d(0.7) + 1e-6
    # direct evaluation of the orthogonality defect
    defect = np.max(np.abs(R.T @ R - np.eye(2)))
    assert 1e-9 < defect < 1e-4
    assert not validate_rotation(R, 1e-9)
    assert validate_rotation(R, 1e-4)


def test_validate_rejects_non_square():
    with pytest.raises(DimensionError):
        validate_rotation(np.ones((2, 3)))


def test_project_fixes_rotations_and_removes_scale():
    R = sample_haar(3, 7)
    assert np.allclose(project_to_rotation(R), R, atol=1e-12)
    assert np.allclose(project_to_rotation(1.0001 * R), R, atol=1e-10)
    assert np.allclose(project_to_rotation(np.diag([2.0, 1.0])), np.eye(2), atol=1e-15)


def test_project_singular():
    with pytest.raises(ProjectionError):
        project_to_rotation(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_project_reflection_gives_rotation():
    R = project_to_rotation(np.diag([1.0, 1.0, -1.0]) @ sample_haar(3, 1))
    assert validate_rotation(R)


def test_haar_basics():
    assert sample_haar(1, 5).tolist() == [[1.0]]
    assert np.array_equal(sample_haar(3, 42), sample_haar(3, 42))
    with pytest.raises(DimensionError):
        sample_haar(0, 1)


def test_haar_mean_trace():
    rng = np.random.default_rng(3)
    samples = sample_haar_batch(10_000, 4, rng)
    assert np.all(np.linalg.det(samples) > 0)
    assert abs(np.trace(samples, axis1=1, axis2=2).mean()) <= 5 / np.sqrt(10_000) * 4


def test_eigenspace_one_examples():
    assert eigenspace_one(np.eye(4)).shape == (4, 4)
    assert eigenspace_one(rotation_2d(np.pi / 2)).shape == (2, 0)
    R = axis_rotation([1, 1, 1], 2 * np.pi / 3)
    # rotating by 2pi/3 about (1,1,1) cyclically permutes the axes
    assert np.allclose(R, [[0, 0, 1], [1, 0, 0], [0, 1, 0]], atol=1e-12)
    E = eigenspace_one(R)
    assert E.shape == (3, 1)
    assert np.allclose(np.abs(E[:, 0]), np.ones(3) / np.sqrt(3), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(dims, seeds, seeds)
def test_closure_under_products(d, s1, s2):
    assert validate_rotation(sample_haar(d, s1) @ sample_haar(d, s2), 1e-8)


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_projection_idempotent(d, seed):
    M = np.random.default_rng(seed).standard_normal((d, d))
    if abs(np.linalg.det(M)) < 1e-6:
        return
    P = project_to_rotation(M)
    assert validate_rotation(P)
    assert np.allclose(project_to_rotation(P), P, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_eigenspace_rank_nullity(d, seed):
    R = sample_haar(d, seed)
    rank = np.linalg.matrix_rank(R - np.eye(d), tol=1e-8)
    assert eigenspace_one(R).shape[1] + rank == d
