"""Utilities for d x d special-orthogonal matrices."""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ProjectionError

TOL_ORTH = 1e-9
TOL_EIG = 1e-8
# Products longer than this are re-projected onto SO(d) to bound drift.
REPROJECT_EVERY = 64


def _square(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def validate_rotation(M, tol: float = TOL_ORTH) -> bool:
    """True iff ``M`` is orthogonal with determinant one, both to ``tol``."""
    M = _square(M)
    d = M.shape[0]
    if not np.all(np.isfinite(M)):
        return False
    orth_err = np.max(np.abs(M.T @ M - np.eye(d)))
    det = np.linalg.det(M)
    return bool(orth_err <= tol and abs(det - 1.0) <= tol)


def project_to_rotation(M) -> np.ndarray:
    """Nearest rotation to ``M`` (special-orthogonal polar factor)."""
    M = _square(M)
    if not np.all(np.isfinite(M)):
        raise ProjectionError("matrix has non-finite entries")
    U, s, Vt = np.linalg.svd(M)
    if s[-1] <= s[0] * 1e-14 or s[0] == 0.0:
        raise ProjectionError("cannot project a singular matrix onto SO(d)")
    D = np.ones(M.shape[0])
    D[-1] = np.sign(np.linalg.det(U @ Vt))
    return (U * D) @ Vt


def sample_haar(d: int, seed=None) -> np.ndarray:
    """Haar-distributed rotation in SO(d).

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if d < 1:
        raise DimensionError("rotation dimension must be positive")
    rng = np.random.default_rng(seed)
    return _haar(d, rng)


def _haar(d: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, -1] = -Q[:, -1]
    return Q


def sample_haar_batch(count: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` independent Haar rotations, shape (count, d, d)."""
    if d < 1:
        raise DimensionError("rotation dimension must be positive")
    if count == 0:
        return np.zeros((0, d, d))
    Q, R = np.linalg.qr(rng.standard_normal((count, d, d)))
    Q = Q * np.sign(np.diagonal(R, axis1=1, axis2=2))[:, None, :]
    flip = np.linalg.det(Q) < 0
    Q[flip, :, -1] *= -1
    return Q


def eigenspace_one(R, tol_eig: float = TOL_EIG) -> np.ndarray:
    """Orthonormal basis (as columns) of the fixed space ker(R - I)."""
    R = _square(R)
    return common_fixed_space([R], tol_eig, R.shape[0])


def common_fixed_space(mats, tol_eig: float, d: int) -> np.ndarray:
    """Orthonormal columns spanning the intersection of ker(M - I) over ``mats``."""
    mats = list(mats)
    if not mats:
        return np.eye(d)
    stacked = np.concatenate([np.asarray(M) - np.eye(d) for M in mats], axis=0)
    _, s, Vt = np.linalg.svd(stacked)
    rank = int(np.sum(s > tol_eig))
    return Vt[rank:].T.copy()


def rotation_2d(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def embed(R: np.ndarray, d: int) -> np.ndarray:
    """Block-diagonal embedding of ``R`` into SO(d), identity on the remaining axes."""
    k = R.shape[0]
    if k > d:
        raise DimensionError(f"cannot embed a {k}x{k} rotation into dimension {d}")
    out = np.eye(d)
    out[:k, :k] = R
    return out


def axis_rotation(axis, theta: float) -> np.ndarray:
    """Rodrigues rotation in SO(3) about ``axis`` by ``theta``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    K = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + np.sin(theta) * K + (1 - np.cos(theta)) * (K @ K)


def ordered_product(factors, d: int) -> np.ndarray:
    """Product ``F_m ... F_2 F_1`` of ``factors = [F_1, ..., F_m]``.

    The first factor is applied first (rightmost); the empty product is I.
    Re-projected every ``REPROJECT_EVERY`` factors.
    """
    out = np.eye(d)
    for k, F in enumerate(factors, start=1):
        out = F @ out
        if k % REPROJECT_EVERY == 0:
            out = project_to_rotation(out)
    return out


def rotation_errors(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-matrix orthogonality error and |det - 1| for a stack (k, d, d)."""
    d = stack.shape[-1]
    orth = np.max(np.abs(np.swapaxes(stack, -1, -2) @ stack - np.eye(d)), axis=(-2, -1))
    det = np.abs(np.linalg.det(stack) - 1.0)
    return orth, det


def project_batch(stack: np.ndarray) -> np.ndarray:
    """``project_to_rotation`` applied to every matrix of a stack (k, d, d)."""
    stack = np.asarray(stack, dtype=float)
    if stack.shape[0] == 0:
        return stack.copy()
    U, s, Vt = np.linalg.svd(stack)
    if np.any(s[:, -1] <= s[:, 0] * 1e-14):
        raise ProjectionError("cannot project a singular matrix onto SO(d)")
    sign = np.sign(np.linalg.det(U @ Vt))
    U = U.copy()
    U[:, :, -1] *= sign[:, None]
    return U @ Vt
