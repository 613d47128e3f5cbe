import itertools

import numpy as np
import pytest

from voltgraph.errors import ConnectivityError, StructureError, WeightError
from voltgraph.graph import (
    blow_up,
    boundary_matrices,
    build_graph,
    homology_basis,
    spanning_tree,
    triangles,
    weights_from_embedding,
    z2_rank,
)
from voltgraph.instances import (
    complete_graph,
    cycle_graph,
    grid_graph,
    path_graph,
    random_connected_graph,
    torus_graph,
)


def dense_z2_rank(M):
    """Row reduction over Z/2 on a dense 0/1 array (oracle, independent of the bitset code)."""
    A = np.array(M, dtype=np.uint8) % 2
    rank = 0
    rows, cols = A.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if A[r, c]), None)
        if pivot is None:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] ^= A[rank]
        rank += 1
    return rank


def brute_triangles(g):
    return [
        t
        for t in itertools.combinations(range(g.n), 3)
        if all(g.has_edge(a, b) for a, b in itertools.combinations(t, 2))
    ]


def clique_torus_3x3():
    edges = set()
    for r in range(3):
        for c in range(3):
            a = 3 * r + c
            for b in (3 * r + (c + 1) % 3, 3 * ((r + 1) % 3) + c, 3 * ((r + 1) % 3) + (c + 1) % 3):
                edges.add((max(a, b), min(a, b)))
    return build_graph(9, [(i, j, 1.0) for i, j in sorted(edges)])


def test_build_path_degrees():
    g = path_graph(3)
    assert g.degrees.tolist() == [1.0, 2.0, 1.0]
    assert g.edges == ((1, 0), (2, 1))


def test_build_errors():
    with pytest.raises(StructureError):
        build_graph(2, [(0, 1, 1.0), (1, 0, 1.0)])
    with pytest.raises(StructureError):
        build_graph(2, [(0, 0, 1.0)])
    with pytest.raises(ConnectivityError):
        build_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(WeightError):
        build_graph(2, [(0, 1, 0.0)])
    with pytest.raises(StructureError):
        build_graph(1, [])
    with pytest.raises(StructureError):
        build_graph(2, [(0, 2, 1.0)])


def test_spanning_tree_counts():
    assert spanning_tree(path_graph(5)).cotree_edges == ()
    assert len(spanning_tree(cycle_graph(3)).cotree_edges) == 1
    g = grid_graph(3, 3)
    assert (g.n, g.n_edges) == (9, 12)
    t = spanning_tree(g)
    assert len(t.cotree_edges) == 12 - 9 + 1
    assert len(t.tree_edges) == 8
    with pytest.raises(StructureError):
        spanning_tree(g, 9)


def test_spanning_tree_invariants(rng):
    for _ in range(50):
        g = random_connected_graph(int(rng.integers(2, 12)), 3.0, rng)
        t = spanning_tree(g, int(rng.integers(g.n)))
        assert len(t.tree_edges) == g.n - 1
        assert set(t.tree_edges).isdisjoint(t.cotree_edges)
        assert set(t.tree_edges) | set(t.cotree_edges) == set(range(g.n_edges))
        assert len(t.cotree_edges) == g.n_edges - g.n + 1
        # walking parents from any node reaches the root without repeats
        for v in range(g.n):
            seen = {v}
            while v != t.root:
                v = int(t.parent[v])
                assert v not in seen
                seen.add(v)


def test_spanning_tree_deterministic():
    g = grid_graph(3, 4)
    a, b = spanning_tree(g), spanning_tree(g)
    assert a.tree_edges == b.tree_edges and a.order == b.order
    assert np.array_equal(a.parent, b.parent)


def test_triangles_examples():
    assert triangles(cycle_graph(4)) == []
    assert triangles(complete_graph(4)) == [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    g = clique_torus_3x3()
    # rows, columns and diagonal lines of the 3x3 torus are 3-cliques too
    assert len(brute_triangles(g)) == 27
    assert triangles(g) == brute_triangles(g)
    g4 = torus_graph(4)
    assert triangles(g4) == brute_triangles(g4)
    assert len(triangles(g4)) == 32


def test_triangles_match_brute_force(rng):
    for _ in range(30):
        g = random_connected_graph(int(rng.integers(3, 10)), 4.0, rng)
        assert triangles(g) == brute_triangles(g)


def test_boundary_examples():
    d1, d2 = boundary_matrices(path_graph(2))
    assert d1.tolist() == [[1], [1]]
    assert d2.shape == (1, 0)
    d1, d2 = boundary_matrices(cycle_graph(3))
    assert not np.any((d1.astype(int) @ d2.astype(int)) % 2)
    _, d2 = boundary_matrices(complete_graph(4))
    assert dense_z2_rank(d2) == 3
    assert z2_rank(d2) == 3


def test_boundary_of_boundary(rng):
    for _ in range(30):
        g = random_connected_graph(int(rng.integers(3, 10)), 4.5, rng)
        d1, d2 = boundary_matrices(g)
        assert not np.any((d1.astype(int) @ d2.astype(int)) % 2)


def check_basis(g, basis):
    d1, d2 = boundary_matrices(g)
    expected = (g.n_edges - g.n + 1) - dense_z2_rank(d2)
    assert basis.h1 == expected
    vecs = np.zeros((g.n_edges, basis.h1), dtype=np.uint8)
    for k, cyc in enumerate(basis.cycles):
        assert cyc[0] == cyc[-1]
        assert len(set(cyc[:-1])) == len(cyc) - 1
        for a, b in zip(cyc[:-1], cyc[1:]):
            vecs[g.edge_index(a, b), k] ^= 1
    assert not np.any((d1.astype(int) @ vecs.astype(int)) % 2)
    # independent modulo boundaries
    assert dense_z2_rank(np.hstack([d2, vecs])) == dense_z2_rank(d2) + basis.h1


def test_homology_examples():
    g = path_graph(4)
    assert homology_basis(g, spanning_tree(g)).h1 == 0
    g = cycle_graph(4)
    b = homology_basis(g, spanning_tree(g))
    assert b.h1 == 1
    assert sorted(b.cycles[0][:-1]) == [0, 1, 2, 3]
    g = torus_graph(4)
    b = homology_basis(g, spanning_tree(g))
    assert b.h1 == 2
    check_basis(g, b)
    g = clique_torus_3x3()
    check_basis(g, homology_basis(g, spanning_tree(g)))


def test_homology_matches_dense_oracle(rng):
    for _ in range(40):
        g = random_connected_graph(int(rng.integers(3, 11)), float(rng.uniform(2, 5)), rng)
        check_basis(g, homology_basis(g, spanning_tree(g, int(rng.integers(g.n)))))


def test_blow_up_examples():
    g = path_graph(4)
    b = blow_up(g, spanning_tree(g))
    assert b.graph.n == 4 and b.projection.tolist() == [0, 1, 2, 3]
    g = cycle_graph(3)
    b = blow_up(g, spanning_tree(g))
    assert (b.graph.n, b.graph.n_edges) == (4, 3)
    assert sorted(np.bincount(b.projection).tolist()) == [1, 1, 2]
    g = grid_graph(3, 3)
    assert blow_up(g, spanning_tree(g)).graph.n == 13


def test_blow_up_invariants(rng):
    for _ in range(30):
        g = random_connected_graph(int(rng.integers(2, 10)), 3.5, rng)
        t = spanning_tree(g)
        b = blow_up(g, t)
        tg = b.graph
        assert tg.n_edges == tg.n - 1 == g.n_edges
        assert set(b.projection.tolist()) == set(range(g.n))
        assert b.projection[: g.n].tolist() == list(range(g.n))
        leaf_degree = np.bincount(np.array(tg.edges).ravel(), minlength=tg.n)
        for e, (i, j) in enumerate(g.edges):
            I, J = tg.edges[b.edge_map[e]]
            assert (b.projection[I], b.projection[J]) == (i, j)
            assert tg.weights[b.edge_map[e]] == g.weights[e]
            if e in t.tree_edges:
                assert (I, J) == (i, j)
            else:
                assert I >= g.n and J == j and leaf_degree[I] == 1


def test_weights_from_embedding():
    g = weights_from_embedding(3, [(0, 1), (1, 2)], [1.0, 1.0])
    assert g.weights.tolist() == [1.0, 1.0]
    g = weights_from_embedding(2, [(0, 1)], [2.0])
    assert g.weights.tolist() == [0.25]
    g = weights_from_embedding(3, [(0, 1), (1, 2)], [0.5, 0.1])
    assert np.allclose(g.weights, [4.0, 100.0], rtol=1e-14)
    with pytest.raises(WeightError):
        weights_from_embedding(2, [(0, 1)], [0.0])
