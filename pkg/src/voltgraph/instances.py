"""Generators for graphs and voltages used by tests, fixtures and ``voltgraph random``."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import DimensionError, StructureError
from .graph import WeightedGraph, build_graph, spanning_tree
from .rotations import embed, rotation_2d, sample_haar_batch
from .voltage import VoltageGraph, gauge_act_voltage, random_gauge


def random_connected_graph(
    n: int, degree: float, rng: np.random.Generator, weight_range=(0.5, 2.0)
) -> WeightedGraph:
    """Random tree on ``n`` nodes plus random chords up to mean degree ``degree``."""
    if n < 2:
        raise StructureError("need at least two nodes")
    perm = rng.permutation(n)
    pairs = {(max(a, b), min(a, b)) for a, b in ((int(perm[k]), int(perm[rng.integers(k)])) for k in range(1, n))}
    target = min(n * (n - 1) // 2, max(n - 1, int(round(n * degree / 2))))
    candidates = [(i, j) for i in range(n) for j in range(i) if (i, j) not in pairs]
    rng.shuffle(candidates)
    pairs_list = sorted(pairs) + candidates[: target - len(pairs)]
    order = rng.permutation(len(pairs_list))
    lo, hi = weight_range
    return build_graph(n, [(*pairs_list[k], rng.uniform(lo, hi)) for k in order])


def complete_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    return build_graph(n, [(i, j, weight) for i in range(n) for j in range(i)])


def path_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    return build_graph(n, [(i + 1, i, weight) for i in range(n - 1)])


def cycle_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    return build_graph(n, [(i, (i + 1) % n, weight) for i in range(n)])


def grid_graph(rows: int, cols: int, weight: float = 1.0) -> WeightedGraph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            a = r * cols + c
            if c + 1 < cols:
                edges.append((a, a + 1, weight))
            if r + 1 < rows:
                edges.append((a, a + cols, weight))
    return build_graph(rows * cols, edges)


def haar_voltage(g: WeightedGraph, d: int, rng: np.random.Generator) -> VoltageGraph:
    return VoltageGraph(g, sample_haar_batch(g.n_edges, d, rng), reproject=True)


def planted_voltage(g: WeightedGraph, d: int, rng: np.random.Generator) -> VoltageGraph:
    """Synchronizable voltage ``xi_i^{-1} xi_j`` from a Haar gauge."""
    return VoltageGraph.from_gauge(g, random_gauge(g.n, d, rng))


def partial_voltage(g: WeightedGraph, d: int, fixed: int, rng: np.random.Generator) -> VoltageGraph:
    """Voltage whose kernel generically has dimension ``fixed``.

    In a tree gauge every cotree edge carries a Haar rotation of the last
    ``d - fixed`` coordinates; a random gauge then hides the structure.
    """
    if not 0 <= fixed <= d:
        raise DimensionError("fixed dimension must lie in [0, d]")
    t = spanning_tree(g, 0)
    R = np.broadcast_to(np.eye(d), (g.n_edges, d, d)).copy()
    m = d - fixed
    if m > 0:
        blocks = sample_haar_batch(len(t.cotree_edges), m, rng)
        for e, B in zip(t.cotree_edges, blocks):
            R[e, fixed:, fixed:] = B
    vg = VoltageGraph(g, R)
    return gauge_act_voltage(random_gauge(g.n, d, rng), vg)


def torus_graph(n: int, diagonals: bool = True) -> WeightedGraph:
    """Periodic ``n x n`` grid, node ``(r, c)`` numbered ``r*n + c``, unit weights.

    With ``diagonals`` each square gets the diagonal ``(r, c)-(r+1, c+1)``.
    Needs ``n >= 4``: for ``n = 3`` every row is itself a triangle.
    """
    if n < 4:
        raise StructureError("torus grid needs side length >= 4 so rows and columns are not 3-cliques")
    edges = []
    for r in range(n):
        for c in range(n):
            a = r * n + c
            edges.append((a, r * n + (c + 1) % n, 1.0))
            edges.append((a, ((r + 1) % n) * n + c, 1.0))
            if diagonals:
                edges.append((a, ((r + 1) % n) * n + (c + 1) % n, 1.0))
    return build_graph(n * n, edges)


def torus_steps(n: int, diagonals: bool = True) -> list[tuple[int, int, int]]:
    """Forward steps ``(a, b, k)`` of the torus: moving a -> b transports by ``alpha0**k``.

    Grid steps carry ``k = 1`` except on the periodic seam (last column to
    first, last row to first), which carries ``k = 0``; diagonals carry the
    sum of their horizontal and vertical parts. Every triangle is then flat,
    while a straight loop winds ``n - 1`` times.
    """
    steps = []
    for r in range(n):
        for c in range(n):
            a = r * n + c
            kr = 0 if c == n - 1 else 1
            kd = 0 if r == n - 1 else 1
            steps.append((a, r * n + (c + 1) % n, kr))
            steps.append((a, ((r + 1) % n) * n + c, kd))
            if diagonals:
                steps.append((a, ((r + 1) % n) * n + (c + 1) % n, kr + kd))
    return steps


def torus_voltage(n: int = 4, d: int = 2, order: int = 5, diagonals: bool = True) -> VoltageGraph:
    """Flat voltage on the torus grid built from a 2D rotation ``alpha0`` of the given order.

    ``alpha0`` is embedded in the first two coordinates when ``d > 2``.
    """
    if d < 2:
        raise DimensionError("torus voltage needs d >= 2")
    if order < 1:
        raise DimensionError("rotation order must be positive")
    g = torus_graph(n, diagonals)
    a0 = embed(rotation_2d(2 * np.pi / order), d)
    powers = [np.linalg.matrix_power(a0, k) for k in range(3)]
    R = np.empty((g.n_edges, d, d))
    for a, b, k in torus_steps(n, diagonals):
        e = g.edge_index(a, b)
        # net voltage of the step a -> b is alpha_ba
        R[e] = powers[k] if b > a else powers[k].T
    return VoltageGraph(g, R, reproject=True)


def torus_alpha0(d: int = 2, order: int = 5) -> np.ndarray:
    return embed(rotation_2d(2 * np.pi / order), d)


def random_section(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, d))


FAMILIES = ("haar", "planted", "partial")


def random_instance(
    rng: np.random.Generator,
    family: Optional[str] = None,
    max_n: int = 8,
    max_d: int = 4,
) -> VoltageGraph:
    """Small random voltage graph from one of ``FAMILIES`` (chosen at random when None)."""
    if family is None:
        family = FAMILIES[rng.integers(len(FAMILIES))]
    n = int(rng.integers(2, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    g = random_connected_graph(n, float(rng.uniform(1.5, 4.0)), rng)
    if family == "haar":
        return haar_voltage(g, d, rng)
    if family == "planted":
        return planted_voltage(g, d, rng)
    if family == "partial":
        return partial_voltage(g, d, int(rng.integers(0, d + 1)), rng)
    raise ValueError(f"unknown family {family!r}")
