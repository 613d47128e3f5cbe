"""SO(d) voltages on graphs, gauge transformations, holonomy and synchronization.

Conventions
-----------
A voltage stores one rotation per edge ``(i, j)`` with ``i > j``: the matrix
``alpha_ij``. The reverse direction is ``alpha_ji = alpha_ij.T``.

A gauge is an array of shape ``(n, d, d)``; it acts on sections row-wise,
``(xi x)_i = xi_i x_i``, and on voltages by ``(xi alpha)_ij = xi_i alpha_ij xi_j^T``.

The net voltage of a path ``(i_0, ..., i_m)`` is
``alpha_{i_m i_{m-1}} ... alpha_{i_1 i_0}``: the first step is the rightmost
factor. Holonomy of a closed loop uses the same ordering.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, LoopError, PathError, StructureError
from .graph import SpanningTree, WeightedGraph
from .rotations import (
    REPROJECT_EVERY,
    TOL_ORTH,
    project_batch,
    project_to_rotation,
    rotation_errors,
    sample_haar_batch,
)

TOL_SYNC = 1e-8


class VoltageGraph:
    """A weighted graph together with an SO(d) voltage in a fixed gauge."""

    def __init__(self, graph: WeightedGraph, rotations, *, tol: float = TOL_ORTH, reproject: bool = False):
        R = np.array(rotations, dtype=float)
        if R.ndim != 3 or R.shape[0] != graph.n_edges or R.shape[1] != R.shape[2]:
            raise DimensionError(
                f"expected rotations of shape ({graph.n_edges}, d, d), got {R.shape}"
            )
        if R.shape[1] < 1:
            raise DimensionError("voltage dimension must be positive")
        if not np.all(np.isfinite(R)):
            raise StructureError("voltage has non-finite entries")
        orth, det = rotation_errors(R)
        bad = np.flatnonzero((orth > tol) | (det > tol))
        if bad.size:
            e = int(bad[0])
            i, j = graph.edges[e]
            raise StructureError(f"edge {e} ({i}, {j}): matrix is not in SO({R.shape[1]})")
        if reproject:
            R = project_batch(R)
        R.setflags(write=False)
        self.graph = graph
        self.rotations = R

    @property
    def dim(self) -> int:
        return self.rotations.shape[1]

    @property
    def n(self) -> int:
        return self.graph.n

    def rot(self, i: int, j: int) -> np.ndarray:
        """``alpha_ij`` for adjacent nodes, transposed when ``i < j``."""
        R = self.rotations[self.graph.edge_index(i, j)]
        return R if i > j else R.T

    @classmethod
    def trivial(cls, graph: WeightedGraph, d: int) -> "VoltageGraph":
        return cls(graph, np.broadcast_to(np.eye(d), (graph.n_edges, d, d)))

    @classmethod
    def from_gauge(cls, graph: WeightedGraph, gauge) -> "VoltageGraph":
        """Synchronizable voltage ``alpha_ij = xi_i^{-1} xi_j``."""
        gauge = np.asarray(gauge, dtype=float)
        t, h = graph.tails, graph.heads
        R = np.einsum("eba,ebc->eac", gauge[t], gauge[h])
        return cls(graph, R, reproject=True)

    def with_rotations(self, rotations, **kw) -> "VoltageGraph":
        return VoltageGraph(self.graph, rotations, **kw)

    def __repr__(self):
        return f"VoltageGraph(n={self.n}, edges={self.graph.n_edges}, d={self.dim})"


def identity_gauge(n: int, d: int) -> np.ndarray:
    return np.broadcast_to(np.eye(d), (n, d, d)).copy()


def random_gauge(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    return sample_haar_batch(n, d, rng)


def _check_gauge(gauge, n: int, d: int) -> np.ndarray:
    gauge = np.asarray(gauge, dtype=float)
    if gauge.shape != (n, d, d):
        raise DimensionError(f"gauge shape {gauge.shape} does not match ({n}, {d}, {d})")
    return gauge


def gauge_act_voltage(gauge, vg: VoltageGraph) -> VoltageGraph:
    """The transformed voltage ``xi_i alpha_ij xi_j^T``, re-projected onto SO(d)."""
    gauge = _check_gauge(gauge, vg.n, vg.dim)
    t, h = vg.graph.tails, vg.graph.heads
    R = np.einsum("eab,ebc,edc->ead", gauge[t], vg.rotations, gauge[h])
    return vg.with_rotations(project_batch(R))


def gauge_act_section(gauge, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    gauge = np.asarray(gauge, dtype=float)
    if x.ndim != 2 or gauge.shape != (x.shape[0], x.shape[1], x.shape[1]):
        raise DimensionError(f"gauge shape {gauge.shape} does not act on section of shape {x.shape}")
    return np.einsum("iab,ib->ia", gauge, x)


def _product_along(vg: VoltageGraph, seq: Sequence[int]) -> np.ndarray:
    d = vg.dim
    out = np.eye(d)
    for k, (a, b) in enumerate(zip(seq[:-1], seq[1:]), start=1):
        if not vg.graph.has_edge(a, b):
            raise PathError(f"nodes {a} and {b} are not adjacent")
        out = vg.rot(b, a) @ out
        if k % REPROJECT_EVERY == 0:
            out = project_to_rotation(out)
    if len(seq) - 1 > REPROJECT_EVERY:
        out = project_to_rotation(out)
    return out


def net_voltage(vg: VoltageGraph, path: Sequence[int]) -> np.ndarray:
    """Parallel transport ``alpha_{i_m i_{m-1}} ... alpha_{i_1 i_0}`` along a simple path."""
    path = [int(v) for v in path]
    if not path:
        raise PathError("empty path")
    if len(set(path)) != len(path):
        raise PathError(f"path {path} revisits a vertex")
    return _product_along(vg, path)


def _check_loop(loop: Sequence[int]) -> list[int]:
    loop = [int(v) for v in loop]
    if len(loop) < 2 or loop[0] != loop[-1]:
        raise LoopError(f"sequence {loop} is not a closed loop")
    interior = loop[:-1]
    if len(set(interior)) != len(interior):
        raise LoopError(f"loop {loop} revisits a vertex")
    return loop


def holonomy(vg: VoltageGraph, loop: Sequence[int]) -> np.ndarray:
    """Holonomy around a closed loop based at its first vertex."""
    return _product_along(vg, _check_loop(loop))


def scalar_holonomy_of(H: np.ndarray) -> float:
    """``tr(2I - H - H^T)``, clipped at zero against rounding."""
    return max(0.0, float(2.0 * (H.shape[0] - np.trace(H))))


def scalar_holonomy(vg: VoltageGraph, loop: Sequence[int]) -> float:
    return scalar_holonomy_of(holonomy(vg, loop))


def tree_gauge(vg: VoltageGraph, tree: SpanningTree) -> tuple[np.ndarray, VoltageGraph]:
    """Gauge making the voltage the identity on every tree edge.

    Built by a single BFS sweep: the root gets the identity and each child
    ``c`` of ``p`` gets ``xi_c = xi_p alpha_pc``. Returns the gauge and the
    transformed voltage.
    """
    xi = np.empty((vg.n, vg.dim, vg.dim))
    xi[tree.root] = np.eye(vg.dim)
    for c in tree.order[1:]:
        p = int(tree.parent[c])
        xi[c] = xi[p] @ vg.rot(p, c)
        if tree.depth[c] % REPROJECT_EVERY == 0:
            xi[c] = project_to_rotation(xi[c])
    return xi, gauge_act_voltage(xi, vg)


def cotree_deviation(gauged: VoltageGraph, tree: SpanningTree) -> dict[int, float]:
    """Max-norm distance from the identity of each cotree edge in the tree gauge."""
    d = gauged.dim
    return {
        e: float(np.max(np.abs(gauged.rotations[e] - np.eye(d)))) for e in tree.cotree_edges
    }


def synchronize(vg: VoltageGraph, tree: SpanningTree, tol_sync: float = TOL_SYNC) -> Optional[np.ndarray]:
    """Gauge ``xi`` with ``alpha_ij = xi_i^{-1} xi_j`` on every edge, or None.

    No search is needed: the tree gauge is canonical up to a global rotation,
    so the voltage is synchronizable iff every cotree edge becomes the
    identity in that gauge.
    """
    xi, gauged = tree_gauge(vg, tree)
    dev = cotree_deviation(gauged, tree)
    if any(v > tol_sync for v in dev.values()):
        return None
    return xi
