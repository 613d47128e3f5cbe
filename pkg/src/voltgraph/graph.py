"""Weighted graphs, spanning trees, triangles, Z/2 homology and tree blow-ups.

Edges are stored oriented ``tail > head`` (the larger index first). Every
per-edge array in the package is indexed by the position of the edge in
``WeightedGraph.edges``, which keeps the insertion order of the input.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConnectivityError, LoopError, PathError, StructureError, WeightError


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    weights: np.ndarray
    degrees: np.ndarray = field(repr=False)
    # neighbors[i] = ((j, edge index), ...) in edge insertion order
    neighbors: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False)
    _index: dict = field(repr=False, compare=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def tails(self) -> np.ndarray:
        return np.array([e[0] for e in self.edges], dtype=int)

    @property
    def heads(self) -> np.ndarray:
        return np.array([e[1] for e in self.edges], dtype=int)

    def edge_index(self, i: int, j: int) -> int:
        """Index of the edge joining ``i`` and ``j``; raises PathError if absent."""
        try:
            return self._index[(max(i, j), min(i, j))]
        except KeyError:
            raise PathError(f"nodes {i} and {j} are not adjacent") from None

    def has_edge(self, i: int, j: int) -> bool:
        return (max(i, j), min(i, j)) in self._index

    def weight(self, i: int, j: int) -> float:
        return float(self.weights[self.edge_index(i, j)])


def build_graph(n: int, edges: Iterable[Sequence]) -> WeightedGraph:
    """Validate and build a connected simple weighted graph.

    ``edges`` holds ``(i, j, weight)`` triples; orientation of the input pair
    is irrelevant, edges are stored as ``(max, min)``.
    """
    n = int(n)
    if n < 2:
        raise StructureError("a graph needs at least two nodes (weight degrees are undefined otherwise)")
    oriented: list[tuple[int, int]] = []
    weights: list[float] = []
    index: dict[tuple[int, int], int] = {}
    for k, edge in enumerate(edges):
        i, j, w = int(edge[0]), int(edge[1]), float(edge[2])
        if not (0 <= i < n and 0 <= j < n):
            raise StructureError(f"edge {k} ({i}, {j}) has an endpoint outside [0, {n})")
        if i == j:
            raise StructureError(f"edge {k} is a self-loop at node {i}")
        key = (max(i, j), min(i, j))
        if key in index:
            raise StructureError(f"edge {k} duplicates edge {index[key]} between {key[1]} and {key[0]}")
        if not (w > 0 and np.isfinite(w)):
            raise WeightError(f"edge {k} has nonpositive or non-finite weight {w}")
        index[key] = len(oriented)
        oriented.append(key)
        weights.append(w)

    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, (i, j) in enumerate(oriented):
        nbrs[i].append((j, e))
        nbrs[j].append((i, e))

    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, _ in nbrs[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise ConnectivityError(f"graph is disconnected: node {missing} is unreachable from node 0")

    w = np.array(weights, dtype=float)
    deg = np.zeros(n)
    np.add.at(deg, [e[0] for e in oriented], w)
    np.add.at(deg, [e[1] for e in oriented], w)
    w.setflags(write=False)
    deg.setflags(write=False)
    return WeightedGraph(
        n=n,
        edges=tuple(oriented),
        weights=w,
        degrees=deg,
        neighbors=tuple(tuple(x) for x in nbrs),
        _index=index,
    )


def weights_from_embedding(n: int, edges, lengths) -> WeightedGraph:
    """Graph with weights ``length**-2`` from embedded edge lengths."""
    edges = list(edges)
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (len(edges),):
        raise StructureError("need exactly one length per edge")
    for k, ell in enumerate(lengths):
        if not (ell > 0 and np.isfinite(ell)):
            raise WeightError(f"edge {k} has nonpositive length {ell}")
    return build_graph(n, [(i, j, ell**-2) for (i, j), ell in zip(edges, lengths)])


@dataclass(frozen=True)
class SpanningTree:
    root: int
    parent: np.ndarray  # -1 at the root
    parent_edge: np.ndarray  # -1 at the root
    depth: np.ndarray
    order: tuple[int, ...]  # BFS visiting order, root first
    tree_edges: tuple[int, ...]
    cotree_edges: tuple[int, ...]

    def path(self, a: int, b: int) -> list[int]:
        """Unique tree path from ``a`` to ``b`` as a vertex list."""
        up_a, up_b = [a], [b]
        while self.depth[up_a[-1]] > self.depth[up_b[-1]]:
            up_a.append(int(self.parent[up_a[-1]]))
        while self.depth[up_b[-1]] > self.depth[up_a[-1]]:
            up_b.append(int(self.parent[up_b[-1]]))
        while up_a[-1] != up_b[-1]:
            up_a.append(int(self.parent[up_a[-1]]))
            up_b.append(int(self.parent[up_b[-1]]))
        return up_a + up_b[-2::-1]


def spanning_tree(g: WeightedGraph, root: int = 0) -> SpanningTree:
    """BFS spanning tree, deterministic in the edge insertion order."""
    if not 0 <= root < g.n:
        raise StructureError(f"root {root} outside [0, {g.n})")
    parent = np.full(g.n, -1, dtype=int)
    parent_edge = np.full(g.n, -1, dtype=int)
    depth = np.zeros(g.n, dtype=int)
    seen = np.zeros(g.n, dtype=bool)
    seen[root] = True
    order = [root]
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v, e in g.neighbors[u]:
            if not seen[v]:
                seen[v] = True
                parent[v], parent_edge[v], depth[v] = u, e, depth[u] + 1
                order.append(v)
                queue.append(v)
    tree = sorted(int(e) for e in parent_edge if e >= 0)
    in_tree = set(tree)
    cotree = [e for e in range(g.n_edges) if e not in in_tree]
    for arr in (parent, parent_edge, depth):
        arr.setflags(write=False)
    return SpanningTree(root, parent, parent_edge, depth, tuple(order), tuple(tree), tuple(cotree))


def triangles(g: WeightedGraph) -> list[tuple[int, int, int]]:
    """All 3-cliques ``(i, j, k)`` with ``i < j < k``, in lexicographic order."""
    adj = [set(v for v, _ in g.neighbors[i]) for i in range(g.n)]
    out = []
    for i in range(g.n):
        for j in sorted(v for v in adj[i] if v > i):
            for k in sorted(v for v in adj[i] & adj[j] if v > j):
                out.append((i, j, k))
    return out


def boundary_matrices(g: WeightedGraph, tris=None) -> tuple[np.ndarray, np.ndarray]:
    """Z/2 boundary maps as dense uint8 arrays.

    Returns ``(d1, d2)`` with ``d1`` of shape (n, n_edges) and ``d2`` of shape
    (n_edges, n_triangles).
    """
    if tris is None:
        tris = triangles(g)
    d1 = np.zeros((g.n, g.n_edges), dtype=np.uint8)
    for e, (i, j) in enumerate(g.edges):
        d1[i, e] = d1[j, e] = 1
    d2 = np.zeros((g.n_edges, len(tris)), dtype=np.uint8)
    for t, (i, j, k) in enumerate(tris):
        for a, b in ((i, j), (j, k), (i, k)):
            d2[g.edge_index(a, b), t] = 1
    return d1, d2


class _Z2Basis:
    """Incremental row-echelon basis of Z/2 vectors packed into Python ints."""

    def __init__(self):
        self._pivots: dict[int, int] = {}

    def __len__(self):
        return len(self._pivots)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            row = self._pivots.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; returns False when it was already in the span."""
        v = self.reduce(v)
        if not v:
            return False
        self._pivots[v.bit_length() - 1] = v
        return True


def _edge_bits(g: WeightedGraph, cycle: Sequence[int]) -> int:
    bits = 0
    for a, b in zip(cycle[:-1], cycle[1:]):
        bits ^= 1 << g.edge_index(a, b)
    return bits


def z2_rank(mat: np.ndarray) -> int:
    """Rank over Z/2 of a 0/1 matrix (columns are packed as bitsets)."""
    basis = _Z2Basis()
    for col in np.asarray(mat, dtype=np.uint8).T:
        basis.add(sum(1 << int(r) for r in np.flatnonzero(col)))
    return len(basis)


@dataclass(frozen=True)
class CycleBasis:
    cycles: tuple[tuple[int, ...], ...]  # closed vertex sequences, first == last
    source_edges: tuple[int, ...]  # cotree edge that generated each cycle

    @property
    def h1(self) -> int:
        return len(self.cycles)


def fundamental_cycle(g: WeightedGraph, t: SpanningTree, e: int) -> tuple[int, ...]:
    """Cycle closed by cotree edge ``e = (i, j)``: the tree path i -> j, then back to i."""
    i, j = g.edges[e]
    return tuple(t.path(i, j)) + (i,)


def homology_basis(g: WeightedGraph, t: SpanningTree, tris=None) -> CycleBasis:
    """Greedy basis of H1 chosen among the fundamental cycles of ``t``."""
    if tris is None:
        tris = triangles(g)
    basis = _Z2Basis()
    for i, j, k in tris:
        basis.add(_edge_bits(g, (i, j, k, i)))
    kept, sources = [], []
    for e in t.cotree_edges:
        cyc = fundamental_cycle(g, t, e)
        if basis.add(_edge_bits(g, cyc)):
            kept.append(cyc)
            sources.append(e)
    return CycleBasis(tuple(kept), tuple(sources))


def check_cycle(g: WeightedGraph, cycle: Sequence[int]) -> None:
    """Raise PathError unless ``cycle`` is a closed simple cycle of ``g``."""
    cycle = [int(v) for v in cycle]
    if len(cycle) < 2 or cycle[0] != cycle[-1]:
        raise LoopError(f"loop {cycle} is not closed")
    interior = cycle[:-1]
    if len(set(interior)) != len(interior):
        raise LoopError(f"loop {cycle} revisits a vertex")
    if len(interior) < 3:
        raise LoopError(f"loop {cycle} has fewer than three edges")
    for a, b in zip(cycle[:-1], cycle[1:]):
        if not g.has_edge(a, b):
            raise PathError(f"loop {cycle}: nodes {a} and {b} are not adjacent")


@dataclass(frozen=True)
class BlowUpTree:
    graph: WeightedGraph  # the tree on the blown-up vertex set
    projection: np.ndarray  # blown-up vertex -> original vertex
    edge_map: np.ndarray  # original edge index -> blown-up edge index
    source_n: int
    source_edges: int


def blow_up(g: WeightedGraph, t: SpanningTree) -> BlowUpTree:
    """Tree blow-up of ``g`` along ``t``.

    Vertices ``0..n-1`` are the copies of the original vertices; each cotree
    edge ``i > j`` gets a fresh vertex ``I`` (numbered from ``n``) hanging off
    ``j`` with ``pi(I) = i``.
    """
    proj = list(range(g.n))
    new_edges = []
    for e, (i, j) in enumerate(g.edges):
        if t.parent_edge[i] == e or t.parent_edge[j] == e:
            new_edges.append((i, j, g.weights[e]))
        else:
            big = len(proj)
            proj.append(i)
            new_edges.append((big, j, g.weights[e]))
    tree = build_graph(len(proj), new_edges)
    # build_graph keeps insertion order, so edge e of g maps to edge e of the tree
    edge_map = np.arange(g.n_edges)
    projection = np.array(proj, dtype=int)
    projection.setflags(write=False)
    edge_map.setflags(write=False)
    return BlowUpTree(tree, projection, edge_map, g.n, g.n_edges)
