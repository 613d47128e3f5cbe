"""Gauged Laplacian, Z-weighted geometry, spectra, nullspaces and heat flow.

Sections are arrays of shape ``(n, d)``. Flattened sections use row-major
order, so node ``i`` occupies entries ``i*d .. i*d + d - 1``.

The Laplacian ``(L x)_i = -sum_j (k_ij / Z_i)(alpha_ij x_j - x_i)`` is
self-adjoint for the inner product ``<<x, y>>_Z = sum_i Z_i x_i . y_i``,
not the Euclidean one. Every spectral routine therefore works with the
symmetric conjugate ``S L S^{-1}``, ``S = diag(sqrt(Z_i)) (x) I_d``.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, SizeError, StabilityError, StructureError
from .graph import BlowUpTree, SpanningTree, spanning_tree
from .rotations import TOL_EIG, common_fixed_space
from .voltage import VoltageGraph, synchronize, tree_gauge

DENSE_CAP = 4096
NULL_RTOL = 1e-8
SPECTRUM_CLAMP = 1e-8


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray  # ascending
    modes: np.ndarray  # (Nd, Nd); column r is vec(phi_r), Z-orthonormal


class GaugedLaplacian:
    """The gauged Laplacian of a voltage graph, with lazily cached factorizations."""

    def __init__(self, vg: VoltageGraph, dense_cap: int = DENSE_CAP):
        self.vg = vg
        self.dense_cap = dense_cap
        g = vg.graph
        self.n, self.d = vg.n, vg.dim
        self.Z = np.asarray(g.degrees)
        self._tails = g.tails
        self._heads = g.heads
        self._w = np.asarray(g.weights)
        self._lock = threading.RLock()
        self._cache: dict = {}

    @property
    def size(self) -> int:
        return self.n * self.d

    def _cached(self, key, build):
        # single-initialization: callers never see a partially built value
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    def _check_section(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n, self.d):
            raise DimensionError(f"section shape {x.shape} does not match ({self.n}, {self.d})")
        return x

    def _check_cap(self):
        if self.size > self.dense_cap:
            raise SizeError(
                f"N*d = {self.size} exceeds the dense cap {self.dense_cap}; "
                "use a smaller graph or raise dense_cap"
            )

    def apply(self, x) -> np.ndarray:
        x = self._check_section(x)
        R, t, h, w = self.vg.rotations, self._tails, self._heads, self._w
        fwd = np.einsum("eab,eb->ea", R, x[h]) - x[t]  # alpha_th x_h - x_t
        bwd = np.einsum("eba,eb->ea", R, x[t]) - x[h]  # alpha_ht x_t - x_h
        acc = np.zeros_like(x)
        np.add.at(acc, t, w[:, None] * fwd)
        np.add.at(acc, h, w[:, None] * bwd)
        return -acc / self.Z[:, None]

    def sparse(self) -> sp.csr_matrix:
        """Sparse Nd x Nd matrix of the operator (no dense cap)."""
        return self._cached("sparse", self._build_sparse)

    def _build_sparse(self):
        d, t, h = self.d, self._tails, self._heads
        R = self.vg.rotations
        scale_t = (self._w / self.Z[t])[:, None, None]
        scale_h = (self._w / self.Z[h])[:, None, None]
        blocks = np.concatenate([-scale_t * R, -scale_h * np.swapaxes(R, 1, 2)])
        brow = np.concatenate([t, h])
        bcol = np.concatenate([h, t])
        ii, jj = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        rows = (brow[:, None, None] * d + ii).ravel()
        cols = (bcol[:, None, None] * d + jj).ravel()
        off = sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(self.size, self.size))
        return (sp.identity(self.size, format="csr") + off).tocsr()

    def dense(self) -> np.ndarray:
        self._check_cap()
        return self._cached("dense", lambda: self.sparse().toarray())

    def symmetric_dense(self) -> np.ndarray:
        """``S L S^{-1}`` with ``S = diag(sqrt(Z)) (x) I``; symmetric."""
        self._check_cap()

        def build():
            s = np.repeat(np.sqrt(self.Z), self.d)
            M = s[:, None] * self.dense() / s[None, :]
            return 0.5 * (M + M.T)

        return self._cached("sym", build)

    def spectrum(self) -> Spectrum:
        self._check_cap()
        return self._cached("spectrum", self._build_spectrum)

    def _build_spectrum(self):
        vals, U = np.linalg.eigh(self.symmetric_dense())
        vals = np.where((vals < 0) & (vals > -SPECTRUM_CLAMP), 0.0, vals)
        vals = np.where((vals > 2) & (vals < 2 + SPECTRUM_CLAMP), 2.0, vals)
        modes = U / np.repeat(np.sqrt(self.Z), self.d)[:, None]
        return Spectrum(vals, modes)


def _lap(L) -> GaugedLaplacian:
    return L if isinstance(L, GaugedLaplacian) else GaugedLaplacian(L)


def apply_laplacian(L: GaugedLaplacian, x) -> np.ndarray:
    """Matrix-free evaluation of the gauged Laplacian on a section."""
    return _lap(L).apply(x)


def inner_product_z(g, x, y) -> float:
    """``sum_i Z_i <x_i, y_i>``; ``g`` is a graph, voltage graph or Laplacian."""
    Z = _degrees(g)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 2 or x.shape[0] != Z.shape[0]:
        raise DimensionError(f"sections of shapes {x.shape} and {y.shape} do not match {Z.shape[0]} nodes")
    return float(np.einsum("i,ia,ia->", Z, x, y))


def _degrees(g) -> np.ndarray:
    if isinstance(g, GaugedLaplacian):
        return g.Z
    if isinstance(g, VoltageGraph):
        return np.asarray(g.graph.degrees)
    return np.asarray(g.degrees)


def norm_z(g, x) -> float:
    return float(np.sqrt(max(inner_product_z(g, x, x), 0.0)))


def dirichlet_energy(L: GaugedLaplacian, x) -> float:
    """``1/2 sum over ordered pairs k_ij |alpha_ij x_j - x_i|^2`` (each edge counted once here)."""
    L = _lap(L)
    x = L._check_section(x)
    diff = np.einsum("eab,eb->ea", L.vg.rotations, x[L._heads]) - x[L._tails]
    return float(np.sum(L._w * np.sum(diff * diff, axis=1)))


def assemble_dense(L: GaugedLaplacian) -> np.ndarray:
    return _lap(L).dense().copy()


def spectrum(L: GaugedLaplacian) -> Spectrum:
    return _lap(L).spectrum()


def nullspace_spanning_tree(
    L: GaugedLaplacian, tree: Optional[SpanningTree] = None, tol_eig: float = TOL_EIG
) -> tuple[int, np.ndarray]:
    """Kernel of L from the common fixed space of the cotree edges in the tree gauge.

    Returns ``(k, basis)`` with ``basis`` of shape ``(k, n, d)``, expressed in
    the caller's gauge (``x_i = xi_i^{-1} x0``).
    """
    L = _lap(L)
    if tree is None:
        tree = spanning_tree(L.vg.graph, 0)
    xi, gauged = tree_gauge(L.vg, tree)
    x0 = common_fixed_space((gauged.rotations[e] for e in tree.cotree_edges), tol_eig, L.d)
    # x_i = xi_i^T x0 for each basis column of x0
    basis = np.einsum("iba,bk->kia", xi, x0)
    return basis.shape[0], basis


def nullspace_dense(L: GaugedLaplacian, rtol: float = NULL_RTOL) -> tuple[int, np.ndarray]:
    """Kernel of L via SVD of the symmetrized dense matrix (oracle route)."""
    L = _lap(L)
    _, s, Vt = np.linalg.svd(L.symmetric_dense())
    null = Vt[s <= rtol * s[0]] if s[0] > 0 else Vt
    basis = null / np.repeat(np.sqrt(L.Z), L.d)[None, :]
    return basis.shape[0], basis.reshape(-1, L.n, L.d)


def kernel_projector(L: GaugedLaplacian, tree: Optional[SpanningTree] = None):
    """Z-orthogonal projection onto ker L, as a function on sections."""
    L = _lap(L)
    k, basis = nullspace_spanning_tree(L, tree)
    if k == 0:
        return lambda x: np.zeros((L.n, L.d))
    B = basis.reshape(k, -1).T  # (Nd, k)
    zw = np.repeat(L.Z, L.d)
    gram = B.T @ (zw[:, None] * B)
    chol = np.linalg.cholesky(gram)
    Q = np.linalg.solve(chol, B.T).T  # Z-orthonormal columns

    def project(x):
        v = np.asarray(x, dtype=float).ravel()
        return (Q @ (Q.T @ (zw * v))).reshape(L.n, L.d)

    return project


def smallest_nonzero_eigenvalue(L: GaugedLaplacian) -> Optional[float]:
    """``mu``: the eigenvalue after the ``dim ker L`` zero eigenvalues."""
    L = _lap(L)
    k, _ = nullspace_spanning_tree(L)
    vals = L.spectrum().values
    return float(vals[k]) if k < vals.size else None


@dataclass
class DiffusionReport:
    times: np.ndarray
    snapshots: np.ndarray  # (T, n, d)
    energy: np.ndarray
    dist_to_limit: np.ndarray  # Z-norm distance to the kernel projection of x0
    backend: str
    meta: dict = field(default_factory=dict)

    def header(self) -> list[str]:
        _, n, d = self.snapshots.shape
        return ["t", "energy", "dist_to_limit"] + [f"x_{i}_{a}" for i in range(n) for a in range(d)]

    def rows(self) -> list[list[float]]:
        flat = self.snapshots.reshape(len(self.times), -1)
        return [
            [float(t), float(e), float(r), *map(float, row)]
            for t, e, r, row in zip(self.times, self.energy, self.dist_to_limit, flat)
        ]

    def to_csv(self) -> str:
        lines = [",".join(self.header())]
        lines += [",".join(f"{v:.17g}" for v in row) for row in self.rows()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "backend": self.backend,
                "times": self.times.tolist(),
                "energy": self.energy.tolist(),
                "dist_to_limit": self.dist_to_limit.tolist(),
                "snapshots": self.snapshots.tolist(),
                **({"meta": self.meta} if self.meta else {}),
            },
            indent=2,
        )


def _report(L, x0, times, snaps, backend) -> DiffusionReport:
    project = kernel_projector(L)
    limit = project(x0)
    snaps = np.asarray(snaps)
    energy = np.array([dirichlet_energy(L, x) for x in snaps])
    dist = np.array([norm_z(L, x - limit) for x in snaps])
    return DiffusionReport(np.asarray(times, dtype=float), snaps, energy, dist, backend)


def _check_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or not np.all(np.isfinite(times)):
        raise ValueError("diffusion times must be finite and nonnegative")
    return times


def heat_eigen(L: GaugedLaplacian, x0, times: Sequence[float]) -> DiffusionReport:
    """Exact heat flow ``x(t) = sum_r exp(-lambda_r t) <<phi_r, x0>>_Z phi_r``."""
    L = _lap(L)
    x0 = L._check_section(x0)
    times = _check_times(times)
    spec = L.spectrum()
    coef = spec.modes.T @ (np.repeat(L.Z, L.d) * x0.ravel())
    # t = 0 returns the input itself rather than its round trip through the eigenbasis
    snaps = [
        x0.copy() if t == 0 else (spec.modes @ (np.exp(-spec.values * t) * coef)).reshape(L.n, L.d)
        for t in times
    ]
    return _report(L, x0, times, snaps, "eigen")


def heat_euler(
    L: GaugedLaplacian, x0, t_max: float, dt: float = 0.1, times: Optional[Sequence[float]] = None
) -> DiffusionReport:
    """Forward Euler ``x <- x - dt L x``, stable for ``dt < 1`` since spectrum lies in [0, 2].

    Snapshots are taken at ``times`` (default ``[0, t_max]``), each rounded to
    the nearest whole number of steps.
    """
    L = _lap(L)
    x0 = L._check_section(x0)
    if not 0 < dt < 1:
        raise StabilityError(f"forward Euler needs 0 < dt < 1, got dt={dt}")
    times = _check_times([0.0, t_max] if times is None else times)
    steps = np.rint(times / dt).astype(int)
    A = L.sparse()
    v = x0.ravel().copy()
    snaps = {}
    order = np.argsort(steps, kind="stable")
    done = 0
    for idx in order:
        while done < steps[idx]:
            v = v - dt * (A @ v)
            done += 1
        snaps[idx] = v.reshape(L.n, L.d).copy()
    return _report(L, x0, steps * dt, [snaps[i] for i in range(len(times))], "euler")


def lift_voltage(vg: VoltageGraph, blowup: BlowUpTree) -> VoltageGraph:
    """Voltage on the blow-up tree carried over through the edge bijection."""
    _check_blowup(vg, blowup)
    R = np.empty((blowup.graph.n_edges, vg.dim, vg.dim))
    R[blowup.edge_map] = vg.rotations
    return VoltageGraph(blowup.graph, R)


def _check_blowup(vg: VoltageGraph, b: BlowUpTree):
    g = vg.graph
    if b.source_n != g.n or b.source_edges != g.n_edges or b.graph.n_edges != g.n_edges:
        raise StructureError("blow-up was built from a different graph")
    if b.graph.n_edges != b.graph.n - 1:
        raise StructureError("blow-up is not a tree")
    for e, (i, j) in enumerate(g.edges):
        I, J = b.graph.edges[b.edge_map[e]]
        if (b.projection[I], b.projection[J]) != (i, j):
            raise StructureError(f"blow-up edge {b.edge_map[e]} does not project onto edge {e}")


def blowup_lift_check(
    L: GaugedLaplacian,
    blowup: BlowUpTree,
    x0,
    tol: float = 1e-9,
    lifted: Optional[VoltageGraph] = None,
) -> bool:
    """Compare ``L x0`` with its evaluation through the tree blow-up.

    Computes ``sigma_2 psi^{-1} D psi sigma_1 x0`` where ``D`` is the plain
    graph Laplacian of the blow-up normalized by the *original* degrees
    ``Z_pi(I)`` and ``psi`` synchronizes the lifted voltage on the tree.
    ``lifted`` overrides the lifted voltage (used for negative controls).
    """
    L = _lap(L)
    x0 = L._check_section(x0)
    if lifted is None:
        lifted = lift_voltage(L.vg, blowup)
    else:
        _check_blowup(L.vg, blowup)
        if lifted.graph is not blowup.graph and lifted.graph.edges != blowup.graph.edges:
            raise StructureError("lifted voltage does not live on the blow-up tree")
    tg = blowup.graph
    psi = synchronize(lifted, spanning_tree(tg, 0), tol_sync=np.inf)
    pi = blowup.projection
    z = np.einsum("iab,ib->ia", psi, x0[pi])  # psi sigma_1 x0
    t, h, w = tg.tails, tg.heads, np.asarray(tg.weights)
    acc = np.zeros_like(z)
    np.add.at(acc, t, w[:, None] * (z[h] - z[t]))
    np.add.at(acc, h, w[:, None] * (z[t] - z[h]))
    dz = -acc / L.Z[pi][:, None]
    back = np.einsum("iba,ib->ia", psi, dz)  # psi^{-1}
    y = np.zeros_like(x0)
    np.add.at(y, pi, back)  # sigma_2
    ref = L.apply(x0)
    scale = max(1.0, float(np.max(np.abs(ref))))
    return bool(np.max(np.abs(y - ref)) <= tol * scale)

