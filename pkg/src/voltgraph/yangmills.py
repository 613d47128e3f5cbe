"""Discrete Yang-Mills energy over triangles and its extension by an H1 cycle basis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import BasisError, PathError
from .graph import CycleBasis, check_cycle, homology_basis, spanning_tree, triangles
from .voltage import VoltageGraph, gauge_act_voltage, scalar_holonomy

TOL_TERM = 1e-8


def default_tol(n_terms: int, per_term: Optional[float] = None) -> float:
    """Threshold for a sum of ``n_terms`` non-negative holonomy terms."""
    return (TOL_TERM if per_term is None else per_term) * max(1, n_terms)


@dataclass(frozen=True)
class EnergyReport:
    ym: float
    triangles: tuple[tuple[int, int, int], ...]
    triangle_terms: tuple[float, ...]
    extended_ym: float
    cycles: tuple[tuple[int, ...], ...]
    cycle_terms: tuple[float, ...]
    is_flat: bool
    is_synchronizable: bool
    tol_flat: float
    tol_sync: float

    def to_dict(self) -> dict:
        return {
            "ym": self.ym,
            "extended_ym": self.extended_ym,
            "is_flat": self.is_flat,
            "is_synchronizable": self.is_synchronizable,
            "tol_flat": self.tol_flat,
            "tol_sync": self.tol_sync,
            "triangles": [list(t) for t in self.triangles],
            "triangle_terms": list(self.triangle_terms),
            "cycles": [list(c) for c in self.cycles],
            "cycle_terms": list(self.cycle_terms),
        }


def triangle_terms(vg: VoltageGraph, tris=None) -> tuple[list, list[float]]:
    if tris is None:
        tris = triangles(vg.graph)
    return tris, [scalar_holonomy(vg, (i, j, k, i)) for i, j, k in tris]


def yang_mills(vg: VoltageGraph, tris=None) -> tuple[float, list[float]]:
    """Sum of scalar holonomies over all triangles, plus the per-triangle terms."""
    _, terms = triangle_terms(vg, tris)
    return float(sum(terms)), terms


def extended_yang_mills(
    vg: VoltageGraph,
    basis: Optional[CycleBasis] = None,
    tol: Optional[float] = None,
    tris=None,
) -> EnergyReport:
    """Yang-Mills energy plus the scalar holonomies of an H1 cycle basis.

    ``tol`` is a per-term threshold; the flatness and synchronizability
    verdicts compare the summed energies with ``tol`` times the number of terms.
    Without ``basis`` the greedy basis from a BFS tree at node 0 is used.
    """
    g = vg.graph
    if tris is None:
        tris = triangles(g)
    if basis is None:
        basis = homology_basis(g, spanning_tree(g, 0), tris)
    for c in basis.cycles:
        try:
            check_cycle(g, c)
        except PathError as exc:
            raise BasisError(f"invalid basis cycle: {exc}") from None
    _, tri_terms = triangle_terms(vg, tris)
    cyc_terms = [scalar_holonomy(vg, c) for c in basis.cycles]
    # fixed summation order for reproducibility
    ym = float(sum(tri_terms))
    eym = ym + float(sum(cyc_terms))
    tol_flat = default_tol(len(tri_terms), tol)
    tol_sync = default_tol(len(tri_terms) + len(cyc_terms), tol)
    return EnergyReport(
        ym=ym,
        triangles=tuple(tuple(t) for t in tris),
        triangle_terms=tuple(tri_terms),
        extended_ym=eym,
        cycles=tuple(tuple(c) for c in basis.cycles),
        cycle_terms=tuple(cyc_terms),
        is_flat=ym <= tol_flat,
        is_synchronizable=eym <= tol_sync and ym <= tol_flat,
        tol_flat=tol_flat,
        tol_sync=tol_sync,
    )


def gauge_invariance_check(vg: VoltageGraph, gauge, basis: Optional[CycleBasis] = None) -> bool:
    """True iff the extended energy is unchanged by ``gauge`` (relative 1e-9)."""
    tris = triangles(vg.graph)
    if basis is None:
        basis = homology_basis(vg.graph, spanning_tree(vg.graph, 0), tris)
    before = extended_yang_mills(vg, basis, tris=tris).extended_ym
    after = extended_yang_mills(gauge_act_voltage(gauge, vg), basis, tris=tris).extended_ym
    return bool(abs(after - before) <= 1e-9 * (1.0 + before))
