import numpy as np
import pytest

from voltgraph.errors import BasisError
from voltgraph.graph import CycleBasis, build_graph, homology_basis, spanning_tree, triangles
from voltgraph.instances import (
    complete_graph,
    cycle_graph,
    grid_graph,
    haar_voltage,
    planted_voltage,
    random_connected_graph,
    random_instance,
    torus_steps,
    torus_voltage,
)
from voltgraph.operators import nullspace_dense
from voltgraph.rotations import rotation_2d, sample_haar
from voltgraph.voltage import VoltageGraph, random_gauge, synchronize
from voltgraph.yangmills import default_tol, extended_yang_mills, gauge_invariance_check, yang_mills


def winding(cycle, n=4):
    """Signed sum of torus step exponents along a closed walk."""
    k = {}
    for a, b, e in torus_steps(n):
        k[(a, b)] = e
        k[(b, a)] = -e
    return sum(k[(a, b)] for a, b in zip(cycle[:-1], cycle[1:]))


def direct_triangle_term(vg, i, j, k):
    H = vg.rot(k, j) @ vg.rot(j, i) @ vg.rot(i, k)
    return float(np.trace(2 * np.eye(vg.dim) - H - H.T))


def test_trivial_and_triangle_free(rng):
    vg = VoltageGraph.trivial(complete_graph(5), 3)
    rep = extended_yang_mills(vg)
    assert rep.ym == 0.0 and rep.extended_ym == 0.0 and rep.is_synchronizable

    vg = haar_voltage(grid_graph(3, 3), 3, rng)
    ym, terms = yang_mills(vg)
    assert ym == 0.0 and terms == []
    rep = extended_yang_mills(vg)
    assert rep.is_flat and not rep.is_synchronizable
    assert len(rep.cycles) == 4


def test_triangle_terms_match_direct_products(rng):
    vg = haar_voltage(complete_graph(5), 3, rng)
    ym, terms = yang_mills(vg)
    tris = triangles(vg.graph)
    direct = [direct_triangle_term(vg, *t) for t in tris]
    assert np.allclose(terms, direct, atol=1e-12)
    assert ym == pytest.approx(sum(direct), abs=1e-11)
    assert all(0 <= t <= 4 * vg.dim + 1e-12 for t in terms)


def test_four_cycle_single_twist():
    g = cycle_graph(4)
    for theta in (0.3, np.pi / 2, 2.0, np.pi):
        R = np.broadcast_to(np.eye(2), (4, 2, 2)).copy()
        R[2] = rotation_2d(theta)
        rep = extended_yang_mills(VoltageGraph(g, R))
        assert rep.ym == 0.0
        assert rep.cycle_terms[0] == pytest.approx(4 * (1 - np.cos(theta)), abs=1e-12)
        assert rep.is_flat and not rep.is_synchronizable


def test_torus_flat_not_synchronizable():
    vg = torus_voltage(4, 2, 5)
    rep = extended_yang_mills(vg)
    assert len(rep.triangles) == 32 and len(rep.cycles) == 2
    assert rep.ym <= 1e-10
    assert rep.is_flat and not rep.is_synchronizable
    for cyc, term in zip(rep.cycles, rep.cycle_terms):
        w = winding(cyc)
        assert term == pytest.approx(4 * (1 - np.cos(2 * np.pi * w / 5)), abs=1e-10)
    assert rep.extended_ym >= 1.0
    assert any(abs(t - 4 * (1 - np.cos(6 * np.pi / 5))) <= 1e-10 for t in rep.cycle_terms)


def test_torus_higher_dimension():
    rep = extended_yang_mills(torus_voltage(5, 3, 7))
    assert rep.is_flat and not rep.is_synchronizable
    for cyc, term in zip(rep.cycles, rep.cycle_terms):
        assert term == pytest.approx(4 * (1 - np.cos(2 * np.pi * winding(cyc, 5) / 7)), abs=1e-10)


def test_planted_is_synchronizable(rng):
    for _ in range(30):
        vg = planted_voltage(random_connected_graph(8, 4, rng), int(rng.integers(1, 5)), rng)
        rep = extended_yang_mills(vg)
        assert rep.extended_ym <= 1e-10
        assert rep.is_synchronizable and rep.is_flat


def test_gauge_invariance_k5(rng):
    g = complete_graph(5)
    basis = homology_basis(g, spanning_tree(g, 0))
    for _ in range(1000):
        vg = haar_voltage(g, 3, rng)
        assert gauge_invariance_check(vg, random_gauge(5, 3, rng), basis)


def test_triangle_terms_gauge_invariant(rng):
    vg = haar_voltage(complete_graph(5), 3, rng)
    from voltgraph.voltage import gauge_act_voltage

    _, before = yang_mills(vg)
    _, after = yang_mills(gauge_act_voltage(random_gauge(5, 3, rng), vg))
    assert np.allclose(before, after, atol=1e-12)


def test_verdict_independent_of_basis(rng):
    for _ in range(40):
        vg = random_instance(rng, max_n=7)
        g = vg.graph
        verdicts = set()
        for root in range(g.n):
            basis = homology_basis(g, spanning_tree(g, root))
            verdicts.add(extended_yang_mills(vg, basis).is_synchronizable)
        assert len(verdicts) == 1


def test_flat_holonomy_depends_on_class_only():
    vg = torus_voltage(4, 2, 5)
    rep = extended_yang_mills(vg)
    g = vg.graph
    # any basis from another root gives the same multiset of windings up to sign and mixing;
    # the verdict and flatness are what must agree
    for root in (0, 5, 10, 15):
        other = extended_yang_mills(vg, homology_basis(g, spanning_tree(g, root)))
        assert other.is_flat and not other.is_synchronizable
        assert other.ym == pytest.approx(rep.ym, abs=1e-12)


def test_invalid_basis_raises():
    vg = VoltageGraph.trivial(grid_graph(3, 3), 2)
    for bad in [(0, 1, 2, 0), (0, 1, 4, 3), (0, 1, 0)]:
        with pytest.raises(BasisError):
            extended_yang_mills(vg, CycleBasis((bad,), (0,)))


def test_three_verdicts_agree(rng):
    for family in ("haar", "planted", "partial"):
        for _ in range(60):
            vg = random_instance(rng, family=family)
            tree = spanning_tree(vg.graph, int(rng.integers(vg.n)))
            by_tree = synchronize(vg, tree) is not None
            by_energy = extended_yang_mills(vg).is_synchronizable
            by_kernel = nullspace_dense(vg)[0] == vg.dim
            assert by_tree == by_energy == by_kernel


def test_tolerances_scale_with_term_count():
    rep = extended_yang_mills(torus_voltage(4, 2, 5))
    assert rep.tol_flat == default_tol(32) == pytest.approx(32e-8)
    assert rep.tol_sync == pytest.approx(34e-8)
    rep = extended_yang_mills(torus_voltage(4, 2, 5), tol=1.0)
    assert rep.tol_flat == 32.0
    assert default_tol(0) == 1e-8


def test_single_edge_graph():
    vg = VoltageGraph(build_graph(2, [(1, 0, 1.0)]), [sample_haar(3, 1)])
    rep = extended_yang_mills(vg)
    assert rep.ym == 0.0 and rep.cycles == () and rep.is_synchronizable


def test_report_to_dict_roundtrip():
    d = extended_yang_mills(torus_voltage(4, 2, 5)).to_dict()
    assert d["is_flat"] is True and len(d["cycles"]) == 2 and len(d["triangle_terms"]) == 32
