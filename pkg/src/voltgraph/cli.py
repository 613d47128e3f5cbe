"""``voltgraph`` command-line interface.

Exit codes: 0 success, 1 internal error, 2 invalid input.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import io
from .errors import VoltgraphError
from .graph import homology_basis, spanning_tree, triangles
from .instances import (
    haar_voltage,
    planted_voltage,
    random_connected_graph,
    random_section,
    torus_voltage,
)
from .operators import (
    GaugedLaplacian,
    heat_eigen,
    heat_euler,
    nullspace_spanning_tree,
)
from .voltage import VoltageGraph, cotree_deviation, tree_gauge
from .yangmills import extended_yang_mills

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2


class InputError(VoltgraphError):
    pass


def _emit(text: str, out: Optional[str]) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _load(path) -> VoltageGraph:
    vg, _ = io.load_voltage_graph(path)
    return vg


def _spectrum_summary(L: GaugedLaplacian, kernel_dim: int) -> Optional[dict]:
    if L.size > L.dense_cap:
        return None
    vals = L.spectrum().values
    mu = float(vals[kernel_dim]) if kernel_dim < vals.size else None
    return {"min": float(vals[0]), "max": float(vals[-1]), "mu": mu}


def cmd_analyze(args) -> dict:
    vg = _load(args.graph)
    g = vg.graph
    tree = spanning_tree(g, 0)
    tris = triangles(g)
    basis = homology_basis(g, tree, tris)
    report = extended_yang_mills(vg, basis, tol=args.tol, tris=tris)
    _, gauged = tree_gauge(vg, tree)
    dev = cotree_deviation(gauged, tree)
    L = GaugedLaplacian(vg)
    k, _ = nullspace_spanning_tree(L, tree)
    return {
        "N": g.n,
        "edges": g.n_edges,
        "d": vg.dim,
        "h1": basis.h1,
        "triangles": len(tris),
        "ym": report.ym,
        "extended_ym": report.extended_ym,
        "is_flat": report.is_flat,
        "is_synchronizable": report.is_synchronizable,
        "synchronizable_tree_test": all(v <= args.tol for v in dev.values()),
        "kernel_dim": k,
        "spectrum_extrema": _spectrum_summary(L, k),
        "cycle_basis": [list(c) for c in basis.cycles],
        "tol": args.tol,
    }


def _parse_times(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse times {text!r}") from None


def cmd_diffuse(args):
    vg = _load(args.graph)
    x0 = io.load_section(args.section, vg)
    if args.times:
        times = _parse_times(args.times)
    elif args.t_max == 0 or args.snapshots <= 1:
        times = [0.0] if args.t_max == 0 else [args.t_max]
    else:
        times = list(np.linspace(0.0, args.t_max, args.snapshots))
    L = GaugedLaplacian(vg)
    if args.method == "eigen":
        rep = heat_eigen(L, x0, times)
    else:
        rep = heat_euler(L, x0, max(times), dt=args.dt, times=times)
    return rep.to_json() + "\n" if args.format == "json" else rep.to_csv()


def cmd_sync(args) -> dict:
    vg = _load(args.graph)
    g = vg.graph
    tree = spanning_tree(g, 0)
    xi, gauged = tree_gauge(vg, tree)
    dev = cotree_deviation(gauged, tree)
    if all(v <= args.tol for v in dev.values()):
        return {"synchronizable": True, **io.gauge_to_dict(xi)}
    basis = homology_basis(g, tree)
    report = extended_yang_mills(vg, basis, tol=args.tol)
    cycles = [
        {"cycle": list(c), "scalar_holonomy": h}
        for c, h in zip(report.cycles, report.cycle_terms)
        if h > args.tol
    ]
    tris = [
        {"triangle": list(t), "scalar_holonomy": h}
        for t, h in zip(report.triangles, report.triangle_terms)
        if h > args.tol
    ]
    return {
        "synchronizable": False,
        "ym": report.ym,
        "extended_ym": report.extended_ym,
        "obstructed_cotree_edges": [
            {"edge": e, "from": g.edges[e][0], "to": g.edges[e][1], "deviation": v}
            for e, v in dev.items()
            if v > args.tol
        ],
        "obstructed_basis_cycles": cycles,
        "obstructed_triangles": tris,
    }


def cmd_spectrum(args) -> dict:
    vg = _load(args.graph)
    L = GaugedLaplacian(vg)
    vals = L.spectrum().values
    k, _ = nullspace_spanning_tree(L)
    count = vals.size if args.count is None else max(0, min(args.count, vals.size))
    return {
        "size": int(vals.size),
        "eigenvalues": [float(v) for v in vals[:count]],
        "kernel_dim": k,
        "mu": float(vals[k]) if k < vals.size else None,
    }


def cmd_homology(args) -> dict:
    vg = _load(args.graph)
    g = vg.graph
    tree = spanning_tree(g, 0)
    tris = triangles(g)
    basis = homology_basis(g, tree, tris)
    return {
        "h1": basis.h1,
        "cycles": [list(c) for c in basis.cycles],
        "cycle_rank": g.n_edges - g.n + 1,
        "triangles": len(tris),
        "basis": "greedy fundamental cycles of the BFS spanning tree rooted at node 0",
    }


def cmd_random(args):
    for name in ("nodes", "dim"):
        if getattr(args, name) < 1:
            raise InputError(f"--{name} must be positive")
    rng = np.random.default_rng(args.seed)
    meta = {"name": f"{args.mode}-n{args.nodes}-d{args.dim}", "seed": args.seed, "mode": args.mode}
    if args.mode == "torus":
        side = math.isqrt(args.nodes)
        if side * side != args.nodes:
            raise InputError("torus mode needs --nodes to be a perfect square")
        degree = 6 if args.degree is None else args.degree
        if degree not in (4, 6):
            raise InputError("torus mode supports --degree 4 (plain grid) or 6 (with diagonals)")
        vg = torus_voltage(side, args.dim, args.order, diagonals=degree == 6)
        meta["order"] = args.order
    else:
        degree = 3.0 if args.degree is None else args.degree
        if degree <= 0:
            raise InputError("--degree must be positive")
        g = random_connected_graph(args.nodes, degree, rng)
        if args.mode == "trivial":
            vg = VoltageGraph.trivial(g, args.dim)
        elif args.mode == "haar":
            vg = haar_voltage(g, args.dim, rng)
        else:
            vg = planted_voltage(g, args.dim, rng)
    if args.section_out:
        x = random_section(vg.n, vg.dim, np.random.default_rng([args.seed, 1]))
        Path(args.section_out).write_text(io.dumps(io.section_to_dict(x)), encoding="utf-8")
    return io.voltage_graph_to_dict(vg, meta)


def _common(p: argparse.ArgumentParser, fmt=("json",)):
    p.add_argument("--tol", type=float, default=1e-8, help="synchronization / flatness tolerance per term")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=fmt, default=fmt[0])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voltgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="kernel, homology and Yang-Mills summary")
    p.add_argument("graph")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("diffuse", help="gauged heat flow of a section")
    p.add_argument("graph")
    p.add_argument("section")
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--snapshots", type=int, default=5)
    p.add_argument("--times", default=None, help="comma-separated snapshot times (overrides --t-max/--snapshots)")
    p.add_argument("--method", choices=("eigen", "euler"), default="eigen")
    p.add_argument("--dt", type=float, default=0.1)
    _common(p, ("csv", "json"))
    p.set_defaults(func=cmd_diffuse)

    p = sub.add_parser("sync", help="synchronizing gauge or obstruction summary")
    p.add_argument("graph")
    _common(p)
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("spectrum", help="eigenvalues of the gauged Laplacian")
    p.add_argument("graph")
    p.add_argument("--count", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("homology", help="Z/2 first homology and cycle basis")
    p.add_argument("graph")
    _common(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("random", help="generate a voltage graph file")
    p.add_argument("--nodes", type=int, default=8)
    p.add_argument("--degree", type=float, default=None)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("trivial", "haar", "synchronizable", "torus"), default="haar")
    p.add_argument("--order", type=int, default=5, help="order of alpha0 in torus mode")
    p.add_argument("--section-out", default=None, help="also write a Gaussian section file here")
    _common(p)
    p.set_defaults(func=cmd_random)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
        text = result if isinstance(result, str) else io.dumps(result)
        _emit(text, args.out)
    except (VoltgraphError, ValueError, OSError) as exc:
        print(f"voltgraph {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"voltgraph {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
