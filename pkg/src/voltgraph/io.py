"""JSON file formats for voltage graphs, sections and gauges.

Voltage graph file::

    {"dim": d, "nodes": N,
     "edges": [{"from": i, "to": j, "weight": w, "rotation": [[...], ...]}, ...],
     "metadata": {"name": ..., "seed": ...}}

``rotation`` is ``alpha_{from,to}`` as a row-major d x d array; the reverse
direction is its transpose. Section files are ``{"dim": d, "values": N x d}``
and gauge files ``{"dim": d, "convention": ..., "gauge": [N x (d x d)]}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import DimensionError, StructureError
from .graph import build_graph
from .rotations import project_to_rotation, validate_rotation
from .voltage import VoltageGraph

LOAD_TOL = 1e-6
GAUGE_CONVENTION = "alpha_ij = inv(xi_i) @ xi_j"


def _read(source) -> Any:
    if isinstance(source, (dict, list)):
        return source
    text = Path(source).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"{source}: invalid JSON ({exc})") from None


def voltage_graph_from_dict(data: dict) -> tuple[VoltageGraph, dict]:
    try:
        d = int(data["dim"])
        n = int(data["nodes"])
        records = list(data["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"voltage graph file is missing or has a malformed field: {exc}") from None
    if d < 1:
        raise DimensionError("dim must be positive")
    triples, mats = [], []
    for k, rec in enumerate(records):
        try:
            i, j = int(rec["from"]), int(rec["to"])
            w = float(rec.get("weight", 1.0))
            M = np.array(rec["rotation"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"edge {k}: malformed record ({exc})") from None
        if M.shape != (d, d):
            raise DimensionError(f"edge {k} ({i}, {j}): rotation has shape {M.shape}, expected ({d}, {d})")
        if not validate_rotation(M, LOAD_TOL):
            det = np.linalg.det(M) if np.all(np.isfinite(M)) else float("nan")
            raise StructureError(
                f"edge {k} ({i}, {j}): rotation is not in SO({d}) within {LOAD_TOL:g} (det = {det:.6g})"
            )
        M = project_to_rotation(M)
        triples.append((i, j, w))
        mats.append(M if i > j else M.T)
    g = build_graph(n, triples)
    R = np.array(mats).reshape(len(mats), d, d)
    return VoltageGraph(g, R), dict(data.get("metadata") or {})


def load_voltage_graph(source) -> tuple[VoltageGraph, dict]:
    """Parse a voltage graph file (path or already-decoded dict); returns (graph, metadata)."""
    return voltage_graph_from_dict(_read(source))


def voltage_graph_to_dict(vg: VoltageGraph, metadata: Optional[dict] = None) -> dict:
    out = {
        "dim": vg.dim,
        "nodes": vg.n,
        "edges": [
            {"from": i, "to": j, "weight": float(w), "rotation": vg.rotations[e].tolist()}
            for e, ((i, j), w) in enumerate(zip(vg.graph.edges, vg.graph.weights))
        ],
    }
    if metadata:
        out["metadata"] = metadata
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def save_voltage_graph(vg: VoltageGraph, path, metadata: Optional[dict] = None) -> None:
    Path(path).write_text(dumps(voltage_graph_to_dict(vg, metadata)), encoding="utf-8")


def load_section(source, vg: Optional[VoltageGraph] = None) -> np.ndarray:
    data = _read(source)
    try:
        d = int(data["dim"])
        x = np.array(data["values"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"section file is malformed: {exc}") from None
    if x.ndim != 2 or x.shape[1] != d:
        raise DimensionError(f"section values have shape {x.shape}, expected (N, {d})")
    if vg is not None and x.shape != (vg.n, vg.dim):
        raise DimensionError(f"section shape {x.shape} does not match graph ({vg.n}, {vg.dim})")
    return x


def section_to_dict(x) -> dict:
    x = np.asarray(x, dtype=float)
    return {"dim": int(x.shape[1]), "values": x.tolist()}


def gauge_to_dict(gauge) -> dict:
    gauge = np.asarray(gauge, dtype=float)
    return {"dim": int(gauge.shape[1]), "convention": GAUGE_CONVENTION, "gauge": gauge.tolist()}


def load_gauge(source) -> np.ndarray:
    data = _read(source)
    g = np.array(data["gauge"], dtype=float)
    if g.ndim != 3 or g.shape[1:] != (int(data["dim"]),) * 2:
        raise DimensionError(f"gauge has shape {g.shape}")
    return g
