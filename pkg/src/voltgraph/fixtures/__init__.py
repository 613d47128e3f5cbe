"""Shipped example voltage graphs and sections.

Regenerate the JSON files with ``python -m voltgraph.fixtures [directory]``;
the output is deterministic.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .. import io
from ..graph import build_graph, weights_from_embedding
from ..instances import partial_voltage, planted_voltage, path_graph, random_connected_graph, torus_voltage
from ..rotations import sample_haar_batch
from ..voltage import VoltageGraph

HERE = Path(__file__).resolve().parent
SEED = 20240611

# graph fixtures and, where present, the matching section fixture
GRAPHS = ("torus", "so3_grid", "tree", "two_node", "sync", "path_trivial", "four_cycle")
SECTIONS = {"so3_grid": "so3_section", "torus": "torus_section"}


def path(name: str) -> Path:
    return HERE / f"{name}.json"


def load(name: str) -> VoltageGraph:
    return io.load_voltage_graph(path(name))[0]


def load_section(name: str) -> np.ndarray:
    return io.load_section(path(SECTIONS[name]))


def triangulated_grid(side: int):
    """Planar ``side x side`` grid with one diagonal per square and metric weights."""
    edges, lengths = [], []
    for r in range(side):
        for c in range(side):
            a = r * side + c
            if c + 1 < side:
                edges.append((a, a + 1)), lengths.append(1.0)
            if r + 1 < side:
                edges.append((a, a + side)), lengths.append(1.0)
            if r + 1 < side and c + 1 < side:
                edges.append((a, a + side + 1)), lengths.append(np.sqrt(2.0))
    return weights_from_embedding(side * side, edges, lengths)


def build_all() -> dict[str, dict]:
    """All fixture documents keyed by name."""
    rng = np.random.default_rng(SEED)
    docs = {}

    vg = torus_voltage(4, 2, 5)
    docs["torus"] = io.voltage_graph_to_dict(vg, {"name": "torus", "order": 5, "side": 4})
    docs["torus_section"] = io.section_to_dict(rng.standard_normal((vg.n, 2)))

    vg = partial_voltage(triangulated_grid(4), 3, 1, rng)
    docs["so3_grid"] = io.voltage_graph_to_dict(vg, {"name": "so3_grid", "kernel_dim": 1})
    docs["so3_section"] = io.section_to_dict(rng.standard_normal((vg.n, 3)))

    g = random_connected_graph(7, 2.0 * 6 / 7, rng)  # n - 1 edges: a tree
    vg = VoltageGraph(g, sample_haar_batch(g.n_edges, 3, rng), reproject=True)
    docs["tree"] = io.voltage_graph_to_dict(vg, {"name": "tree"})

    vg = VoltageGraph.trivial(build_graph(2, [(1, 0, 1.0)]), 1)
    docs["two_node"] = io.voltage_graph_to_dict(vg, {"name": "two_node"})

    vg = planted_voltage(random_connected_graph(8, 3.5, rng), 3, rng)
    docs["sync"] = io.voltage_graph_to_dict(vg, {"name": "sync"})

    vg = VoltageGraph.trivial(path_graph(5), 2)
    docs["path_trivial"] = io.voltage_graph_to_dict(vg, {"name": "path_trivial"})

    g = build_graph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)])
    vg = VoltageGraph(g, sample_haar_batch(4, 2, rng), reproject=True)
    docs["four_cycle"] = io.voltage_graph_to_dict(vg, {"name": "four_cycle"})
    return docs


def write_all(directory=HERE) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, doc in build_all().items():
        p = directory / f"{name}.json"
        p.write_text(io.dumps(doc), encoding="utf-8")
        written.append(p)
    return written
