"""Gauge-invariant signal processing on SO(d) voltage graphs."""

from .errors import (
    BasisError,
    ConnectivityError,
    DimensionError,
    LoopError,
    PathError,
    ProjectionError,
    SizeError,
    StabilityError,
    StructureError,
    VoltgraphError,
    WeightError,
)
from .graph import (
    BlowUpTree,
    CycleBasis,
    SpanningTree,
    WeightedGraph,
    blow_up,
    boundary_matrices,
    build_graph,
    homology_basis,
    spanning_tree,
    triangles,
    weights_from_embedding,
)
from .operators import (
    DiffusionReport,
    GaugedLaplacian,
    apply_laplacian,
    assemble_dense,
    blowup_lift_check,
    dirichlet_energy,
    heat_eigen,
    heat_euler,
    inner_product_z,
    nullspace_dense,
    nullspace_spanning_tree,
    spectrum,
)
from .rotations import eigenspace_one, project_to_rotation, sample_haar, validate_rotation
from .voltage import (
    VoltageGraph,
    gauge_act_section,
    gauge_act_voltage,
    holonomy,
    net_voltage,
    scalar_holonomy,
    synchronize,
    tree_gauge,
)
from .yangmills import EnergyReport, extended_yang_mills, gauge_invariance_check, yang_mills

__version__ = "0.1.0"
