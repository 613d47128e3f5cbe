"""Exception types raised by voltgraph.

Every error is a ``ValueError`` subclass so callers that only care about
"bad input" can catch one type; the CLI maps them all to exit code 2.
"""


class VoltgraphError(ValueError):
    pass


class DimensionError(VoltgraphError):
    pass


class ProjectionError(VoltgraphError):
    pass


class StructureError(VoltgraphError):
    pass


class ConnectivityError(StructureError):
    pass


class WeightError(VoltgraphError):
    pass


class PathError(VoltgraphError):
    pass


class LoopError(PathError):
    pass


class BasisError(VoltgraphError):
    pass


class SizeError(VoltgraphError):
    pass


class StabilityError(VoltgraphError):
    pass
