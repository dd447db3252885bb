"""Exception hierarchy shared across the package."""


class CondenserError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(CondenserError):
    pass


class InfeasibleSpec(CondenserError):
    """A plate spec leaves no room for nodes (e.g. margin swallows the plate)."""


class UnsupportedDomain(CondenserError):
    pass


class OutsideDomain(CondenserError):
    pass


class SingularPair(CondenserError):
    """Kernel evaluated at coincident points."""


class CloudMismatch(CondenserError):
    """Measure and kernel matrix refer to different point clouds."""


class SolverDiverged(CondenserError):
    """Iterative QP solver hit its iteration cap before the KKT residual target."""


class Infeasible(CondenserError):
    """The admissible class of the constrained problem is empty."""


class InvalidSigma(CondenserError):
    """Signed constraint whose negative part drops below the swept constraint."""


class WrongField(CondenserError):
    """Diagnostic requires a zero external field."""


class ConfigError(CondenserError):
    """Bad run configuration; message carries the offending field."""
