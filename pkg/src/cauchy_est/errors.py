"""Exception hierarchy shared across the package."""


class CauchyEstError(Exception):
    """Base class for all library errors."""


class DomainError(CauchyEstError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BranchPointError(DomainError):
    """A sample coincides with the branch point of a logarithmic generator."""


class PullbackPoleError(DomainError):
    """An angle maps to the pole of the disk-to-half-plane pullback."""


class DegenerateEstimateError(CauchyEstError, ArithmeticError):
    """An estimate collapsed onto (or below) the real axis and cannot seed
    further steps."""


class SolverError(CauchyEstError, RuntimeError):
    """An iterative solver violated one of its internal guarantees."""


class SimulationError(CauchyEstError, RuntimeError):
    """A Monte-Carlo cell could not produce a statistic."""
