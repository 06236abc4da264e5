"""Exception types raised across the package."""


class MacFusionError(Exception):
    """Base class for all package errors."""


class PositionOutOfRange(MacFusionError, ValueError):
    pass


class IndexOutOfRange(MacFusionError, IndexError):
    pass


class NegativeRate(MacFusionError, ValueError):
    pass


class InconsistentDistortion(MacFusionError, ValueError):
    pass


class SingularBlock(MacFusionError, ArithmeticError):
    pass


class SingularCovariance(MacFusionError, ArithmeticError):
    pass


class OverlappingSets(MacFusionError, ValueError):
    pass


class TooManySensors(MacFusionError, ValueError):
    pass


class NonPositiveAnchor(MacFusionError, ValueError):
    pass


class Infeasible(MacFusionError):
    """No point satisfies the constraints (or none could be found)."""


class InfeasibleSymmetric(Infeasible):
    """Symmetric network cannot reach the distortion target (lambda >= 1)."""


class DegenerateRates(MacFusionError, ValueError):
    pass


class InvalidDistortion(MacFusionError, ValueError):
    pass


class InvalidExponent(MacFusionError, ValueError):
    pass


class NoFeasiblePoint(Infeasible):
    """Grid oracle found no feasible cell."""
