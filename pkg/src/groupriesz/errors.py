"""Exception types shared across the library.

The CLI maps these onto exit codes: configuration problems -> 3,
numerical failures -> 4, certification failures -> 2.
"""


class GroupRieszError(Exception):
    """Base class for all library errors."""


class SpecParseError(GroupRieszError):
    """Group specification string does not match the grammar."""


class UnsupportedGroupError(GroupRieszError):
    """Series/rank combination outside the supported set."""


class CapacityError(GroupRieszError):
    """An enumeration would exceed a configured cap."""

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class NormalizationError(GroupRieszError):
    """Weyl dimension product failed to round to an integer."""


class SingularEvaluationError(GroupRieszError):
    """Wall-limit extrapolation branches disagree beyond tolerance."""


class QuadratureResolutionError(GroupRieszError):
    """Quadrature grid too coarse for the requested integrand."""


class IntegrationError(GroupRieszError):
    """Numeric quadrature of a radial transform failed to converge."""


class TruncationError(GroupRieszError):
    """Lattice-sum tail bound exceeds the requested tolerance."""

    def __init__(self, message, required_cut=None):
        super().__init__(message)
        self.required_cut = required_cut


class SearchModeError(GroupRieszError):
    """Requested search mode cannot handle the problem size."""


class ClassModeError(GroupRieszError):
    """Matrix-only operation invoked on a class-function-mode element."""


class InternalError(GroupRieszError):
    """Invariant that should be unreachable was violated."""
