"""Exception hierarchy shared by the analytic and simulation modules."""


class CovertGeoError(Exception):
    """Base class for all library errors."""


class DomainError(CovertGeoError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(CovertGeoError, ValueError):
    """A root-finding bracket does not exhibit a sign change."""


class NoRootError(CovertGeoError):
    """Bracket expansion hit its cap without locating a sign change."""


class AccuracyError(CovertGeoError):
    """Quadrature did not reach the requested tolerance.

    The best available estimate and its error bound are attached so callers
    can decide whether to accept them.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UnsupportedExponentError(CovertGeoError, ValueError):
    """A closed form valid only for one path-loss exponent was requested."""


class SingularityError(CovertGeoError, ValueError):
    """A receiver coincides with a transmit antenna."""


class NoInteriorMaximumError(CovertGeoError):
    """The detection probability has no interior maximum (no interference)."""


class UnattainableThresholdError(CovertGeoError):
    """The covertness threshold cannot be reached by any finite power."""


class CovertnessInfeasibleError(CovertGeoError):
    """Even the smallest admissible power violates the covertness threshold."""

    def __init__(self, message: str, power_floor: float):
        super().__init__(message)
        self.power_floor = power_floor


class DegenerateDrawError(CovertGeoError):
    """A sampled beamforming target channel has zero norm."""
