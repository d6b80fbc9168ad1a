"""Exception types shared across the simulator."""


class SqueezeSimError(Exception):
    """Base class for all simulator errors."""


class NonPositive(SqueezeSimError):
    """A parameter violated a positivity (or non-negativity) constraint."""

    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"parameter '{field}' out of range: {value!r}")


class PhiOutOfRange(SqueezeSimError):
    """Pulse rotating angle outside [-pi, pi]."""


class UnknownPreset(SqueezeSimError):
    """Requested preset name is not defined."""


class NegativeOccupation(SqueezeSimError):
    """Thermal occupation numbers must be >= 0."""


class UnstableRegime(SqueezeSimError):
    """Operation requires the dynamically stable regime (sigma > -omega_m/4)."""


class OutOfRegime(SqueezeSimError):
    """Closed-form expression evaluated outside its regime of validity."""


class NegativeTime(SqueezeSimError):
    """Evolution time must be >= 0."""


class NonFiniteResult(SqueezeSimError):
    """Propagation produced non-finite values (deep unstable regime)."""


class StepTooLarge(SqueezeSimError):
    """Integrator local error estimate exceeded its ceiling."""


class DegenerateBranch(SqueezeSimError):
    """Dissipative closed form undefined at this parameter combination."""


class SingularCovariance(SqueezeSimError):
    """Covariance block too close to singular for Wigner evaluation."""


class FitFailed(SqueezeSimError):
    """Least-squares extraction of an effective quantity did not converge."""


class UnphysicalState(SqueezeSimError):
    """Covariance matrix violates symmetry/positivity requirements."""
