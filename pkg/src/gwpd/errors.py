"""Exception types shared across the package."""


class GwpdError(Exception):
    """Base class for all errors raised by this package."""


class InvalidStateError(GwpdError):
    """A wavepacket state violates one of its structural invariants
    (asymmetric width matrix, non-positive-definite Im A, broken
    Q/P symplecticity relations, singular covariance)."""


class MethodConstraintError(GwpdError):
    """A method was applied to a state it does not admit, e.g. a
    frozen-width method with Re A != 0."""


class NumericalError(GwpdError):
    """Propagation failed numerically (branch crossing, singular update,
    non-finite parameters).  Carries the step index when raised mid-run."""

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


class BranchCrossingError(NumericalError):
    """The kinetic flow would cross the branch cut of the log-determinant;
    the time step is too large for phase continuity."""


class ConfigError(GwpdError):
    """Invalid or inconsistent run configuration."""
