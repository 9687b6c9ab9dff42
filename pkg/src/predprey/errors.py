"""Exception types shared across the toolkit."""


class PredPreyError(Exception):
    """Base class for all toolkit errors."""


class DomainError(PredPreyError):
    """State lies outside the mathematical domain of an operation."""


class DegenerateModel(PredPreyError):
    """Parameter set degenerates the model (e.g. zero prey influx)."""


class GuardViolation(PredPreyError):
    """A nonnegative state coordinate fell below the guard threshold.

    Carries the partial trajectory integrated up to the violation.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class StepFailure(PredPreyError):
    """Adaptive stepping could not produce an acceptable step."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NoSignChange(PredPreyError):
    """Root bracket does not straddle a sign change."""


class BelowMinimum(PredPreyError):
    """Requested level lies below the minimum of the level function."""


class NotCoexistence(PredPreyError):
    """Operation requires the coexistence regime (R > 1)."""


class NotStopped(PredPreyError):
    """Growth had not provably stopped by the end of the run."""


class ConfigError(PredPreyError):
    """Run configuration failed validation."""
