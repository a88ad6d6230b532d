"""Exception hierarchy shared by all benchmark packages."""

from typing import Optional


class BenchmarkError(Exception):
    """Base exception for benchmark errors."""

    pass


class InvalidModelError(BenchmarkError):
    """Raised when an MDP model violates its stochasticity or reward-range invariants."""

    pass


class InvalidPolicyError(BenchmarkError):
    """Raised when a policy table does not fit the model it is evaluated on."""

    pass


class EnvironmentStepError(BenchmarkError):
    """Raised on an invalid step index, state or action passed to an environment."""

    pass


class InvalidTrajectoryError(BenchmarkError):
    """Raised when an episode trajectory is incomplete or malformed."""

    pass


class SamplingError(BenchmarkError):
    """Raised on invalid distribution parameters."""

    pass


class LearnerInvariantError(BenchmarkError):
    """Raised when a learner table leaves its admissible range."""

    pass


class DegenerateScaleError(BenchmarkError):
    """Raised when the oracle reference does not exceed the random reference."""

    pass


class InsufficientSamplesError(BenchmarkError):
    """Raised when a statistic needs more samples than were given."""

    pass


class ExperimentError(BenchmarkError):
    """Exception raised when a seeded run or an experiment fails."""

    def __init__(self, message: str, seed: Optional[int] = None):
        """
        Initialize experiment error.

        Args:
            message: Error message
            seed: Seed of the failing run if available
        """
        super().__init__(message)
        self.seed = seed


class ConfigError(BenchmarkError):
    """Raised on an invalid experiment configuration."""

    pass


class ResultsError(BenchmarkError):
    """Raised when result files are missing or corrupt."""

    pass
