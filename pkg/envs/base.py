"""Common contract of the episodic benchmark environments."""

from abc import ABC, abstractmethod
from typing import Any

import numpy as np

from errors import EnvironmentStepError
from mdp.schemas import MdpModel


class EpisodicEnv(ABC):
    """
    Generative finite-horizon environment with an exact model export.

    Environments are immutable after construction. The random stream is passed to
    every step, so one instance can serve concurrent runs with independent streams.
    """

    name: str = "env"

    @property
    @abstractmethod
    def num_states(self) -> int: ...

    @property
    @abstractmethod
    def num_actions(self) -> int: ...

    @property
    @abstractmethod
    def horizon(self) -> int: ...

    @property
    def initial_state(self) -> int:
        return 0

    @abstractmethod
    def step(
        self, step: int, state: int, action: int, rng: np.random.Generator
    ) -> tuple[int, float]:
        """
        Sample one transition.

        Args:
            step: 0-based step index in [0, H)
            state: Current state
            action: Chosen action
            rng: Environment noise stream

        Returns:
            Tuple of (next state, reward earned at this step)
        """

    @abstractmethod
    def to_model(self) -> MdpModel:
        """Export the exact transition kernel and reward table."""

    def metadata(self) -> dict[str, Any]:
        """Parameters that identify this environment instance in run records."""
        return {"env": self.name}

    def check_step_inputs(self, step: int, state: int, action: int) -> None:
        """
        Validate a step call.

        Raises:
            EnvironmentStepError: If the step, state or action index is out of range
        """
        if not 0 <= step < self.horizon:
            raise EnvironmentStepError(f"Step {step} outside [0, {self.horizon})")
        if not 0 <= state < self.num_states:
            raise EnvironmentStepError(f"State {state} outside [0, {self.num_states})")
        if not 0 <= action < self.num_actions:
            raise EnvironmentStepError(f"Action {action} outside [0, {self.num_actions})")
