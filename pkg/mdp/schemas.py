"""Numeric containers for finite-horizon tabular MDPs.

All step indices are 0-based: ``step`` runs over ``[0, H)`` and value tables carry
one extra terminal row ``step = H`` that is identically zero.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from errors import InvalidModelError, InvalidPolicyError, InvalidTrajectoryError

# Row sums must be within this distance of 1 after construction
PROB_TOLERANCE = 1e-12
# Rows within this distance of 1 are renormalized; anything further is a construction bug
NORMALIZE_TOLERANCE = 1e-9

# Action stored with the post-episode state in a trajectory; never read by updates
SENTINEL_ACTION = 0


def _frozen_array(values: np.ndarray, dtype: type) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class MdpModel:
    """
    Exact tabular finite-horizon MDP.

    Attributes:
        transition: Kernel ``P[step, s, a, s']`` of shape (H, S, A, S)
        reward: Reward table ``r[step, s, a]`` in [0, 1] of shape (H, S, A)
        initial_state: Start state of every episode
    """

    transition: np.ndarray
    reward: np.ndarray
    initial_state: int = 0

    def __post_init__(self) -> None:
        transition = np.array(self.transition, dtype=np.float64, copy=True)
        reward = np.array(self.reward, dtype=np.float64, copy=True)

        if transition.ndim != 4 or transition.shape[1] != transition.shape[3]:
            raise InvalidModelError(
                f"Transition table must have shape (H, S, A, S), got {transition.shape}"
            )
        horizon, num_states, num_actions, _ = transition.shape
        if min(horizon, num_states, num_actions) < 1:
            raise InvalidModelError(f"Empty model dimensions: {transition.shape}")
        if reward.shape != (horizon, num_states, num_actions):
            raise InvalidModelError(
                f"Reward table must have shape {(horizon, num_states, num_actions)}, "
                f"got {reward.shape}"
            )
        if not np.all(np.isfinite(transition)) or np.any(transition < 0.0):
            raise InvalidModelError("Transition probabilities must be finite and non-negative")

        row_sums = transition.sum(axis=3)
        off = np.abs(row_sums - 1.0)
        if np.any(off > NORMALIZE_TOLERANCE):
            step, s, a = np.unravel_index(int(np.argmax(off)), off.shape)
            raise InvalidModelError(
                f"Transition row (step={step}, s={s}, a={a}) sums to {row_sums[step, s, a]!r}, "
                f"not 1"
            )
        transition /= row_sums[..., None]
        if np.any(np.abs(transition.sum(axis=3) - 1.0) > PROB_TOLERANCE):
            raise InvalidModelError("Transition rows are not stochastic after normalization")

        if not np.all(np.isfinite(reward)) or np.any(reward < 0.0) or np.any(reward > 1.0):
            raise InvalidModelError("Rewards must lie in [0, 1]")
        if not 0 <= int(self.initial_state) < num_states:
            raise InvalidModelError(
                f"Initial state {self.initial_state} outside [0, {num_states})"
            )

        object.__setattr__(self, "transition", _frozen_array(transition, np.float64))
        object.__setattr__(self, "reward", _frozen_array(reward, np.float64))
        object.__setattr__(self, "initial_state", int(self.initial_state))

    @property
    def horizon(self) -> int:
        return self.transition.shape[0]

    @property
    def num_states(self) -> int:
        return self.transition.shape[1]

    @property
    def num_actions(self) -> int:
        return self.transition.shape[2]

    def scale_rewards(self, factor: float) -> "MdpModel":
        """
        Return a copy of the model with every reward multiplied by ``factor``.

        Raises:
            InvalidModelError: If the scaled rewards leave [0, 1]
        """
        return MdpModel(self.transition, self.reward * factor, self.initial_state)


@dataclass(frozen=True)
class DeterministicPolicy:
    """Action table ``actions[step, s]`` of shape (H, S)."""

    actions: np.ndarray

    def __post_init__(self) -> None:
        actions = np.asarray(self.actions)
        if actions.ndim != 2:
            raise InvalidPolicyError(f"Policy table must have shape (H, S), got {actions.shape}")
        if not np.issubdtype(actions.dtype, np.integer):
            raise InvalidPolicyError(f"Policy actions must be integers, got {actions.dtype}")
        if np.any(actions < 0):
            raise InvalidPolicyError("Policy actions must be non-negative")
        object.__setattr__(self, "actions", _frozen_array(actions, np.int64))

    @property
    def horizon(self) -> int:
        return self.actions.shape[0]

    @property
    def num_states(self) -> int:
        return self.actions.shape[1]

    def action(self, step: int, state: int) -> int:
        return int(self.actions[step, state])


@dataclass(frozen=True)
class ValueSolution:
    """
    Optimal values and the greedy policy of a model.

    Attributes:
        values: ``V[step, s]`` of shape (H + 1, S); row H is zero
        q_values: ``Q[step, s, a]`` of shape (H, S, A)
        greedy: Smallest-index argmax policy of ``q_values``
    """

    values: np.ndarray
    q_values: np.ndarray
    greedy: DeterministicPolicy

    def initial_value(self, initial_state: int) -> float:
        return float(self.values[0, initial_state])


@dataclass(frozen=True)
class Trajectory:
    """
    One episode as recorded by the learner.

    Attributes:
        path: ``H + 1`` (state, action) pairs; the last entry holds the post-episode
            state with ``SENTINEL_ACTION``
        rewards: ``H`` rewards in [0, 1]
    """

    path: tuple[tuple[int, int], ...]
    rewards: tuple[float, ...]

    def __post_init__(self) -> None:
        path = tuple((int(s), int(a)) for s, a in self.path)
        rewards = tuple(float(r) for r in self.rewards)
        if not rewards:
            raise InvalidTrajectoryError("Trajectory has no rewards")
        if len(path) != len(rewards) + 1:
            raise InvalidTrajectoryError(
                f"Trajectory path must hold {len(rewards) + 1} entries, got {len(path)}"
            )
        if any(r < 0.0 or r > 1.0 for r in rewards):
            raise InvalidTrajectoryError("Trajectory rewards must lie in [0, 1]")
        object.__setattr__(self, "path", path)
        object.__setattr__(self, "rewards", rewards)

    @classmethod
    def from_steps(
        cls, path: Sequence[tuple[int, int]], rewards: Sequence[float], final_state: int
    ) -> "Trajectory":
        """Build a trajectory from H recorded steps and the observed final state."""
        return cls(path=(*path, (final_state, SENTINEL_ACTION)), rewards=tuple(rewards))

    @property
    def horizon(self) -> int:
        return len(self.rewards)

    def transition(self, step: int) -> tuple[int, int, float, int]:
        """Return ``(s, a, r, s_next)`` observed at ``step``."""
        state, action = self.path[step]
        return state, action, self.rewards[step], self.path[step + 1][0]
