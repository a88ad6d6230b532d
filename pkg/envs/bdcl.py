"""Bidirectional Diabolical Combination Lock (BDCL).

Four states: Start, Sink (absorbing), Lock 1 and Lock 2. The first action routes the
agent to one of the locks; on a lock exactly one progress action per (lock, step)
keeps the agent on it and anything else drops it into the Sink. Occupying Lock i at
the last step pays its terminal reward. With probability ``fail_probability`` any
transition is overridden to the Sink.
"""

import logging
from typing import Any

import numpy as np

from envs.base import EpisodicEnv
from envs.schemas import BdclConfig
from mdp.schemas import MdpModel

logger = logging.getLogger(__name__)

START = 0
SINK = 1
LOCK1 = 2
LOCK2 = 3
STATE_NAMES = {START: "Start", SINK: "Sink", LOCK1: "Lock1", LOCK2: "Lock2"}


class BdclEnv(EpisodicEnv):
    """BDCL instance with progress actions fixed at construction."""

    name = "bdcl"

    def __init__(self, config: BdclConfig) -> None:
        """
        Initialize the lock and sample its progress actions.

        Args:
            config: Environment parameters; ``structure_seed`` fixes the progress actions
        """
        self.config = config
        # progress_actions[lock - 1, step] for step in [0, H - 1); the terminal step needs none
        structure_rng = np.random.default_rng(config.structure_seed)
        progress = structure_rng.integers(0, config.num_actions, size=(2, config.horizon - 1))
        progress.setflags(write=False)
        self.progress_actions: np.ndarray = progress
        self.route_threshold: int = (config.num_actions - 1) // 2
        self.sink_reward: float = config.resolved_sink_reward
        logger.debug(
            f"BDCL built (A={config.num_actions}, H={config.horizon}, "
            f"structure_seed={config.structure_seed}): progress={progress.tolist()}"
        )

    @property
    def num_states(self) -> int:
        return 4

    @property
    def num_actions(self) -> int:
        return self.config.num_actions

    @property
    def horizon(self) -> int:
        return self.config.horizon

    @property
    def initial_state(self) -> int:
        return START

    def progress_action(self, lock: int, step: int) -> int:
        """Progress action of Lock ``lock`` (1 or 2) at 0-based ``step`` < H - 1."""
        return int(self.progress_actions[lock - 1, step])

    def intended_next_state(self, step: int, state: int, action: int) -> int:
        """Next state when no failure is drawn."""
        if state == SINK:
            return SINK
        if state == START:
            return LOCK1 if action <= self.route_threshold else LOCK2
        if step == self.horizon - 1:
            return state
        lock = 1 if state == LOCK1 else 2
        return state if action == self.progress_action(lock, step) else SINK

    def reward(self, step: int, state: int) -> float:
        """Reward for occupying ``state`` at ``step``; independent of the action."""
        if state == SINK:
            return self.sink_reward
        if state == START or step < self.horizon - 1:
            return 0.0
        return self.config.lock1_reward if state == LOCK1 else self.config.lock2_reward

    def step(
        self, step: int, state: int, action: int, rng: np.random.Generator
    ) -> tuple[int, float]:
        return bdcl_step(self, step, state, action, rng)

    def to_model(self) -> MdpModel:
        return bdcl_to_model(self)

    def metadata(self) -> dict[str, Any]:
        return {
            "env": self.name,
            "structure_seed": self.config.structure_seed,
            "progress_actions": self.progress_actions.tolist(),
        }


def bdcl_step(
    env: BdclEnv, step: int, state: int, action: int, rng: np.random.Generator
) -> tuple[int, float]:
    """
    Sample one BDCL transition.

    Exactly one uniform draw is consumed per call, whatever the failure probability.

    Args:
        env: Lock instance
        step: 0-based step index
        state: Current state
        action: Chosen action
        rng: Environment noise stream

    Returns:
        Tuple of (next state, reward for the occupied state)

    Raises:
        EnvironmentStepError: If the step, state or action index is invalid
    """
    env.check_step_inputs(step, state, action)
    reward = env.reward(step, state)
    if rng.random() < env.config.fail_probability:
        return SINK, reward
    return env.intended_next_state(step, state, action), reward


def bdcl_to_model(env: BdclEnv) -> MdpModel:
    """Exact model of ``bdcl_step``: ``P = (1 - p_fail) * P_intended + p_fail * delta_Sink``."""
    horizon, num_actions = env.horizon, env.num_actions
    p_fail = env.config.fail_probability
    transition = np.zeros((horizon, 4, num_actions, 4))
    reward = np.zeros((horizon, 4, num_actions))
    for step in range(horizon):
        for state in STATE_NAMES:
            reward[step, state, :] = env.reward(step, state)
            for action in range(num_actions):
                transition[step, state, action, env.intended_next_state(step, state, action)] += (
                    1.0 - p_fail
                )
                transition[step, state, action, SINK] += p_fail
    return MdpModel(transition=transition, reward=reward, initial_state=START)
