"""Chain MDP with a small reward at the left end and a large one at the right end."""

from typing import Any

import numpy as np

from envs.base import EpisodicEnv
from envs.schemas import ChainConfig
from mdp.schemas import MdpModel

LEFT = 0
RIGHT = 1


class ChainEnv(EpisodicEnv):
    """Chain of ``num_states`` states starting at the left end."""

    name = "chain"

    def __init__(self, config: ChainConfig) -> None:
        self.config = config

    @property
    def num_states(self) -> int:
        return self.config.num_states

    @property
    def num_actions(self) -> int:
        return 2

    @property
    def horizon(self) -> int:
        return self.config.horizon

    def reward(self, state: int) -> float:
        """Reward paid for occupying ``state`` during a step."""
        if state == 0:
            return self.config.start_reward
        if state == self.num_states - 1:
            return self.config.end_reward
        return 0.0

    def step(
        self, step: int, state: int, action: int, rng: np.random.Generator
    ) -> tuple[int, float]:
        return chain_step(self, step, state, action, rng)

    def to_model(self) -> MdpModel:
        return chain_to_model(self.config)

    def metadata(self) -> dict[str, Any]:
        return {"env": self.name, "structure_seed": None}


def chain_step(
    env: ChainEnv, step: int, state: int, action: int, rng: np.random.Generator
) -> tuple[int, float]:
    """
    Sample one chain transition.

    The intended move succeeds with probability p and reverses otherwise; a move
    into a boundary leaves the agent in place.

    Args:
        env: Chain instance
        step: 0-based step index
        state: Current state
        action: LEFT or RIGHT
        rng: Environment noise stream

    Returns:
        Tuple of (next state, reward for the occupied state)

    Raises:
        EnvironmentStepError: If the step, state or action index is invalid
    """
    env.check_step_inputs(step, state, action)
    direction = 1 if action == RIGHT else -1
    if rng.random() >= env.config.success_probability:
        direction = -direction
    next_state = min(max(state + direction, 0), env.num_states - 1)
    return next_state, env.reward(state)


def chain_to_model(config: ChainConfig) -> MdpModel:
    """Exact, step-independent model of ``chain_step``."""
    num_states, p = config.num_states, config.success_probability
    kernel = np.zeros((num_states, 2, num_states))
    for state in range(num_states):
        for action, direction in ((LEFT, -1), (RIGHT, 1)):
            intended = min(max(state + direction, 0), num_states - 1)
            reverse = min(max(state - direction, 0), num_states - 1)
            kernel[state, action, intended] += p
            kernel[state, action, reverse] += 1.0 - p

    state_reward = np.zeros(num_states)
    state_reward[0] = config.start_reward
    state_reward[-1] = config.end_reward
    reward = np.broadcast_to(state_reward[:, None], (num_states, 2))

    transition = np.broadcast_to(kernel, (config.horizon, num_states, 2, num_states))
    rewards = np.broadcast_to(reward, (config.horizon, num_states, 2))
    return MdpModel(transition=transition, reward=rewards, initial_state=0)
