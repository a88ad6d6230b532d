"""Shared fixtures and helpers: random small models and vectorized rollouts."""

from typing import Optional

import numpy as np
import pytest

from mdp.schemas import MdpModel


def make_random_model(
    rng: np.random.Generator, num_states: int, num_actions: int, horizon: int
) -> MdpModel:
    """Random MDP with Dirichlet transition rows and uniform rewards in [0, 1]."""
    transition = rng.dirichlet(np.ones(num_states), size=(horizon, num_states, num_actions))
    reward = rng.random((horizon, num_states, num_actions))
    return MdpModel(transition=transition, reward=reward, initial_state=0)


def rollout_returns(
    model: MdpModel,
    episodes: int,
    rng: np.random.Generator,
    actions: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Sample episode returns of a policy on an exact model, all episodes at once.

    Args:
        model: Model to roll out
        episodes: Number of episodes
        rng: Sampling stream
        actions: Deterministic policy table (H, S); uniform random actions when omitted

    Returns:
        Array of episode returns
    """
    states = np.full(episodes, model.initial_state)
    returns = np.zeros(episodes)
    for step in range(model.horizon):
        if actions is None:
            chosen = rng.integers(model.num_actions, size=episodes)
        else:
            chosen = actions[step, states]
        returns += model.reward[step, states, chosen]
        cumulative = model.transition[step, states, chosen].cumsum(axis=1)
        draws = rng.random(episodes)[:, None]
        states = np.minimum((draws > cumulative).sum(axis=1), model.num_states - 1)
    return returns


@pytest.fixture
def rng():
    """Fixed-seed generator for test data."""
    return np.random.default_rng(12345)


@pytest.fixture
def small_model(rng):
    """Random 3-state, 2-action, 3-step model."""
    return make_random_model(rng, num_states=3, num_actions=2, horizon=3)
