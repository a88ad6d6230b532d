"""Learner tables and their informed initialization."""

import copy
from dataclasses import dataclass

import numpy as np

from agent.schemas import AgentConfig


@dataclass
class LearnerState:
    """
    All tables of one learner (0-based steps; value tables have a zero row at H).

    Attributes:
        v0: Initialization vector ``V0[step] = init_scale * (H - step)``, shape (H + 1,)
        q: Policy Q-table, shape (H, S, A)
        q_explore: Explore Q-table, shape (H, S, A)
        exploit_ensemble: Exploit ensemble, shape (H, S, A, J)
        explore_ensemble: Explore ensemble, shape (H, S, A, J)
        v_exploit: Exploit value table, shape (H + 1, S)
        v_explore: Explore value table, shape (H + 1, S)
        counts: Visit counters, shape (H, S, A)
        stage_next: Visit count at which the next stage boundary fires, shape (H, S, A)
        episodes: Number of processed episodes
    """

    v0: np.ndarray
    q: np.ndarray
    q_explore: np.ndarray
    exploit_ensemble: np.ndarray
    explore_ensemble: np.ndarray
    v_exploit: np.ndarray
    v_explore: np.ndarray
    counts: np.ndarray
    stage_next: np.ndarray
    episodes: int = 0

    @property
    def horizon(self) -> int:
        return self.q.shape[0]

    @property
    def num_states(self) -> int:
        return self.q.shape[1]

    @property
    def num_actions(self) -> int:
        return self.q.shape[2]

    @property
    def ensemble_size(self) -> int:
        return self.exploit_ensemble.shape[3]

    def tables(self) -> dict[str, np.ndarray]:
        """Named view of every table, for comparisons and snapshots."""
        return {
            "v0": self.v0,
            "q": self.q,
            "q_explore": self.q_explore,
            "exploit_ensemble": self.exploit_ensemble,
            "explore_ensemble": self.explore_ensemble,
            "v_exploit": self.v_exploit,
            "v_explore": self.v_explore,
            "counts": self.counts,
            "stage_next": self.stage_next,
        }

    def copy(self) -> "LearnerState":
        return copy.deepcopy(self)


def init_state(
    config: AgentConfig, num_states: int, num_actions: int, horizon: int
) -> LearnerState:
    """
    Create a learner state with informed value initialization.

    ``V_exploit[step] = V_explore[step] = V0[step]`` and every Q-type entry at ``step``
    starts at ``V0[step + 1]``; visit counters start at zero.

    Args:
        config: Agent config (only ``ensemble_size`` and ``init_scale`` are read)
        num_states: Number of states S
        num_actions: Number of actions A
        horizon: Episode length H

    Returns:
        Fresh LearnerState
    """
    shape = (horizon, num_states, num_actions)
    v0 = config.init_scale * (horizon - np.arange(horizon + 1, dtype=np.float64))
    q_init = np.broadcast_to(v0[1:, None, None], shape)
    ensemble_init = np.broadcast_to(v0[1:, None, None, None], (*shape, config.ensemble_size))
    v_init = np.broadcast_to(v0[:, None], (horizon + 1, num_states))

    return LearnerState(
        v0=v0,
        q=q_init.copy(),
        q_explore=q_init.copy(),
        exploit_ensemble=ensemble_init.copy(),
        explore_ensemble=ensemble_init.copy(),
        v_exploit=v_init.copy(),
        v_explore=v_init.copy(),
        counts=np.zeros(shape, dtype=np.int64),
        stage_next=np.ones(shape, dtype=np.int64),
    )
