"""Posterior-sampling Q-learner: ReversedQ and, through variant flags, RandomizedQ.

Each processed transition (step, s, a, r, s') applies two updates in order:

1. ``ensemble_update``: every exploit/explore ensemble member is mixed toward its
   target with a fresh Beta weight.
2. ``value_and_policy_update``: the exploit value, explore tables and policy Q-table
   are refreshed from the ensembles and the visit counter is incremented.
"""

import logging
import math
from typing import Optional

import numpy as np

from agent.sampling import Weights, sample_mix_weights
from agent.schemas import (
    AgentConfig,
    ExploreReadAction,
    ExploreReset,
    PassDirection,
    UpdateTiming,
)
from agent.state import LearnerState, init_state
from errors import InvalidTrajectoryError, LearnerInvariantError
from mdp.schemas import DeterministicPolicy, Trajectory

logger = logging.getLogger(__name__)

# Slack for floating-point rounding in range checks
_BOUND_TOLERANCE = 1e-9


def convex_mix(current: Weights, target: Weights, weight: Weights) -> Weights:
    """Return ``(1 - weight) * current + weight * target``."""
    return (1.0 - weight) * current + weight * target


class PosteriorQLearner:
    """Tabular learner owning one LearnerState and its agent weight stream."""

    def __init__(
        self,
        config: AgentConfig,
        num_states: int,
        num_actions: int,
        horizon: int,
        rng: np.random.Generator,
        validate: bool = False,
    ) -> None:
        """
        Initialize the learner.

        Args:
            config: Agent config; size-dependent defaults are resolved here if unset
            num_states: Number of states S
            num_actions: Number of actions A
            horizon: Episode length H
            rng: Agent weight stream
            validate: Check that every processed transition leaves no policy-Q entry larger
        """
        if not config.is_resolved:
            config = config.resolve(num_states, horizon)
        self.config = config
        self.horizon = horizon
        self.rng = rng
        self.validate = validate
        self.state: LearnerState = init_state(config, num_states, num_actions, horizon)
        self._staged = (
            config.explore_update_timing == UpdateTiming.STAGED
            or config.explore_reset == ExploreReset.STAGED
        )

    def select_action(self, step: int, state: int) -> int:
        """Greedy action of the policy Q-table; ties go to the smallest index."""
        return int(np.argmax(self.state.q[step, state]))

    def greedy_policy(self) -> DeterministicPolicy:
        """Snapshot of the current greedy policy."""
        return DeterministicPolicy(np.argmax(self.state.q, axis=2))

    def ensemble_update(
        self,
        step: int,
        state: int,
        action: int,
        reward: float,
        next_state: int,
        weights: Optional[tuple[Weights, Weights]] = None,
    ) -> None:
        """
        Mix every ensemble member toward its target.

        One (exploit, explore) weight pair is drawn per ensemble member, as J exploit
        draws followed by J explore draws.

        Args:
            step: 0-based step index i
            state: State s_i
            action: Action a_i
            reward: Observed reward r
            next_state: Observed s_{i+1}
            weights: Fixed (exploit, explore) weights instead of fresh draws
        """
        st = self.state
        if weights is None:
            weights = sample_mix_weights(
                int(st.counts[step, state, action]),
                self.config,
                self.horizon,
                self.rng,
                size=st.ensemble_size,
            )
        w_exploit, w_explore = weights

        exploit_target = reward + st.v_exploit[step + 1, next_state]
        explore_target = reward + st.v_explore[step + 1, next_state]
        st.exploit_ensemble[step, state, action] = convex_mix(
            st.exploit_ensemble[step, state, action], exploit_target, w_exploit
        )
        st.explore_ensemble[step, state, action] = convex_mix(
            st.explore_ensemble[step, state, action], explore_target, w_explore
        )

    def value_and_policy_update(self, step: int, state: int, action: int) -> None:
        """
        Refresh value tables and the policy Q-table after ``ensemble_update``.

        Args:
            step: 0-based step index i
            state: State s_i
            action: Action a_i
        """
        st, cfg = self.state, self.config
        greedy = int(np.argmax(st.q[step, state]))
        best_member = int(np.argmax(st.explore_ensemble[step, state, action]))
        read_action = greedy if cfg.explore_read_at == ExploreReadAction.GREEDY else action

        st.v_exploit[step, state] = min(
            float(st.v0[step]), float(st.exploit_ensemble[step, state, greedy].max())
        )
        if cfg.explore_update_timing == UpdateTiming.PER_STEP:
            self._refresh_explore(step, state, action, read_action, best_member)

        candidate = cfg.exploit_coefficient * float(
            st.exploit_ensemble[step, state, action].max()
        ) + cfg.mixing_rate * float(st.q_explore[step, state, action])
        st.q[step, state, action] = min(float(st.q[step, state, action]), candidate)
        st.counts[step, state, action] += 1

        if self._staged:
            self._advance_stage(step, state, action, read_action, best_member)

    def _refresh_explore(
        self, step: int, state: int, action: int, read_action: int, member: int
    ) -> None:
        st = self.state
        st.q_explore[step, state, action] = st.explore_ensemble[step, state, read_action, member]
        st.v_explore[step, state] = st.q_explore[step, state].max()

    def _advance_stage(
        self, step: int, state: int, action: int, read_action: int, member: int
    ) -> None:
        st, cfg = self.state, self.config
        if st.counts[step, state, action] < st.stage_next[step, state, action]:
            return
        if cfg.explore_update_timing == UpdateTiming.STAGED:
            self._refresh_explore(step, state, action, read_action, member)
        if cfg.explore_reset == ExploreReset.STAGED:
            st.explore_ensemble[step, state, action] = st.v0[step + 1]
        st.stage_next[step, state, action] = math.ceil(
            cfg.stage_growth * st.stage_next[step, state, action]
        )

    def observe_transition(
        self, step: int, state: int, action: int, reward: float, next_state: int
    ) -> None:
        """
        Apply both updates to one transition.

        Raises:
            LearnerInvariantError: If validating and the policy Q-table grew
        """
        previous_q = self.state.q.copy() if self.validate else None
        self.ensemble_update(step, state, action, reward, next_state)
        self.value_and_policy_update(step, state, action)
        if previous_q is not None and np.any(self.state.q > previous_q):
            raise LearnerInvariantError(
                f"Policy Q-table increased at (step={step}, state={state}, action={action})"
            )

    def end_episode(self) -> None:
        self.state.episodes += 1

    def process_episode(self, trajectory: Trajectory) -> None:
        """
        Process a complete episode in the configured pass direction.

        Backward processes steps H-1, ..., 0 so that each update reads value tables
        already refreshed by the later steps of the same episode; forward processes
        steps 0, ..., H-1.

        Args:
            trajectory: Episode with H rewards and H + 1 path entries

        Raises:
            InvalidTrajectoryError: If the trajectory does not fit the learner
        """
        self._check_trajectory(trajectory)
        steps = range(self.horizon)
        if self.config.pass_direction == PassDirection.BACKWARD:
            steps = reversed(steps)
        for step in steps:
            self.observe_transition(step, *trajectory.transition(step))
        self.end_episode()

    def _check_trajectory(self, trajectory: Trajectory) -> None:
        if trajectory.horizon != self.horizon:
            raise InvalidTrajectoryError(
                f"Trajectory has {trajectory.horizon} steps, learner expects {self.horizon}"
            )
        num_states, num_actions = self.state.num_states, self.state.num_actions
        for state, action in trajectory.path[:-1]:
            if not (0 <= state < num_states and 0 <= action < num_actions):
                raise InvalidTrajectoryError(f"Invalid (state, action) pair ({state}, {action})")
        if not 0 <= trajectory.path[-1][0] < num_states:
            raise InvalidTrajectoryError(f"Invalid final state {trajectory.path[-1][0]}")

    def check_invariants(self, previous_q: Optional[np.ndarray] = None) -> None:
        """
        Verify table ranges, policy-Q monotonicity and visit-count consistency.

        Args:
            previous_q: Earlier copy of the policy Q-table; every entry must not have grown

        Raises:
            LearnerInvariantError: If any invariant fails
        """
        st = self.state
        bound = self.config.init_scale * self.horizon + _BOUND_TOLERANCE
        if st.v0[-1] != 0.0:
            raise LearnerInvariantError("V0 at the terminal step must be zero")
        for name, table in st.tables().items():
            if name in ("counts", "stage_next"):
                continue
            if np.any(table < -_BOUND_TOLERANCE) or np.any(table > bound):
                raise LearnerInvariantError(
                    f"Table {name} left [0, {bound:.6g}]: range "
                    f"[{table.min():.6g}, {table.max():.6g}]"
                )
        if previous_q is not None and np.any(st.q > previous_q):
            raise LearnerInvariantError("Policy Q-table increased")
        visits = st.counts.sum(axis=(1, 2))
        if np.any(visits != st.episodes):
            raise LearnerInvariantError(
                f"Visit counts per step {visits.tolist()} differ from episodes {st.episodes}"
            )
