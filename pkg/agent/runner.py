"""Seeded episode loops for learners and for the oracle/random reference policies."""

import logging
import time
from typing import Callable, Optional

import numpy as np

from agent.learner import PosteriorQLearner
from agent.sampling import make_streams
from agent.schemas import AgentConfig, PassDirection, ReferencePolicy
from agent.state import LearnerState
from envs.base import EpisodicEnv
from harness.schemas import RunResult
from mdp.schemas import DeterministicPolicy, MdpModel, Trajectory
from mdp.solvers import backward_induction, evaluate_policy, evaluate_uniform_policy

logger = logging.getLogger(__name__)


def _play_episode(
    env: EpisodicEnv, choose_action: Callable[[int, int], int], rng: np.random.Generator
) -> tuple[list[tuple[int, int]], list[float], int]:
    state = env.initial_state
    path: list[tuple[int, int]] = []
    rewards: list[float] = []
    for step in range(env.horizon):
        action = choose_action(step, state)
        next_state, reward = env.step(step, state, action, rng)
        path.append((state, action))
        rewards.append(reward)
        state = next_state
    return path, rewards, state


def run_learning(
    env: EpisodicEnv,
    config: AgentConfig,
    episodes: int,
    seed: int,
    model: Optional[MdpModel] = None,
    track_regret: bool = False,
    validate: bool = False,
    variant_name: str = "custom",
) -> tuple[RunResult, LearnerState]:
    """
    Run one learner for ``episodes`` episodes.

    Each episode selects greedy actions, samples the environment with the env stream,
    and processes the transitions in the configured pass direction. In forward mode
    each transition is processed as soon as it is observed.

    Args:
        env: Environment to learn on
        config: Agent config; resolved against the environment size if needed
        episodes: Number of episodes K
        seed: Root seed of the run
        model: Exact model, required for regret tracking; exported from env if omitted
        track_regret: Evaluate the greedy policy at the start of every episode
        validate: Check policy-Q monotonicity after every transition and all learner
            invariants after every episode
        variant_name: Name recorded in the result

    Returns:
        Tuple of (RunResult, final LearnerState)

    Raises:
        EnvironmentStepError: Propagated from the environment
        LearnerInvariantError: If ``validate`` is set and an invariant fails
    """
    started = time.perf_counter()
    streams = make_streams(seed)
    learner = PosteriorQLearner(
        config, env.num_states, env.num_actions, env.horizon, streams.agent, validate=validate
    )
    if track_regret and model is None:
        model = env.to_model()

    forward = learner.config.pass_direction == PassDirection.FORWARD
    returns: list[float] = []
    policy_values: Optional[list[float]] = [] if track_regret else None

    for episode in range(episodes):
        if policy_values is not None:
            policy_values.append(evaluate_policy(model, learner.greedy_policy()))
        previous_q = learner.state.q.copy() if validate else None

        state = env.initial_state
        path: list[tuple[int, int]] = []
        rewards: list[float] = []
        for step in range(env.horizon):
            action = learner.select_action(step, state)
            next_state, reward = env.step(step, state, action, streams.env)
            if forward:
                learner.observe_transition(step, state, action, reward, next_state)
            path.append((state, action))
            rewards.append(reward)
            state = next_state

        if forward:
            learner.end_episode()
        else:
            learner.process_episode(Trajectory.from_steps(path, rewards, state))

        if validate:
            learner.check_invariants(previous_q)
        returns.append(sum(rewards))
        logger.debug(f"{variant_name} seed={seed} episode={episode} return={returns[-1]:.4f}")

    wall_time = time.perf_counter() - started
    logger.debug(f"{variant_name} seed={seed} finished {episodes} episodes in {wall_time:.2f}s")
    result = RunResult.from_returns(
        variant=variant_name,
        env=env.name,
        seed=seed,
        horizon=env.horizon,
        returns=returns,
        policy_values=policy_values,
        metadata={
            **env.metadata(),
            "preset": variant_name,
            "agent_config": learner.config.model_dump(mode="json"),
            "wall_time": wall_time,
        },
    )
    return result, learner.state


def run_reference(
    env: EpisodicEnv,
    policy: ReferencePolicy,
    episodes: int,
    seed: int,
    model: Optional[MdpModel] = None,
    track_regret: bool = False,
) -> RunResult:
    """
    Play a fixed reference policy for ``episodes`` episodes.

    ``oracle`` plays the backward-induction greedy policy every episode; ``random``
    draws uniform actions from the agent stream.

    Args:
        env: Environment to play
        policy: Reference policy
        episodes: Number of episodes K
        seed: Root seed of the run
        model: Exact model; exported from env if omitted
        track_regret: Record the expected value of the played policy per episode

    Returns:
        RunResult of the reference run
    """
    started = time.perf_counter()
    policy = ReferencePolicy(policy)
    streams = make_streams(seed)
    if model is None:
        model = env.to_model()

    if policy == ReferencePolicy.ORACLE:
        greedy: DeterministicPolicy = backward_induction(model).greedy
        choose_action = greedy.action
        episode_value = evaluate_policy(model, greedy)
    else:

        def choose_action(step: int, state: int) -> int:
            return int(streams.agent.integers(env.num_actions))

        # Expected value of the stochastic uniform policy
        episode_value = evaluate_uniform_policy(model)

    returns = []
    for _ in range(episodes):
        _, rewards, _ = _play_episode(env, choose_action, streams.env)
        returns.append(sum(rewards))

    policy_values = [episode_value] * episodes if track_regret else None

    wall_time = time.perf_counter() - started
    logger.debug(f"{policy.value} seed={seed} finished {episodes} episodes in {wall_time:.2f}s")
    return RunResult.from_returns(
        variant=policy.value,
        env=env.name,
        seed=seed,
        horizon=env.horizon,
        returns=returns,
        policy_values=policy_values,
        metadata={**env.metadata(), "preset": policy.value, "wall_time": wall_time},
    )
