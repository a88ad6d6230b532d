"""Exact dynamic-programming solvers: optimal values, policy evaluation and regret."""

import itertools
import logging
from typing import Iterator, Optional, Sequence

import numpy as np

from errors import InvalidPolicyError
from mdp.schemas import DeterministicPolicy, MdpModel, ValueSolution

logger = logging.getLogger(__name__)

# Upper bound on the number of policies enumerate_policies will generate
MAX_ENUMERATED_POLICIES = 1_000_000


def _step_q_values(model: MdpModel, step: int, next_values: np.ndarray) -> np.ndarray:
    # Shared by every solver so that evaluations of the same policy agree bit-for-bit
    return model.reward[step] + model.transition[step] @ next_values


def _check_policy(model: MdpModel, policy: DeterministicPolicy) -> None:
    if policy.actions.shape != (model.horizon, model.num_states):
        raise InvalidPolicyError(
            f"Policy shape {policy.actions.shape} does not match model "
            f"(H={model.horizon}, S={model.num_states})"
        )
    if np.any(policy.actions >= model.num_actions):
        raise InvalidPolicyError(
            f"Policy uses actions outside [0, {model.num_actions})"
        )


def backward_induction(model: MdpModel) -> ValueSolution:
    """
    Solve a model for its optimal values by backward recursion.

    Ties in the greedy policy are broken by the smallest action index.

    Args:
        model: Validated MDP (invalid models are rejected at construction)

    Returns:
        ValueSolution with V*, Q* and the greedy optimal policy
    """
    horizon, num_states = model.horizon, model.num_states
    values = np.zeros((horizon + 1, num_states))
    q_values = np.empty((horizon, num_states, model.num_actions))
    greedy = np.empty((horizon, num_states), dtype=np.int64)
    states = np.arange(num_states)

    for step in range(horizon - 1, -1, -1):
        q_values[step] = _step_q_values(model, step, values[step + 1])
        greedy[step] = np.argmax(q_values[step], axis=1)
        values[step] = q_values[step][states, greedy[step]]

    return ValueSolution(values=values, q_values=q_values, greedy=DeterministicPolicy(greedy))


def policy_values(model: MdpModel, policy: DeterministicPolicy) -> np.ndarray:
    """
    Exact value table ``V^pi[step, s]`` of shape (H + 1, S) for a deterministic policy.

    Raises:
        InvalidPolicyError: If the policy does not fit the model
    """
    _check_policy(model, policy)
    values = np.zeros((model.horizon + 1, model.num_states))
    states = np.arange(model.num_states)
    for step in range(model.horizon - 1, -1, -1):
        q_step = _step_q_values(model, step, values[step + 1])
        values[step] = q_step[states, policy.actions[step]]
    return values


def evaluate_policy(model: MdpModel, policy: DeterministicPolicy) -> float:
    """
    Expected return ``V_1^pi(s_1)`` of a deterministic policy.

    Args:
        model: MDP to evaluate on
        policy: Deterministic policy for the same model

    Returns:
        Expected episode return in [0, H]

    Raises:
        InvalidPolicyError: If the policy does not fit the model
    """
    return float(policy_values(model, policy)[0, model.initial_state])


def evaluate_uniform_policy(model: MdpModel) -> float:
    """Expected return of the policy that picks every action with probability 1/A."""
    values = np.zeros((model.horizon + 1, model.num_states))
    for step in range(model.horizon - 1, -1, -1):
        values[step] = _step_q_values(model, step, values[step + 1]).mean(axis=1)
    return float(values[0, model.initial_state])


def episode_regrets(
    model: MdpModel,
    episode_policies: Sequence[DeterministicPolicy],
    optimal_value: Optional[float] = None,
) -> np.ndarray:
    """
    Per-episode regret increments ``V*_1(s_1) - V_1^{pi_k}(s_1)``.

    Args:
        model: MDP the policies were played on
        episode_policies: Policy used in each episode
        optimal_value: Precomputed ``V*_1(s_1)``; solved from the model when omitted

    Returns:
        Array with one non-negative gap per episode
    """
    if optimal_value is None:
        optimal_value = backward_induction(model).initial_value(model.initial_state)
    return np.array(
        [optimal_value - evaluate_policy(model, policy) for policy in episode_policies],
        dtype=np.float64,
    )


def regret(model: MdpModel, episode_policies: Sequence[DeterministicPolicy]) -> float:
    """Cumulative regret of a sequence of episode policies."""
    return float(episode_regrets(model, episode_policies).sum())


def enumerate_policies(model: MdpModel) -> Iterator[DeterministicPolicy]:
    """
    Iterate over all ``A^(H*S)`` deterministic policies of a small model.

    Raises:
        InvalidPolicyError: If the model has more than MAX_ENUMERATED_POLICIES policies
    """
    cells = model.horizon * model.num_states
    count = model.num_actions**cells
    if count > MAX_ENUMERATED_POLICIES:
        raise InvalidPolicyError(
            f"Refusing to enumerate {count} policies (limit {MAX_ENUMERATED_POLICIES})"
        )
    logger.debug(f"Enumerating {count} deterministic policies")
    shape = (model.horizon, model.num_states)
    for actions in itertools.product(range(model.num_actions), repeat=cells):
        yield DeterministicPolicy(np.array(actions, dtype=np.int64).reshape(shape))
