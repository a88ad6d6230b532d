"""Unit tests for MDP containers and exact solvers."""

import numpy as np
import pytest

from envs.bdcl import BdclEnv
from envs.chain import LEFT, RIGHT, chain_to_model
from envs.schemas import BdclConfig, ChainConfig
from errors import InvalidModelError, InvalidPolicyError, InvalidTrajectoryError
from mdp.schemas import DeterministicPolicy, MdpModel, Trajectory
from mdp.solvers import (
    backward_induction,
    enumerate_policies,
    episode_regrets,
    evaluate_policy,
    evaluate_uniform_policy,
    policy_values,
    regret,
)
from tests.conftest import make_random_model, rollout_returns


def _constant_policy(model: MdpModel, action: int) -> DeterministicPolicy:
    return DeterministicPolicy(np.full((model.horizon, model.num_states), action, dtype=np.int64))


def _best_by_enumeration(model: MdpModel) -> float:
    return max(evaluate_policy(model, policy) for policy in enumerate_policies(model))


def test_model_rejects_non_stochastic_rows():
    """Test that rows far from summing to 1 are rejected."""
    transition = np.full((1, 2, 1, 2), 0.4)
    with pytest.raises(InvalidModelError):
        MdpModel(transition=transition, reward=np.zeros((1, 2, 1)))


def test_model_renormalizes_rounding_noise():
    """Test that rows within 1e-9 of 1 are renormalized."""
    transition = np.array([[[[0.5 + 5e-10, 0.5]], [[1.0, 0.0]]]])
    model = MdpModel(transition=transition, reward=np.zeros((1, 2, 1)))
    assert np.abs(model.transition.sum(axis=3) - 1.0).max() <= 1e-12


def test_model_rejects_rewards_outside_unit_interval():
    """Test reward range validation."""
    transition = np.ones((1, 1, 1, 1))
    with pytest.raises(InvalidModelError):
        MdpModel(transition=transition, reward=np.full((1, 1, 1), 1.5))


def test_model_tables_are_read_only(small_model):
    """Test that model tables cannot be mutated after construction."""
    with pytest.raises(ValueError):
        small_model.reward[0, 0, 0] = 0.5


def test_backward_induction_single_step():
    """Test H=1 with one state: the better action is chosen."""
    model = MdpModel(transition=np.ones((1, 1, 2, 1)), reward=np.array([[[0.3, 0.7]]]))
    solution = backward_induction(model)
    assert solution.initial_value(0) == pytest.approx(0.7)
    assert solution.greedy.action(0, 0) == 1


def test_backward_induction_terminal_row_is_zero(small_model):
    """Test the value table's terminal row."""
    solution = backward_induction(small_model)
    assert np.all(solution.values[-1] == 0.0)


def test_backward_induction_values_are_bounded(small_model):
    """Test 0 <= V[step] <= H - step and V = max Q."""
    solution = backward_induction(small_model)
    remaining = small_model.horizon - np.arange(small_model.horizon + 1)
    assert np.all(solution.values >= 0.0)
    assert np.all(solution.values <= remaining[:, None] + 1e-12)
    np.testing.assert_array_equal(solution.values[:-1], solution.q_values.max(axis=2))


def test_backward_induction_matches_policy_enumeration():
    """Test against exhaustive enumeration on 200 random small models."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        num_states = int(rng.integers(1, 4))
        num_actions = int(rng.integers(1, 3))
        horizon = int(rng.integers(1, 4))
        model = make_random_model(rng, num_states, num_actions, horizon)
        optimal = backward_induction(model).initial_value(model.initial_state)
        worst = max(worst, abs(optimal - _best_by_enumeration(model)))
    assert worst <= 1e-10


def test_backward_induction_matches_enumeration_on_small_chain():
    """Test the S=2, H=2 chain against its 16 deterministic policies."""
    model = chain_to_model(ChainConfig(num_states=2, horizon=2, success_probability=0.9))
    assert len(list(enumerate_policies(model))) == 16
    optimal = backward_induction(model).initial_value(0)
    assert abs(optimal - _best_by_enumeration(model)) <= 1e-12


def test_greedy_policy_attains_optimal_value(small_model):
    """Test that the greedy policy evaluates exactly to V*."""
    solution = backward_induction(small_model)
    assert evaluate_policy(small_model, solution.greedy) == solution.initial_value(0)


def test_policy_values_of_greedy_match_optimal_table(small_model):
    """Test the full value table of the greedy policy."""
    solution = backward_induction(small_model)
    np.testing.assert_array_equal(policy_values(small_model, solution.greedy), solution.values)


def test_zero_reward_model_evaluates_to_zero(small_model):
    """Test that every policy is worth 0 without rewards."""
    model = small_model.scale_rewards(0.0)
    assert evaluate_policy(model, _constant_policy(model, 1)) == 0.0
    assert evaluate_uniform_policy(model) == 0.0


def test_doubling_rewards_doubles_values_and_keeps_greedy():
    """Test scale equivariance on random models with rewards in [0, 1/2]."""
    rng = np.random.default_rng(7)
    for _ in range(50):
        num_states, num_actions = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        model = make_random_model(rng, num_states, num_actions, int(rng.integers(1, 6)))
        halved = model.scale_rewards(0.5)
        doubled = halved.scale_rewards(2.0)

        base = backward_induction(halved)
        scaled = backward_induction(doubled)

        np.testing.assert_allclose(scaled.values, 2.0 * base.values, rtol=0.0, atol=1e-12)
        assert scaled.initial_value(0) == pytest.approx(2.0 * base.initial_value(0))
        np.testing.assert_array_equal(scaled.greedy.actions, base.greedy.actions)


def test_evaluate_policy_matches_monte_carlo_on_chain():
    """Test the always-right policy on a 3-state chain against 10^6 rollouts."""
    model = chain_to_model(ChainConfig(num_states=3, horizon=3))
    policy = _constant_policy(model, RIGHT)
    returns = rollout_returns(model, 1_000_000, np.random.default_rng(7), policy.actions)
    stderr = returns.std(ddof=1) / np.sqrt(returns.size)
    assert abs(returns.mean() - evaluate_policy(model, policy)) <= 3 * stderr


def test_uniform_policy_with_single_action(small_model):
    """Test that A=1 makes the uniform policy deterministic."""
    model = MdpModel(small_model.transition[:, :, :1], small_model.reward[:, :, :1])
    assert evaluate_uniform_policy(model) == pytest.approx(
        evaluate_policy(model, _constant_policy(model, 0)), abs=1e-15
    )


def test_uniform_policy_with_constant_rewards(small_model):
    """Test that constant rewards c give c*H."""
    model = MdpModel(small_model.transition, np.full(small_model.reward.shape, 0.25))
    assert evaluate_uniform_policy(model) == pytest.approx(0.25 * model.horizon)


def test_uniform_policy_matches_monte_carlo_on_bdcl():
    """Test the uniform policy on BDCL against 10^6 rollouts."""
    model = BdclEnv(BdclConfig()).to_model()
    returns = rollout_returns(model, 1_000_000, np.random.default_rng(11))
    stderr = returns.std(ddof=1) / np.sqrt(returns.size)
    assert abs(returns.mean() - evaluate_uniform_policy(model)) <= 3 * stderr


def test_oracle_value_matches_monte_carlo_on_chain():
    """Test V* of the default chain against 10^5 greedy rollouts."""
    model = chain_to_model(ChainConfig())
    solution = backward_induction(model)
    returns = rollout_returns(model, 100_000, np.random.default_rng(3), solution.greedy.actions)
    stderr = returns.std(ddof=1) / np.sqrt(returns.size)
    assert abs(returns.mean() - solution.initial_value(0)) <= 3 * stderr


def test_regret_is_zero_for_optimal_policies(small_model):
    """Test that playing pi* every episode has no regret."""
    greedy = backward_induction(small_model).greedy
    assert regret(small_model, [greedy] * 5) == 0.0


def test_regret_is_linear_in_repeated_policies():
    """Test always-left on the S=2, H=2 chain for 10 episodes."""
    model = chain_to_model(ChainConfig(num_states=2, horizon=2))
    left = _constant_policy(model, LEFT)
    gap = _best_by_enumeration(model) - evaluate_policy(model, left)
    assert gap > 0.0
    assert regret(model, [left] * 10) == pytest.approx(10 * gap, abs=1e-12)
    increments = episode_regrets(model, [left] * 10)
    assert np.all(increments >= 0.0)


def test_policy_shape_mismatch_is_rejected(small_model):
    """Test policy validation against the model."""
    with pytest.raises(InvalidPolicyError):
        evaluate_policy(small_model, DeterministicPolicy(np.zeros((1, 1), dtype=np.int64)))
    with pytest.raises(InvalidPolicyError):
        evaluate_policy(small_model, _constant_policy(small_model, 5))


def test_enumeration_refuses_large_models():
    """Test the enumeration size limit."""
    model = chain_to_model(ChainConfig(num_states=20, horizon=5))
    with pytest.raises(InvalidPolicyError):
        next(enumerate_policies(model))


def test_trajectory_validation():
    """Test trajectory length and reward checks."""
    trajectory = Trajectory.from_steps([(0, 1), (2, 0)], [0.0, 1.0], final_state=3)
    assert trajectory.horizon == 2
    assert trajectory.transition(1) == (2, 0, 1.0, 3)
    with pytest.raises(InvalidTrajectoryError):
        Trajectory(path=((0, 0),), rewards=(0.0,))
    with pytest.raises(InvalidTrajectoryError):
        Trajectory.from_steps([(0, 0)], [2.0], final_state=0)
