"""Tests for the seeded learning and reference episode loops."""

import numpy as np
import pytest

from agent.learner import PosteriorQLearner
from agent.runner import run_learning, run_reference
from agent.schemas import (
    ALL_VARIANTS,
    ExploreReadAction,
    ReferencePolicy,
    Variant,
    preset_config,
)
from envs.bdcl import BdclEnv
from envs.chain import ChainEnv
from envs.schemas import BdclConfig, ChainConfig
from errors import LearnerInvariantError
from mdp.solvers import backward_induction


@pytest.fixture
def bdcl():
    return BdclEnv(BdclConfig())


@pytest.fixture
def small_chain():
    return ChainEnv(ChainConfig(num_states=5, horizon=10))


def test_single_episode_run(bdcl):
    """Test that K=1 yields one return within [0, H]."""
    result, state = run_learning(bdcl, preset_config(Variant.REVERSEDQ), 1, seed=0)
    assert result.episodes == 1
    assert 0.0 <= result.returns[0] <= bdcl.horizon
    assert state.episodes == 1


@pytest.mark.parametrize("variant", list(Variant))
def test_runs_are_bit_identical_under_repeated_seeds(small_chain, variant):
    """Test the determinism contract for every preset."""
    config = preset_config(variant)
    first, first_state = run_learning(small_chain, config, 20, seed=5)
    second, second_state = run_learning(small_chain, config, 20, seed=5)
    assert first.returns == second.returns
    for name, table in first_state.tables().items():
        np.testing.assert_array_equal(table, second_state.tables()[name], err_msg=name)


def test_different_seeds_differ(bdcl):
    """Test that seeds change the run."""
    config = preset_config(Variant.REVERSEDQ)
    first, _ = run_learning(bdcl, config, 30, seed=1)
    second, _ = run_learning(bdcl, config, 30, seed=2)
    assert first.returns != second.returns


@pytest.mark.parametrize("variant", list(Variant))
def test_invariants_hold_every_episode(bdcl, small_chain, variant):
    """Test bounds, monotonicity and visit counts after every episode."""
    for env in (bdcl, small_chain):
        run_learning(env, preset_config(variant), 40, seed=3, validate=True)


def test_flag_separability(bdcl):
    """Test that the baseline with every flag switched equals the ReversedQ preset."""
    switched = preset_config(
        Variant.RANDOMIZEDQ,
        pass_direction="backward",
        explore_update_timing="per_step",
        explore_reset="never",
        init_scale=1,
        exploit_mix="eta",
    )
    first, first_state = run_learning(bdcl, switched, 25, seed=4)
    second, second_state = run_learning(bdcl, preset_config(Variant.REVERSEDQ), 25, seed=4)
    assert first.returns == second.returns
    np.testing.assert_array_equal(first_state.q, second_state.q)


def test_validate_checks_every_transition(bdcl, mocker):
    """Test that a policy-Q increase undone later in the same episode is still caught."""
    original = PosteriorQLearner.value_and_policy_update
    updated = []

    def bump_then_restore(learner, step, state, action):
        before = float(learner.state.q[step, state, action])
        original(learner, step, state, action)
        if not updated:
            updated.append(((step, state, action), float(learner.state.q[step, state, action])))
            learner.state.q[step, state, action] = before + 0.5
        elif len(updated) == 1:
            entry, value = updated[0]
            learner.state.q[entry] = value
            updated.append((entry, value))

    mocker.patch.object(
        PosteriorQLearner, "value_and_policy_update", autospec=True, side_effect=bump_then_restore
    )
    with pytest.raises(LearnerInvariantError, match="increased"):
        run_learning(bdcl, preset_config(Variant.REVERSEDQ), 1, seed=0, validate=True)


@pytest.mark.parametrize("variant", list(Variant))
def test_explore_read_action_does_not_change_results(small_chain, variant):
    """Test that reading the explore ensemble at the greedy or the taken action is the same.

    The greedy action of Q_i(s_i, .) cannot change between acting and processing step i.
    """
    runs = [
        run_learning(small_chain, preset_config(variant, explore_read_at=read_at), 30, seed=6)
        for read_at in ExploreReadAction
    ]
    assert runs[0][0].returns == runs[1][0].returns
    np.testing.assert_array_equal(runs[0][1].q, runs[1][1].q)


def test_run_metadata(bdcl):
    """Test the recorded preset, structure seed and wall time."""
    result, _ = run_learning(
        bdcl, preset_config(Variant.REVERSEDQ), 2, seed=0, variant_name="reversedq"
    )
    assert result.variant == "reversedq"
    assert result.env == "bdcl"
    assert result.metadata["preset"] == "reversedq"
    assert result.metadata["structure_seed"] == 0
    assert result.metadata["wall_time"] >= 0.0


def test_regret_tracking_converges_on_bdcl(bdcl):
    """Test non-negative regret increments that shrink to near zero."""
    model = bdcl.to_model()
    optimal = backward_induction(model).initial_value(model.initial_state)
    final_increments = []
    for seed in range(5):
        result, _ = run_learning(
            bdcl, preset_config(Variant.REVERSEDQ), 500, seed=seed, model=model, track_regret=True
        )
        increments = optimal - np.asarray(result.policy_values)
        assert np.all(increments >= -1e-12)
        assert increments.sum() >= 0.0
        final_increments.append(increments[-100:].mean())
    assert np.mean(final_increments) < 0.05 * optimal


def test_oracle_reference_plays_optimal_policy(bdcl):
    """Test the oracle reference records V* as its policy value."""
    result = run_reference(bdcl, ReferencePolicy.ORACLE, 50, seed=0, track_regret=True)
    optimal = backward_induction(bdcl.to_model()).initial_value(0)
    assert result.policy_values == [optimal] * 50
    assert result.variant == "oracle"


def test_random_reference_is_reproducible(small_chain):
    """Test that the random reference depends only on the seed."""
    first = run_reference(small_chain, ReferencePolicy.RANDOM, 30, seed=8)
    second = run_reference(small_chain, ReferencePolicy.RANDOM, 30, seed=8)
    assert first.returns == second.returns
    assert first.policy_values is None


def test_all_variants_cover_every_preset():
    """Test that `all` expands to the five presets."""
    assert set(ALL_VARIANTS) == set(Variant)
