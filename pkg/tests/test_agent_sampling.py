"""Unit tests for seeded streams and the Beta mixing-weight sampler."""

import numpy as np
import pytest

from agent.sampling import beta_sample, make_streams, sample_mix_weights
from agent.schemas import AgentConfig
from errors import SamplingError

DRAWS = 100_000


def _beta_moments(alpha: float, beta: float) -> tuple[float, float]:
    total = alpha + beta
    return alpha / total, alpha * beta / (total**2 * (total + 1.0))


@pytest.mark.parametrize("alpha,beta", [(1.0, 1.0), (6.0, 0.25), (1.0, 0.05)])
def test_beta_sample_moments(alpha, beta):
    """Test empirical mean and variance within 4 standard errors at 10^5 draws."""
    draws = beta_sample(alpha, beta, np.random.default_rng(31), size=DRAWS)
    mean, variance = _beta_moments(alpha, beta)

    assert abs(draws.mean() - mean) <= 4 * np.sqrt(variance / DRAWS)
    # Standard error of the sample variance from the fourth central moment
    fourth = np.mean((draws - mean) ** 4)
    variance_stderr = np.sqrt((fourth - variance**2) / DRAWS)
    assert abs(draws.var(ddof=1) - variance) <= 4 * variance_stderr


def test_beta_sample_uniform_mean():
    """Test Beta(1, 1) mean 0.5 +/- 0.01."""
    draws = beta_sample(1.0, 1.0, np.random.default_rng(1), size=DRAWS)
    assert draws.mean() == pytest.approx(0.5, abs=0.01)


def test_beta_sample_stays_in_open_interval():
    """Test that small shapes never produce exact 0 or 1."""
    draws = beta_sample(0.01, 0.01, np.random.default_rng(2), size=DRAWS)
    assert np.all(draws > 0.0)
    assert np.all(draws < 1.0)


def test_beta_sample_scalar():
    """Test that omitting size returns a float."""
    assert isinstance(beta_sample(2.0, 3.0, np.random.default_rng(0)), float)


@pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (1.0, -0.5)])
def test_beta_sample_rejects_non_positive_shapes(alpha, beta):
    """Test shape validation."""
    with pytest.raises(SamplingError):
        beta_sample(alpha, beta, np.random.default_rng(0))


def test_mix_weights_use_expected_shapes(mocker):
    """Test (H+1)/kappa, (N+n0)/kappa and 1/kappa shapes, exploit first."""
    config = AgentConfig(prior_transitions=0.25, inflation=1.0).resolve(4, 5)
    rng = mocker.Mock()
    rng.beta.return_value = 0.5

    sample_mix_weights(0, config, horizon=5, rng=rng)

    assert [call.args[:2] for call in rng.beta.call_args_list] == [(6.0, 0.25), (1.0, 0.25)]


def test_mix_weights_inflation_halves_shapes(mocker):
    """Test that kappa = 2 halves both shape parameters."""
    config = AgentConfig(prior_transitions=0.25, inflation=2.0).resolve(4, 5)
    rng = mocker.Mock()
    rng.beta.return_value = 0.5

    sample_mix_weights(3, config, horizon=5, rng=rng)

    assert [call.args[:2] for call in rng.beta.call_args_list] == [(3.0, 1.625), (0.5, 1.625)]


def test_explore_weight_shrinks_with_visits():
    """Test E[w_explore] = 1/(1 + N + n0) decreasing in N."""
    config = AgentConfig().resolve(20, 50)
    rng = np.random.default_rng(6)
    means = []
    for count in (0, 10, 100):
        _, explore = sample_mix_weights(count, config, 50, rng, size=DRAWS)
        expected = 1.0 / (1.0 + count + config.prior_transitions)
        assert explore.mean() == pytest.approx(expected, rel=0.05)
        means.append(explore.mean())
    assert means[0] > means[1] > means[2]


def test_mix_weights_reject_negative_counts():
    """Test count validation."""
    config = AgentConfig().resolve(4, 5)
    with pytest.raises(SamplingError):
        sample_mix_weights(-1, config, 5, np.random.default_rng(0))


def test_streams_are_reproducible_and_independent():
    """Test that one seed yields the same streams and that streams differ."""
    first, second = make_streams(42), make_streams(42)
    assert first.env.random() == second.env.random()
    assert first.agent.random() == second.agent.random()
    fresh = make_streams(42)
    assert fresh.env.random() != fresh.agent.random()
