"""Scaled-reward metric, reference returns, confidence intervals and learning curves."""

import logging
import math
from typing import Sequence

import numpy as np
from scipy import stats

from errors import DegenerateScaleError, InsufficientSamplesError
from harness.schemas import RunResult, Summary
from mdp.schemas import MdpModel
from mdp.solvers import backward_induction, evaluate_policy, evaluate_uniform_policy

logger = logging.getLogger(__name__)


def reference_returns(model: MdpModel, episodes: int) -> tuple[float, float]:
    """
    Exact expected cumulative returns of the Oracle and Random policies over K episodes.

    Args:
        model: Exact environment model
        episodes: Number of episodes K

    Returns:
        Tuple of (oracle cumulative, random cumulative)
    """
    solution = backward_induction(model)
    oracle = episodes * evaluate_policy(model, solution.greedy)
    random = episodes * evaluate_uniform_policy(model)
    return oracle, random


def scaled_reward(mean_cumulative: float, oracle: float, random: float) -> float:
    """
    Scale a cumulative reward so that Random maps to 0 and Oracle to 100.

    Raises:
        DegenerateScaleError: If ``oracle <= random``
    """
    if not oracle > random:
        raise DegenerateScaleError(
            f"Oracle return {oracle!r} does not exceed random return {random!r}; "
            f"the scaled metric is undefined"
        )
    return 100.0 * (mean_cumulative - random) / (oracle - random)


def _t_quantile(level: float, dof: int) -> float:
    return float(stats.t.ppf(0.5 + level / 2.0, dof))


def confidence_interval(samples: Sequence[float], level: float = 0.95) -> tuple[float, float]:
    """
    Student-t confidence interval of the mean.

    Args:
        samples: At least two observations
        level: Confidence level

    Returns:
        Tuple of (mean, half-width)

    Raises:
        InsufficientSamplesError: If fewer than two samples are given
    """
    values = np.asarray(samples, dtype=np.float64)
    if values.size < 2:
        raise InsufficientSamplesError(
            f"A confidence interval needs at least 2 samples, got {values.size}"
        )
    mean = float(values.mean())
    if np.ptp(values) == 0.0:
        return mean, 0.0
    half_width = _t_quantile(level, values.size - 1) * float(values.std(ddof=1))
    return mean, half_width / math.sqrt(values.size)


def scaled_curve(
    cumulative: np.ndarray,
    oracle_per_episode: float,
    random_per_episode: float,
    level: float = 0.95,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Scaled cumulative reward per episode across seeds.

    At episode k the references are ``k * oracle_per_episode`` and
    ``k * random_per_episode``.

    Args:
        cumulative: Cumulative returns of shape (n_seeds, K)
        oracle_per_episode: Expected oracle return of one episode
        random_per_episode: Expected random return of one episode
        level: Confidence level of the band

    Returns:
        Tuple of (mean curve, half-width curve); half-widths are NaN for one seed

    Raises:
        DegenerateScaleError: If the oracle does not beat the random reference
    """
    if not oracle_per_episode > random_per_episode:
        raise DegenerateScaleError(
            f"Oracle return {oracle_per_episode!r} does not exceed random return "
            f"{random_per_episode!r}; the scaled metric is undefined"
        )
    cumulative = np.atleast_2d(np.asarray(cumulative, dtype=np.float64))
    n_seeds, episodes = cumulative.shape
    k = np.arange(1, episodes + 1, dtype=np.float64)
    random_ref = k * random_per_episode
    scaled = 100.0 * (cumulative - random_ref) / (k * oracle_per_episode - random_ref)
    mean = scaled.mean(axis=0)
    if n_seeds < 2:
        return mean, np.full(episodes, np.nan)
    half_width = _t_quantile(level, n_seeds - 1) * scaled.std(axis=0, ddof=1) / math.sqrt(n_seeds)
    return mean, half_width


def summarize(
    variant: str,
    env: str,
    results: Sequence[RunResult],
    oracle_per_episode: float,
    random_per_episode: float,
) -> Summary:
    """
    Aggregate per-seed results into a Summary.

    Results are sorted by seed before reduction, so the summary does not depend on
    the order in which runs finished.

    Args:
        variant: Variant name
        env: Environment name
        results: One RunResult per seed, all with the same number of episodes
        oracle_per_episode: Expected oracle return of one episode
        random_per_episode: Expected random return of one episode

    Returns:
        Summary of the variant
    """
    ordered = sorted(results, key=lambda result: result.seed)
    episodes = ordered[0].episodes
    cumulative = np.array([result.cumulative for result in ordered], dtype=np.float64)
    oracle = episodes * oracle_per_episode
    random = episodes * random_per_episode

    final = [scaled_reward(row[-1], oracle, random) for row in cumulative]
    if len(final) >= 2:
        scaled_mean, half_width = confidence_interval(final)
    else:
        logger.warning(f"Single seed for {variant} on {env}: no confidence interval")
        scaled_mean, half_width = final[0], math.nan

    curve_mean, curve_half_width = scaled_curve(cumulative, oracle_per_episode, random_per_episode)

    regret_mean = None
    if all(result.policy_values is not None for result in ordered):
        regrets = [
            float(np.sum(oracle_per_episode - np.asarray(result.policy_values)))
            for result in ordered
        ]
        regret_mean = float(np.mean(regrets))

    return Summary(
        variant=variant,
        env=env,
        n_seeds=len(ordered),
        episodes=episodes,
        scaled_mean=scaled_mean,
        ci_half_width=half_width,
        oracle_return=oracle,
        random_return=random,
        curve_mean=curve_mean.tolist(),
        curve_half_width=curve_half_width.tolist(),
        regret_mean=regret_mean,
    )
