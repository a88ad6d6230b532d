"""Seeded random streams and the Beta mixing-weight sampler."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from agent.schemas import AgentConfig
from errors import SamplingError

# Draws are kept inside the open interval (0, 1)
_LOWEST = np.finfo(np.float64).tiny
_HIGHEST = np.nextafter(1.0, 0.0)

Weights = Union[float, np.ndarray]


@dataclass(frozen=True)
class RngStreams:
    """Independent named streams derived from one root seed."""

    env: np.random.Generator
    agent: np.random.Generator
    tie_break: np.random.Generator


def make_streams(seed: int) -> RngStreams:
    """
    Derive the environment, agent and tie-break streams from a root seed.

    Each stream is a counter-based Philox generator keyed by a spawned child of
    ``SeedSequence(seed)``, so the streams never overlap and adding draws to one
    does not shift the others.

    Args:
        seed: Non-negative root seed

    Returns:
        RngStreams for one run
    """
    children = np.random.SeedSequence(seed).spawn(3)
    env, agent, tie_break = (np.random.Generator(np.random.Philox(child)) for child in children)
    return RngStreams(env=env, agent=agent, tie_break=tie_break)


def beta_sample(
    alpha: float, beta: float, rng: np.random.Generator, size: Optional[int] = None
) -> Weights:
    """
    Draw from Beta(alpha, beta).

    Shapes below 1 are supported (e.g. ``beta = n0 = 0.05`` for unvisited pairs).

    Args:
        alpha: First shape parameter, > 0
        beta: Second shape parameter, > 0
        rng: Random stream
        size: Number of draws; a scalar is returned when omitted

    Returns:
        Draw(s) in the open interval (0, 1)

    Raises:
        SamplingError: If a shape parameter is not positive
    """
    if not (alpha > 0.0 and beta > 0.0):
        raise SamplingError(f"Beta shapes must be positive, got alpha={alpha}, beta={beta}")
    draws = np.clip(rng.beta(alpha, beta, size=size), _LOWEST, _HIGHEST)
    if size is None:
        return float(draws)
    return draws


def sample_mix_weights(
    count: int,
    config: AgentConfig,
    horizon: int,
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> tuple[Weights, Weights]:
    """
    Draw the exploit and explore mixing weights for a pair visited ``count`` times.

    ``w_exploit ~ Beta((H + 1)/kappa, (N + n0)/kappa)`` is drawn first, then
    ``w_explore ~ Beta(1/kappa, (N + n0)/kappa)``.

    Args:
        count: Visit count N of the (step, state, action) pair
        config: Resolved agent config
        horizon: Episode length H
        rng: Agent weight stream
        size: One weight per ensemble member when given

    Returns:
        Tuple of (exploit weights, explore weights)

    Raises:
        SamplingError: If the count is negative or the config is unresolved
    """
    if count < 0:
        raise SamplingError(f"Visit count must be non-negative, got {count}")
    if config.prior_transitions is None:
        raise SamplingError("prior_transitions is unresolved; call AgentConfig.resolve() first")
    kappa = config.inflation
    shrink = (count + config.prior_transitions) / kappa
    w_exploit = beta_sample((horizon + 1) / kappa, shrink, rng, size=size)
    w_explore = beta_sample(1.0 / kappa, shrink, rng, size=size)
    return w_exploit, w_explore
