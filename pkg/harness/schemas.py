"""Pydantic schemas for experiment specs, per-seed results and summaries."""

import itertools
from typing import Any, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from agent.schemas import AgentConfig, Variant, is_reference, preset_config
from envs.schemas import EnvConfig


class RunSpec(BaseModel):
    """One variant on one environment over a list of seeds."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    env: EnvConfig = Field(..., description="Environment configuration")
    variant: str = Field(..., description="Agent preset name, 'oracle' or 'random'")
    overrides: dict[str, Any] = Field(
        default_factory=dict, description="AgentConfig fields replacing preset values"
    )
    seeds: list[int] = Field(..., min_length=1, description="Distinct root seeds")
    episodes: int = Field(..., ge=1, description="Episodes K per run")
    track_regret: bool = Field(False, description="Evaluate the greedy snapshot every episode")

    @field_validator("variant")
    @classmethod
    def _check_variant(cls, value: str) -> str:
        if not is_reference(value):
            Variant(value)
        return value

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, value: list[int]) -> list[int]:
        if len(set(value)) != len(value):
            raise ValueError(f"Seeds must be distinct, got {value}")
        if any(seed < 0 for seed in value):
            raise ValueError("Seeds must be non-negative")
        return value

    @model_validator(mode="after")
    def _check_overrides(self) -> "RunSpec":
        if self.overrides and is_reference(self.variant):
            raise ValueError(f"Reference policy {self.variant!r} takes no agent overrides")
        if not is_reference(self.variant):
            self.agent_config()
        return self

    @property
    def is_reference(self) -> bool:
        return is_reference(self.variant)

    def agent_config(self) -> AgentConfig:
        """Resolved AgentConfig of the variant on this spec's environment."""
        config = preset_config(self.variant, **self.overrides)
        return config.resolve(self.env.num_states, self.env.horizon)


class RunResult(BaseModel):
    """Per-episode returns of one seeded run."""

    model_config = ConfigDict(extra="forbid")

    variant: str
    env: str
    seed: int
    horizon: int = Field(..., ge=1)
    returns: list[float] = Field(..., min_length=1, description="Realized return per episode")
    cumulative: list[float] = Field(..., description="Running sum of returns")
    policy_values: Optional[list[float]] = Field(
        None, description="Exact expected return of the greedy snapshot per episode"
    )
    metadata: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunResult":
        if list(itertools.accumulate(self.returns)) != self.cumulative:
            raise ValueError("cumulative must be the running sum of returns")
        if any(r < 0.0 or r > self.horizon for r in self.returns):
            raise ValueError(f"Episode returns must lie in [0, {self.horizon}]")
        if self.policy_values is not None and len(self.policy_values) != len(self.returns):
            raise ValueError("policy_values must hold one value per episode")
        return self

    @classmethod
    def from_returns(
        cls,
        variant: str,
        env: str,
        seed: int,
        horizon: int,
        returns: Sequence[float],
        policy_values: Optional[Sequence[float]] = None,
        metadata: Optional[dict[str, Any]] = None,
    ) -> "RunResult":
        returns = [float(r) for r in returns]
        return cls(
            variant=variant,
            env=env,
            seed=seed,
            horizon=horizon,
            returns=returns,
            cumulative=list(itertools.accumulate(returns)),
            policy_values=None if policy_values is None else [float(v) for v in policy_values],
            metadata=metadata or {},
        )

    @property
    def episodes(self) -> int:
        return len(self.returns)


class Summary(BaseModel):
    """Scaled mean cumulative reward of one variant with its learning curve."""

    model_config = ConfigDict(extra="forbid")

    variant: str
    env: str
    n_seeds: int = Field(..., ge=1)
    episodes: int = Field(..., ge=1)
    scaled_mean: float = Field(..., description="Scaled mean cumulative reward (%)")
    ci_half_width: float = Field(
        ..., description="95% CI half-width (%); NaN when there is a single seed"
    )
    oracle_return: float = Field(..., description="Expected cumulative oracle return over K")
    random_return: float = Field(..., description="Expected cumulative random return over K")
    curve_mean: list[float] = Field(..., description="Scaled cumulative reward per episode")
    curve_half_width: list[float] = Field(..., description="CI half-width per episode")
    regret_mean: Optional[float] = Field(
        None, description="Mean cumulative regret of greedy snapshots, when tracked"
    )
