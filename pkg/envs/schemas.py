"""Pydantic configuration schemas for the benchmark environments."""

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class BdclConfig(BaseModel):
    """Configuration of the Bidirectional Diabolical Combination Lock."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: Literal["bdcl"] = Field("bdcl", description="Environment identifier")
    num_actions: int = Field(5, ge=2, description="Number of actions A")
    horizon: int = Field(5, ge=2, description="Episode length H")
    fail_probability: float = Field(
        0.02, ge=0.0, lt=1.0, description="Probability that a step is overridden to Sink"
    )
    lock1_reward: float = Field(0.25, description="Terminal reward for occupying Lock 1 at H")
    lock2_reward: float = Field(1.0, description="Terminal reward for occupying Lock 2 at H")
    sink_reward: Optional[float] = Field(
        None, ge=0.0, description="Per-step Sink reward; defaults to 1/(8H)"
    )
    structure_seed: int = Field(0, ge=0, description="Seed for sampling progress actions")

    @model_validator(mode="after")
    def _check_reward_ordering(self) -> "BdclConfig":
        sink_total = self.resolved_sink_reward * self.horizon
        if not sink_total <= 0.125 < self.lock1_reward < self.lock2_reward <= 1.0:
            raise ValueError(
                f"BDCL rewards must satisfy r_sink*H <= 1/8 < r_l1 < r_l2 <= 1, got "
                f"r_sink*H={sink_total}, r_l1={self.lock1_reward}, r_l2={self.lock2_reward}"
            )
        return self

    @property
    def resolved_sink_reward(self) -> float:
        if self.sink_reward is None:
            return 1.0 / (8 * self.horizon)
        return self.sink_reward

    @property
    def num_states(self) -> int:
        return 4


class ChainConfig(BaseModel):
    """Configuration of the chain MDP."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: Literal["chain"] = Field("chain", description="Environment identifier")
    num_states: int = Field(20, ge=2, description="Number of chain states S")
    horizon: int = Field(50, ge=1, description="Episode length H")
    success_probability: float = Field(
        0.9, gt=0.5, le=1.0, description="Probability that the intended move succeeds"
    )
    start_reward: float = Field(0.05, ge=0.0, le=1.0, description="Per-step reward at s_1")
    end_reward: float = Field(1.0, ge=0.0, le=1.0, description="Per-step reward at s_S")

    @property
    def num_actions(self) -> int:
        return 2


EnvConfig = Annotated[Union[BdclConfig, ChainConfig], Field(discriminator="name")]
