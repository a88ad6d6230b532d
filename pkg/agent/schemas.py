"""Agent hyperparameters, variant flags and named presets."""

import math
from enum import Enum
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from errors import ConfigError


class PassDirection(str, Enum):
    """Order in which an episode's transitions are processed."""

    BACKWARD = "backward"
    FORWARD = "forward"


class UpdateTiming(str, Enum):
    """When the explore value tables are refreshed."""

    PER_STEP = "per_step"
    STAGED = "staged"


class ExploreReset(str, Enum):
    """Whether the explore ensemble restarts at stage boundaries."""

    NEVER = "never"
    STAGED = "staged"


class ExploitMix(str, Enum):
    """Coefficient applied to the exploit ensemble in the policy update."""

    ETA = "eta"
    ONE_MINUS_ETA = "one_minus_eta"


class ExploreReadAction(str, Enum):
    """Action at which the explore ensemble is read when refreshing the explore Q-table."""

    GREEDY = "a_temp"
    TAKEN = "a_i"


class AgentConfig(BaseModel):
    """
    Hyperparameters and variant flags of the posterior-sampling learner.

    ``prior_transitions``, ``mixing_rate`` and ``stage_growth`` default to values that
    depend on the environment size; ``resolve`` fills them in.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    ensemble_size: int = Field(10, ge=1, description="Ensemble size J")
    inflation: float = Field(1.0, gt=0.0, description="Inflation coefficient kappa")
    prior_transitions: Optional[float] = Field(
        None, gt=0.0, description="Number of prior transitions n0; defaults to 1/S"
    )
    mixing_rate: Optional[float] = Field(
        None, description="Mixing rate eta in (0, 1/2]; defaults to 1/(sqrt(H) + 1)"
    )
    pass_direction: PassDirection = PassDirection.BACKWARD
    explore_update_timing: UpdateTiming = UpdateTiming.PER_STEP
    explore_reset: ExploreReset = ExploreReset.NEVER
    init_scale: Literal[1, 2] = Field(1, description="V0_h = init_scale * (H - h + 1)")
    exploit_mix: ExploitMix = ExploitMix.ETA
    stage_growth: Optional[float] = Field(
        None, gt=1.0, description="Geometric stage growth rho; defaults to 1 + 1/H"
    )
    explore_read_at: ExploreReadAction = ExploreReadAction.GREEDY

    @field_validator("mixing_rate")
    @classmethod
    def _check_mixing_rate(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 < value <= 0.5:
            raise ValueError(f"mixing_rate must lie in (0, 0.5], got {value}")
        return value

    def resolve(self, num_states: int, horizon: int) -> "AgentConfig":
        """
        Fill size-dependent defaults for an environment.

        Args:
            num_states: Number of states S
            horizon: Episode length H

        Returns:
            Config with ``prior_transitions``, ``mixing_rate`` and ``stage_growth`` set
        """
        values = self.model_dump()
        if values["prior_transitions"] is None:
            values["prior_transitions"] = 1.0 / num_states
        if values["mixing_rate"] is None:
            values["mixing_rate"] = 1.0 / (math.sqrt(horizon) + 1.0)
        if values["stage_growth"] is None:
            values["stage_growth"] = 1.0 + 1.0 / horizon
        return AgentConfig(**values)

    @property
    def is_resolved(self) -> bool:
        return None not in (self.prior_transitions, self.mixing_rate, self.stage_growth)

    @property
    def exploit_coefficient(self) -> float:
        if self.mixing_rate is None:
            raise ConfigError("mixing_rate is unresolved; call resolve() first")
        if self.exploit_mix == ExploitMix.ETA:
            return self.mixing_rate
        return 1.0 - self.mixing_rate


class Variant(str, Enum):
    """Named agent presets."""

    REVERSEDQ = "reversedq"
    RANDOMIZEDQ = "randomizedq"
    RANDOMIZEDQ_BACKWARD = "randomizedq-backward"
    RANDOMIZEDQ_UPDATE = "randomizedq-update"
    RANDOMIZEDQ_INIT = "randomizedq-init"


class ReferencePolicy(str, Enum):
    """Fixed policies used as the scaling references."""

    ORACLE = "oracle"
    RANDOM = "random"


_REVERSEDQ_FLAGS: dict[str, Any] = {
    "pass_direction": PassDirection.BACKWARD,
    "explore_update_timing": UpdateTiming.PER_STEP,
    "explore_reset": ExploreReset.NEVER,
    "init_scale": 1,
    "exploit_mix": ExploitMix.ETA,
}

_RANDOMIZEDQ_FLAGS: dict[str, Any] = {
    "pass_direction": PassDirection.FORWARD,
    "explore_update_timing": UpdateTiming.STAGED,
    "explore_reset": ExploreReset.STAGED,
    "init_scale": 2,
    "exploit_mix": ExploitMix.ONE_MINUS_ETA,
}

PRESET_FLAGS: dict[Variant, dict[str, Any]] = {
    Variant.REVERSEDQ: _REVERSEDQ_FLAGS,
    Variant.RANDOMIZEDQ: _RANDOMIZEDQ_FLAGS,
    Variant.RANDOMIZEDQ_BACKWARD: {**_RANDOMIZEDQ_FLAGS, "pass_direction": PassDirection.BACKWARD},
    Variant.RANDOMIZEDQ_UPDATE: {
        **_RANDOMIZEDQ_FLAGS,
        "explore_update_timing": UpdateTiming.PER_STEP,
        "explore_reset": ExploreReset.NEVER,
        "exploit_mix": ExploitMix.ETA,
    },
    Variant.RANDOMIZEDQ_INIT: {**_RANDOMIZEDQ_FLAGS, "init_scale": 1},
}

# Order used by `--algo all`, matching the table layout
ALL_VARIANTS: tuple[Variant, ...] = (
    Variant.RANDOMIZEDQ,
    Variant.RANDOMIZEDQ_BACKWARD,
    Variant.RANDOMIZEDQ_INIT,
    Variant.RANDOMIZEDQ_UPDATE,
    Variant.REVERSEDQ,
)

DISPLAY_NAMES: dict[str, str] = {
    Variant.REVERSEDQ.value: "ReversedQ",
    Variant.RANDOMIZEDQ.value: "RandomizedQ",
    Variant.RANDOMIZEDQ_BACKWARD.value: "RandomizedQ-Backward",
    Variant.RANDOMIZEDQ_UPDATE.value: "RandomizedQ-Update",
    Variant.RANDOMIZEDQ_INIT.value: "RandomizedQ-Init",
    ReferencePolicy.ORACLE.value: "Oracle",
    ReferencePolicy.RANDOM.value: "Random",
}


def preset_config(variant: Variant | str, **overrides: Any) -> AgentConfig:
    """
    Build the AgentConfig of a named preset with optional overrides.

    Args:
        variant: Preset name or Variant member
        **overrides: AgentConfig fields replacing preset values

    Returns:
        Validated AgentConfig

    Raises:
        ConfigError: If the preset name is unknown
        pydantic.ValidationError: If an override is invalid
    """
    try:
        variant = Variant(variant)
    except ValueError as e:
        known = ", ".join(v.value for v in Variant)
        raise ConfigError(f"Unknown agent preset {variant!r} (known: {known})") from e
    return AgentConfig(**{**PRESET_FLAGS[variant], **overrides})


def is_reference(name: str) -> bool:
    """True for the oracle/random reference policy names."""
    return name in {policy.value for policy in ReferencePolicy}
