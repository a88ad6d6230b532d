"""YAML experiment configuration file."""

import logging
from pathlib import Path
from typing import Any, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from envs.schemas import BdclConfig, ChainConfig
from errors import ConfigError

logger = logging.getLogger(__name__)

# Episodes K and seed count per environment when the file leaves them out
DEFAULT_EPISODES: dict[str, int] = {"bdcl": 500, "chain": 1200}
DEFAULT_SEEDS: dict[str, int] = {"bdcl": 20, "chain": 5}


ENV_CONFIG_CLASSES: dict[str, type[Union[BdclConfig, ChainConfig]]] = {
    "bdcl": BdclConfig,
    "chain": ChainConfig,
}


def build_env_config(name: str, parameters: dict[str, Any]) -> Union[BdclConfig, ChainConfig]:
    """
    Validated environment config from a name and its parameters.

    Raises:
        ConfigError: If the environment name is unknown
        pydantic.ValidationError: If a parameter is invalid
    """
    if name not in ENV_CONFIG_CLASSES:
        known = ", ".join(ENV_CONFIG_CLASSES)
        raise ConfigError(f"Unknown environment {name!r} (known: {known})")
    return ENV_CONFIG_CLASSES[name](**{**parameters, "name": name})


class EnvSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Literal["bdcl", "chain"] = "bdcl"
    parameters: dict[str, Any] = Field(default_factory=dict)


class AgentSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: str = "reversedq"
    overrides: dict[str, Any] = Field(default_factory=dict)


class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seeds: Optional[Union[int, list[int]]] = Field(
        None, description="Seed count (consecutive from seed_base) or explicit list"
    )
    episodes: Optional[int] = Field(None, ge=1)
    seed_base: int = Field(0, ge=0)
    output_dir: Optional[str] = None
    track_regret: bool = False

    @field_validator("seeds")
    @classmethod
    def _check_seeds(
        cls, value: Optional[Union[int, list[int]]]
    ) -> Optional[Union[int, list[int]]]:
        if isinstance(value, int) and value < 1:
            raise ValueError(f"Seed count must be positive, got {value}")
        if isinstance(value, list) and not value:
            raise ValueError("Seed list must not be empty")
        return value


class ExperimentConfigFile(BaseModel):
    """Experiment document with env, agent and run sections."""

    model_config = ConfigDict(extra="forbid")

    env: EnvSection = Field(default_factory=EnvSection)
    agent: AgentSection = Field(default_factory=AgentSection)
    run: RunSection = Field(default_factory=RunSection)

    def env_config(self) -> Union[BdclConfig, ChainConfig]:
        """Validated environment config of the ``env`` section."""
        return build_env_config(self.env.name, self.env.parameters)

    @property
    def episodes(self) -> int:
        return self.run.episodes or DEFAULT_EPISODES[self.env.name]

    @property
    def seeds(self) -> list[int]:
        """Explicit seed list, or ``seed_base, seed_base + 1, ...`` for a count."""
        seeds = self.run.seeds if self.run.seeds is not None else DEFAULT_SEEDS[self.env.name]
        if isinstance(seeds, list):
            return list(seeds)
        return list(range(self.run.seed_base, self.run.seed_base + seeds))


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfigFile:
    """
    Load an experiment file, or the defaults when no path is given.

    Args:
        path: YAML file path

    Returns:
        Validated ExperimentConfigFile

    Raises:
        ConfigError: If the file is missing, unparsable or invalid
    """
    if path is None:
        return ExperimentConfigFile()
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a mapping at the top level")
    try:
        config = ExperimentConfigFile.model_validate(data)
        config.env_config()
    except ValidationError as e:
        raise ConfigError(f"Invalid config file {path}: {e}") from e
    logger.debug(f"Loaded experiment config from {path}")
    return config
