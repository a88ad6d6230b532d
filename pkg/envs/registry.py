"""Environment construction from configuration."""

from typing import Union

from envs.base import EpisodicEnv
from envs.bdcl import BdclEnv
from envs.chain import ChainEnv
from envs.schemas import BdclConfig, ChainConfig


def make_env(config: Union[BdclConfig, ChainConfig]) -> EpisodicEnv:
    """
    Build the environment described by ``config``.

    Args:
        config: BDCL or chain configuration

    Returns:
        Environment instance
    """
    if isinstance(config, BdclConfig):
        return BdclEnv(config)
    return ChainEnv(config)
