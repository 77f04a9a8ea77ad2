"""
Base class and registry for verification checks.
"""
import logging
from abc import ABC, abstractmethod
from typing import ClassVar, Dict, List, Optional, Type, TypeAlias

import numpy as np
from pydantic import BaseModel

from ..utils.replicas import replica_rng
from ..utils.stats import MCReport

logger = logging.getLogger(__name__)

CheckType: TypeAlias = Type["BaseCheck"]

# Global registry for all checks, keyed by check name
CHECK_REGISTRY: Dict[str, CheckType] = {}


def register_check(cls: CheckType) -> CheckType:
    """
    Decorator to register a check class.

    Args:
        cls: The check class to register

    Returns:
        The same class, for use as a decorator

    Raises:
        ValueError: If the check is missing its configuration or reuses a name
    """
    if not hasattr(cls, "config"):
        raise ValueError(
            f"Check class {cls.__name__} is missing required 'config' class variable"
        )

    if not getattr(cls.config, "name", None):
        raise ValueError(
            f"Check class {cls.__name__} config is missing required 'name' field"
        )

    existing = CHECK_REGISTRY.get(cls.config.name)
    if existing is not None and existing.__qualname__ != cls.__qualname__:
        raise ValueError(f"Duplicate check name {cls.config.name!r}")

    CHECK_REGISTRY[cls.config.name] = cls
    return cls


__all__ = ["BaseCheck", "CheckConfig", "CHECK_REGISTRY", "register_check"]


class CheckConfig(BaseModel):
    """Registry metadata of a check."""

    name: str
    description: str
    criterion: str


class BaseCheck(ABC):
    """
    Abstract base class for verification checks.

    Subclasses set `config`, define a nested `Settings` model with their
    desk-scale parameters and implement `run`.
    """

    config: ClassVar[CheckConfig]

    class Settings(BaseModel):
        """Settings shared by every check (none by default)."""

    def __init__(self, settings: Optional[BaseModel] = None):
        self.settings = settings if settings is not None else self.Settings()

    @abstractmethod
    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        """
        Execute the check.

        Args:
            seed: Base seed; every report is a function of it alone.
            threads: Worker processes for per-replica work.

        Returns:
            One MCReport per compared quantity.
        """

    @staticmethod
    def stream(seed: int, index: int) -> np.random.Generator:
        """Independent generator for the index-th sub-experiment."""
        return replica_rng(seed, index)

    @staticmethod
    def substream_seed(seed: int, index: int) -> int:
        """Derived base seed for run_replicas fan-out inside a check."""
        return int(np.random.SeedSequence(entropy=seed, spawn_key=(1_000_000 + index,)).generate_state(1)[0])

    def get_help(self) -> str:
        return self.config.description
