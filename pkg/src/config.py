"""
Configuration Module for Multiple Laguerre Verification

Settings are layered as defaults <- optional JSON file <- MLL_* environment
variables; command-line flags are applied last by the runner. ``RunConfig``
validates one subcommand's parameters before dispatch.
"""

import json
import logging
import os
from fractions import Fraction
from typing import Any, Dict, List, Optional

import psutil
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .laguerre import MultiIndex

logger = logging.getLogger(__name__)


def available_parallelism() -> int:
    return psutil.cpu_count(logical=True) or os.cpu_count() or 1


class Settings(BaseSettings):
    """Process-wide defaults, overridable through MLL_* environment variables"""

    model_config = SettingsConfigDict(env_prefix="MLL_", extra="ignore")

    workers: Optional[int] = Field(default=None, ge=1)
    log_level: str = "WARNING"
    enumeration_vertex_cap: int = Field(default=10, ge=0)
    enumeration_digraph_cap: int = Field(default=10_000_000, ge=1)
    budget_seconds: Optional[float] = Field(default=None, gt=0)
    memory_limit_mb: Optional[float] = Field(default=None, gt=0)
    rtol: float = Field(default=1e-14, gt=0)
    quad_order: int = Field(default=40, ge=1)
    laguerre_cache_size: int = Field(default=4096, ge=1)

    @property
    def effective_workers(self) -> int:
        return self.workers or available_parallelism()


def load_settings(config_path: Optional[str] = None) -> Settings:
    """
    Build Settings from defaults, an optional JSON file and the environment.

    Args:
        config_path (str): path to a JSON object of setting overrides

    Returns:
        Settings: merged settings (environment wins over the file)

    Raises:
        FileNotFoundError: if config_path does not exist
    """
    file_values: Dict[str, Any] = {}
    if config_path:
        try:
            with open(config_path, "r") as f:
                file_values = json.load(f)
            logger.info(f"Loaded configuration from {config_path}")
        except FileNotFoundError:
            logger.error(f"Configuration file not found: {config_path}")
            raise
    from_env = Settings()
    merged = {**file_values, **from_env.model_dump(include=from_env.model_fields_set)}
    return Settings(**merged)


def _split(value: Any) -> Any:
    if isinstance(value, str):
        return [piece.strip() for piece in value.split(",") if piece.strip()]
    return value


class RunConfig(BaseModel):
    """Parameters of one CLI run, validated against the target routine's preconditions"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    subcommand: str
    r: Optional[int] = Field(default=None, ge=1)
    r_max: Optional[int] = Field(default=None, ge=1)
    n: Optional[List[int]] = None
    k: Optional[List[int]] = None
    N: Optional[int] = Field(default=None, ge=1)
    max_minor_order: Optional[int] = Field(default=None, ge=1)
    max_total: Optional[int] = Field(default=None, ge=0)
    max_n: Optional[int] = Field(default=None, ge=0)
    alpha: Optional[List[Fraction]] = None
    x: Optional[List[Fraction]] = None
    quad_order: int = Field(default=40, ge=1)
    rtol: float = Field(default=1e-14, gt=0)
    tolerance: Optional[float] = Field(default=None, gt=0)
    workers: int = Field(default=1, ge=1)
    format: str = "text"
    budget_seconds: Optional[float] = Field(default=None, gt=0)
    memory_limit_mb: Optional[float] = Field(default=None, gt=0)
    out: Optional[str] = None

    @field_validator("n", "k", mode="before")
    @classmethod
    def _parse_int_list(cls, value: Any) -> Any:
        value = _split(value)
        if value is None:
            return value
        return [int(v) for v in value]

    @field_validator("alpha", "x", mode="before")
    @classmethod
    def _parse_exact_list(cls, value: Any) -> Any:
        value = _split(value)
        if value is None:
            return value
        if not isinstance(value, (list, tuple)):
            value = [value]
        # decimal strings become exact rationals (0.7 -> 7/10)
        return [Fraction(str(v)) for v in value]

    @field_validator("format")
    @classmethod
    def _check_format(cls, value: str) -> str:
        if value not in ("json", "text"):
            raise ValueError(f"format must be 'json' or 'text', got {value!r}")
        return value

    @model_validator(mode="after")
    def _check_shapes(self) -> "RunConfig":
        if self.n is not None:
            if any(v < 0 for v in self.n):
                raise ValueError("n must have nonnegative parts")
            if self.r is not None and len(self.n) != self.r:
                raise ValueError(f"n has {len(self.n)} parts but r = {self.r}")
        if self.k is not None:
            if any(v < 0 for v in self.k) or not any(self.k):
                raise ValueError("k must be a nonzero vector of nonnegative integers")
            if self.r is not None and len(self.k) != self.r:
                raise ValueError(f"k has {len(self.k)} parts but r = {self.r}")
        if self.alpha is not None:
            if any(a <= -1 for a in self.alpha):
                raise ValueError("every alpha_i must exceed -1")
            if self.r is not None and len(self.alpha) != self.r:
                raise ValueError(f"alpha has {len(self.alpha)} values but r = {self.r}")
        if self.x is not None and any(v < 0 for v in self.x):
            raise ValueError("x must be nonnegative")
        if self.N is not None and self.max_minor_order is not None and self.max_minor_order > self.N:
            raise ValueError("max_minor_order cannot exceed N")
        return self

    def multi_index(self, name: str = "n") -> MultiIndex:
        values = getattr(self, name)
        if values is None:
            raise ValueError(f"--{name} is required for {self.subcommand}")
        return MultiIndex(tuple(values))

    def arities(self) -> List[int]:
        """Arities to sweep: exactly --r, or 1..--r-max."""
        if self.r is not None:
            return [self.r]
        if self.r_max is not None:
            return list(range(1, self.r_max + 1))
        raise ValueError(f"--r or --r-max is required for {self.subcommand}")
