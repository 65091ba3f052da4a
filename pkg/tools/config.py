# parallel-cfs/tools/config.py

import os
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from tools.errors import ConfigError

load_dotenv()  # Load .env variables

Layout = Literal["sequential", "horizontal", "vertical"]
Backend = Literal["threads", "processes"]
Assignment = Literal["contiguous", "round_robin"]


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


def _env_str(name: str, default: str) -> str:
    raw = os.getenv(name)
    return raw.strip().lower() if raw and raw.strip() else default


class EngineConfig(BaseModel):
    """How correlations are computed: which layout, how many partitions and workers."""

    model_config = ConfigDict(frozen=True)

    layout: Layout = "horizontal"
    partitions: Optional[int] = Field(default=None, ge=1)
    workers: int = Field(default=1, ge=1)
    backend: Backend = "threads"
    assignment: Assignment = "contiguous"

    @classmethod
    def from_env(cls, **overrides) -> "EngineConfig":
        """
        Build a config from CFS_* environment variables (a .env file is honoured).
        Keyword overrides that are not None win over the environment.
        """
        values = {
            "layout": _env_str("CFS_ENGINE", "horizontal"),
            "partitions": _env_int("CFS_PARTITIONS", None),
            "workers": _env_int("CFS_WORKERS", os.cpu_count() or 1),
            "backend": _env_str("CFS_BACKEND", "threads"),
            "assignment": _env_str("CFS_ASSIGNMENT", "contiguous"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(_describe(e)) from None

    def resolve(self, m: int, n: int) -> "EngineConfig":
        """Fill the layout default for partitions and check it against the data shape."""
        partitions = self.partitions
        if partitions is None:
            if self.layout == "vertical":
                partitions = m
            elif self.layout == "horizontal":
                partitions = min(self.workers, n)
            else:
                partitions = 1
        if self.layout == "vertical" and partitions > m:
            raise ConfigError(f"vertical partitions ({partitions}) cannot exceed the feature count ({m})")
        if self.layout == "horizontal" and partitions > n:
            raise ConfigError(f"horizontal partitions ({partitions}) cannot exceed the row count ({n})")
        return self.model_copy(update={"partitions": partitions})


class SearchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_fails: int = Field(default=5, ge=1)
    queue_capacity: int = Field(default=5, ge=1)
    locally_predictive: bool = True

    @classmethod
    def from_env(cls, **overrides) -> "SearchConfig":
        values = {"max_fails": _env_int("CFS_MAX_FAILS", 5)}
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(_describe(e)) from None


def log_level() -> str:
    return os.getenv("CFS_LOG_LEVEL", "WARNING").upper()


def _describe(err: ValidationError) -> str:
    parts = []
    for item in err.errors():
        where = ".".join(str(p) for p in item.get("loc", ()))
        parts.append(f"{where}: {item.get('msg')}")
    return "Invalid configuration: " + "; ".join(parts)
