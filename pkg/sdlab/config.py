from dataclasses import dataclass
import os
from pathlib import Path
from typing import List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, model_validator


load_dotenv()


@dataclass(frozen=True)
class LoggingConfig:
    level: str = "WARNING"
    include_library_logs: bool = False
    file: Optional[str] = None


@dataclass(frozen=True)
class ToleranceConfig:
    affine: float = 1e-9
    lp: float = 1e-10
    degeneracy_rcond: float = 1e-12
    check: float = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    restarts: int = 20
    trials: int = 100
    climb_steps: int = 400


@dataclass(frozen=True)
class Settings:
    logging: LoggingConfig
    tolerances: ToleranceConfig
    search: SearchConfig


def _get_float(name: str, default: float) -> float:
    value = os.getenv(name)
    if value is None or value == "":
        return default
    try:
        return float(value)
    except ValueError as exc:
        raise RuntimeError(f"Environment variable {name} is not a number: {value!r}") from exc


def _get_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError as exc:
        raise RuntimeError(f"Environment variable {name} is not an integer: {value!r}") from exc


def default_seed(fallback: Optional[int] = None) -> int:
    return _get_int("SDLAB_SEED", SearchConfig.seed if fallback is None else fallback)


def load_settings() -> Settings:
    log_level = os.getenv("SDLAB_LOG_LEVEL", "WARNING")
    include_library_logs = os.getenv("SDLAB_LOG_INCLUDE_LIBS", "0") in {"1", "true", "TRUE"}
    return Settings(
        logging=LoggingConfig(
            level=log_level,
            include_library_logs=include_library_logs,
            file=os.getenv("SDLAB_LOG_FILE") or None,
        ),
        tolerances=ToleranceConfig(
            affine=_get_float("SDLAB_TOL_AFFINE", ToleranceConfig.affine),
            lp=_get_float("SDLAB_TOL_LP", ToleranceConfig.lp),
            degeneracy_rcond=_get_float("SDLAB_TOL_RCOND", ToleranceConfig.degeneracy_rcond),
            check=_get_float("SDLAB_TOL_CHECK", ToleranceConfig.check),
        ),
        search=SearchConfig(seed=default_seed()),
    )


class RunConfig(BaseModel):
    """Validated parameters of one `sdlab` invocation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Literal[
        "bounds",
        "circumsphere",
        "intersect",
        "construct",
        "certify-1d",
        "distortion",
        "verify",
        "search",
    ]
    mode: Optional[Literal["minimax", "adversarial", "granas"]] = None
    n: Optional[int] = Field(default=None, ge=1)
    m: Optional[int] = Field(default=None, ge=1)
    r: float = Field(default=1.0, gt=0)
    L: float = Field(default=1.0, gt=0)
    N: Optional[int] = Field(default=None, ge=1)
    eps: Optional[float] = Field(default=None, gt=0)
    n_max: int = Field(default=10, ge=1)
    trials: int = Field(default=SearchConfig.trials, ge=1)
    climb_steps: int = Field(default=SearchConfig.climb_steps, ge=1)
    restarts: int = Field(default=SearchConfig.restarts, ge=1)
    iterations: int = Field(default=300, ge=1)
    step: Optional[float] = Field(default=None, gt=0)
    init: Optional[str] = None
    workers: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    scale: Literal["quick", "full"] = "full"
    suites: Optional[List[str]] = None
    flavor: Literal["equidistant", "min_enclosing", "both"] = "both"
    reduce: bool = False
    map: Literal["projection", "example", "constant"] = "projection"
    values: Optional[Path] = None
    relation: Optional[Path] = None
    points: Optional[Path] = None
    out: Optional[Path] = None

    @model_validator(mode="after")
    def _check_dimensions(self) -> "RunConfig":
        if self.command == "search" and self.mode == "minimax":
            n = self.n or 1
            m = self.m or n
            if m > n:
                raise ValueError(f"target dimension m={m} must not exceed n={n}")
            N = self.N if self.N is not None else (201 if n == 1 else 500)
            if N < 3:
                raise ValueError(f"N={N} must be at least 3")
            if n == 1 and N % 2 == 0:
                raise ValueError(f"N={N} must be odd when n=1")
        if self.command == "search" and self.mode == "granas" and self.map == "example" and (self.n or 1) != 1:
            raise ValueError("the example map lives on the circle (n=1)")
        return self
