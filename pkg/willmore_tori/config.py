"""
Run configuration for the command-line tool.

Settings come from three layers: built-in defaults, an optional flat KEY=value
file (see config_template.txt) and command-line flags, later layers winning.
The file is parsed with python-dotenv without touching the process environment.
"""

import logging
from pathlib import Path
from typing import Any, Literal, Mapping

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

logger = logging.getLogger(__name__)


class Tolerances(BaseModel):
    """Pass/fail thresholds of the commands, before scaling by tol_scale."""

    model_config = ConfigDict(frozen=True)

    clifford_energy: float = 1e-6
    residual: float = 1e-8
    schrodinger: float = 1e-6
    closure: float = 1e-7
    identity: float = 1e-7
    drift: float = 1e-6
    dirac: float = 1e-5
    speed: float = 1e-2
    energy_routes: float = 1e-6
    delta0_agreement: float = 1e-8

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(**{name: value * factor for name, value in self.model_dump().items()})


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = 512
    ny: int = 64
    dt: float | None = None
    t_final: float = Field(default=1.0, ge=0.0)
    mode: Literal["integrating_factor", "explicit"] = "integrating_factor"
    alpha: float | None = None
    alpha_min: float = 1e-4
    alpha_max: float = 1e2
    alpha_count: int = Field(default=50, ge=1)
    f_grid: int = Field(default=10_000, ge=2)
    init: str = "clifford"
    spinor: bool = True
    out_mesh: Path | None = None
    out_csv: Path | None = None
    tol_scale: float = Field(default=1.0, gt=0.0)
    seed: int = 0

    @field_validator("n")
    @classmethod
    def _check_n(cls, n: int) -> int:
        if n < 16 or n % 2:
            raise ValueError(f"n must be even and >= 16, got {n}")
        return n

    @field_validator("ny")
    @classmethod
    def _check_ny(cls, ny: int) -> int:
        if ny < 8:
            raise ValueError(f"ny must be >= 8, got {ny}")
        return ny

    @field_validator("dt")
    @classmethod
    def _check_dt(cls, dt: float | None) -> float | None:
        if dt is not None and dt <= 0.0:
            raise ValueError(f"dt must be positive, got {dt}")
        return dt

    @model_validator(mode="after")
    def _check_alpha_range(self):
        if self.alpha_min >= self.alpha_max:
            raise ValueError("alpha_min must be smaller than alpha_max")
        return self

    def tolerances(self) -> Tolerances:
        return Tolerances().scaled(self.tol_scale)


def _normalise_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat KEY=value pairs; keys are case-insensitive and may use - or _."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file {path} not found")
    values = {_normalise_key(key): value for key, value in dotenv_values(path).items() if value not in (None, "")}
    logger.debug("read %d settings from %s", len(values), path)
    return values


def load_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Defaults < config file < overrides (flags); overrides set to None are ignored."""
    settings: dict[str, Any] = {}
    if path is not None:
        settings.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            settings[_normalise_key(key)] = value
    return RunConfig(**settings)
