#!/usr/bin/env python3
"""
SmoothForge configuration
Caps, tolerances and the caller-supplied stand-ins for effective constants
"""

import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from smoothforge.errors import ConfigError

CACHE_DIR_ENV = "SMOOTHFORGE_CACHE_DIR"

DEFAULT_CONSTANTS = {
    "C_cep": 1.0,
    "C_thm5": 1.0,
    "C2_lemma7": 2.0,
}


class Config(BaseModel):
    """Run configuration; every numeric value must be positive"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    rho_step: Fraction = Fraction(1, 1024)
    rho_umax: float = 64.0
    xi_tolerance: float = 1e-12
    sieve_limit: int = 10_000_000
    enumeration_cap: int = 10_000_000
    bucket_cap: int = 10_000_000
    funceq_tolerance: float = 1e-9
    delta_grid: Fraction = Fraction(1, 32)
    lemma6_box: Tuple[int, int] = (-5, 5)
    constants: Dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_CONSTANTS))
    seed: int = 20240601
    cache_dir: Optional[Path] = None

    @field_validator("rho_step", "delta_grid", mode="before")
    @classmethod
    def _parse_fraction(cls, value: Any) -> Fraction:
        try:
            frac = Fraction(str(value)) if not isinstance(value, Fraction) else value
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
        if frac <= 0:
            raise ValueError("must be positive")
        return frac

    @field_validator("rho_step")
    @classmethod
    def _check_step(cls, value: Fraction) -> Fraction:
        if value.numerator != 1 or value.denominator < 64:
            raise ValueError("rho_step must be 1/N with N >= 64")
        return value

    @field_validator("rho_umax", "xi_tolerance", "funceq_tolerance")
    @classmethod
    def _check_positive_real(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("must be positive")
        return value

    @field_validator("sieve_limit", "enumeration_cap", "bucket_cap")
    @classmethod
    def _check_positive_int(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("constants")
    @classmethod
    def _merge_constants(cls, value: Dict[str, float]) -> Dict[str, float]:
        unknown = set(value) - set(DEFAULT_CONSTANTS)
        if unknown:
            raise ValueError(f"unknown constants: {sorted(unknown)}")
        merged = dict(DEFAULT_CONSTANTS)
        merged.update({key: float(val) for key, val in value.items()})
        return merged

    def constant(self, name: str) -> float:
        """Caller-supplied constant by name"""
        return self.constants[name]


def _coerce_file_values(raw: Dict[str, Optional[str]]) -> Dict[str, Any]:
    """Turn key=value strings into Config keyword arguments"""
    values: Dict[str, Any] = {}
    constants: Dict[str, float] = {}
    for key, text in raw.items():
        if text is None:
            raise ConfigError(f"config key {key!r} has no value")
        try:
            if key in DEFAULT_CONSTANTS:
                constants[key] = float(text)
            elif key == "lemma6_box":
                low, high = (int(part) for part in text.split(","))
                values[key] = (low, high)
            elif key in ("sieve_limit", "enumeration_cap", "bucket_cap", "seed"):
                values[key] = int(float(text))
            elif key in ("rho_umax", "xi_tolerance", "funceq_tolerance"):
                values[key] = float(text)
            else:
                values[key] = text
        except ValueError as exc:
            raise ConfigError(f"config key {key!r}: cannot parse {text!r}") from exc
    if constants:
        values["constants"] = constants
    return values


def load_config(path: Optional[Path] = None, **overrides: Any) -> Config:
    """Build a Config from an optional key=value file, the environment and overrides"""

    values: Dict[str, Any] = {}
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        values.update(_coerce_file_values(dotenv_values(path)))

    env_cache = os.environ.get(CACHE_DIR_ENV)
    if env_cache:
        values["cache_dir"] = Path(env_cache)

    for key, value in overrides.items():
        if value is None:
            continue
        if key == "constants":
            merged = dict(values.get("constants", {}))
            merged.update(value)
            values["constants"] = merged
        else:
            values[key] = value

    try:
        return Config(**values)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
