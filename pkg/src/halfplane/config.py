"""Experiment configuration and its flat ``key = value`` file format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from .dispersion import Material

PROBLEMS = ("rayleigh", "modeconv", "plane-wave", "dispersion-table", "boundary-sweep")
MIN_PPW = 10
DEFAULT_BUDGET = 5e8

# file and CLI spellings mapped to field names
ALIASES = {
    "lambda": "lam",
    "periods": "n_periods",
    "angle": "phi_angle",
    "t-final": "t_final",
    "n-records": "n_records",
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one solver run.

    ``ppw`` is points per wavelength: per surface wavelength for the
    Rayleigh problem, per shear wavelength for mode conversion and per unit
    length for the plane-wave torus. Exactly one of ``t_final`` and
    ``n_periods`` is used; ``t_final`` wins when both are set.
    """

    problem: str = "rayleigh"
    lam: float = 1.0
    mu: float = 0.1
    order: int = 2
    ppw: float = 25.0
    t_final: Optional[float] = None
    n_periods: Optional[float] = None
    lx: Optional[float] = None
    phi_angle: float = math.pi / 4
    out: Optional[str] = None
    snapshot_out: Optional[str] = None
    snapshot_times: Tuple[float, ...] = ()
    seed: int = 0
    n_records: int = 100
    cfl_const: Optional[float] = None
    budget: float = DEFAULT_BUDGET
    force: bool = False

    @property
    def material(self) -> Material:
        return Material(self.lam, self.mu)

    def validate(self) -> "ExperimentConfig":
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}; expected one of {PROBLEMS}")
        try:
            self.material
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.order not in (2, 4):
            raise ConfigError(f"order must be 2 or 4, got {self.order}")
        if not self.ppw >= MIN_PPW:
            raise ConfigError(f"points per wavelength must be >= {MIN_PPW}, got {self.ppw}")
        if self.t_final is not None and not self.t_final > 0:
            raise ConfigError(f"t_final must be positive, got {self.t_final}")
        if self.n_periods is not None and not self.n_periods > 0:
            raise ConfigError(f"n_periods must be positive, got {self.n_periods}")
        if self.lx is not None and not self.lx > 0:
            raise ConfigError(f"lx must be positive, got {self.lx}")
        if self.problem == "modeconv" and not 0.0 < self.phi_angle < 0.5 * math.pi:
            raise ConfigError("mode conversion needs an incidence angle in (0, pi/2)")
        if self.n_records < 1:
            raise ConfigError("n_records must be at least 1")
        if self.cfl_const is not None and not self.cfl_const > 0:
            raise ConfigError("cfl_const must be positive")
        return self

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        return cls().updated(values)

    def updated(self, values: dict) -> "ExperimentConfig":
        """Copy with string or typed ``values`` coerced onto the fields."""
        types = {f.name: f for f in dataclasses.fields(self)}
        changes = {}
        for key, raw in values.items():
            name = ALIASES.get(key, key).replace("-", "_")
            if name not in types:
                raise ConfigError(f"unknown configuration key {key!r}")
            changes[name] = _coerce(name, raw, getattr(self, name))
        return dataclasses.replace(self, **changes)


_FLOAT = {"lam", "mu", "ppw", "t_final", "n_periods", "lx", "phi_angle", "cfl_const", "budget"}
_INT = {"order", "seed", "n_records"}


def _coerce(name: str, raw, current):
    if raw is None:
        return None
    if not isinstance(raw, str):
        return tuple(raw) if name == "snapshot_times" else raw
    text = raw.strip()
    try:
        if name in _FLOAT:
            return None if text.lower() == "none" else float(text)
        if name in _INT:
            return int(text)
        if name == "force":
            if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return text.lower() in ("true", "1", "yes")
        if name == "snapshot_times":
            return tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc
    return text


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        values[key] = value
    return values


def load_config(path, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Read a config file, then apply ``overrides`` (the CLI wins)."""
    cfg = ExperimentConfig.from_mapping(parse_config_text(Path(path).read_text()))
    if overrides:
        cfg = cfg.updated(overrides)
    return cfg
