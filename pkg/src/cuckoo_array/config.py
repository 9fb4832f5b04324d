"""Flat TOML run configuration for the ``synth`` command.

Precedence is flags > file > defaults. Every key is optional; unknown keys
are rejected by name so typos do not silently fall back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import tomli

from .array_model import AngleConvention, ArrayGeometry
from .cuckoo import CsaConfig
from .synthesis import SynthesisSpec


class ConfigError(ValueError):
    """Configuration could not be parsed or validated (exit status 2)."""


@dataclass
class RunConfig:
    m: int = 11
    n: int = 11
    dx: float = 0.5
    dy: float = 0.5
    phi_deg: float = 0.0
    theta_points: int = 1801
    theta_start_deg: float = 0.0
    theta_stop_deg: float = 180.0
    convention: str = AngleConvention.BROADSIDE_AT_90.value
    symmetry: str = "quadrant"
    taper_monotone: bool = False
    amplitude_lower: float = 0.0
    amplitude_upper: float = 1.0
    lobe_window_deg: list | None = None
    lobe_penalty_db_per_deg: float = 10.0
    population: int = 25
    pa: float = 0.25
    alpha: float = 0.01
    levy_exponent: float = 1.5
    max_iterations: int = 500
    raw_levy: bool = False
    seed: int = 0
    seeds: list | None = None
    out_dir: str = "synth-out"
    workers: int = 1

    def seed_list(self) -> list[int]:
        return [int(s) for s in self.seeds] if self.seeds else [int(self.seed)]

    def to_spec(self, seed: int | None = None) -> SynthesisSpec:
        try:
            return SynthesisSpec(
                geometry=ArrayGeometry(self.m, self.n, self.dx, self.dy),
                cut_phi_deg=float(self.phi_deg),
                theta_points=self.theta_points,
                theta_range=(self.theta_start_deg, self.theta_stop_deg),
                convention=AngleConvention(self.convention),
                symmetry=self.symmetry,
                taper_monotone=self.taper_monotone,
                amplitude_bounds=(self.amplitude_lower, self.amplitude_upper),
                lobe_window=None if self.lobe_window_deg is None else tuple(self.lobe_window_deg),
                lobe_penalty_db_per_deg=float(self.lobe_penalty_db_per_deg),
                csa=CsaConfig(
                    population=self.population,
                    pa=self.pa,
                    alpha=self.alpha,
                    levy_exponent=self.levy_exponent,
                    max_iterations=self.max_iterations,
                    seed=self.seed if seed is None else seed,
                    raw_levy=self.raw_levy,
                ),
            )
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, value):
    kind = _TYPES[key]
    if kind == "bool":
        ok = isinstance(value, bool)
    elif kind == "int":
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind == "float":
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif kind == "str":
        ok = isinstance(value, str)
    else:
        ok = value is None or isinstance(value, list)
    if not ok:
        raise ConfigError(f"key {key!r} has wrong type: {value!r}")
    return value


def apply_overrides(config: RunConfig, values: dict) -> RunConfig:
    for key, value in values.items():
        if key not in _TYPES:
            raise ConfigError(f"unknown configuration key {key!r}")
        setattr(config, key, _coerce(key, value))
    return config


def parse_config(text: str) -> RunConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(f"configuration must be flat; table {nested[0]!r} not allowed")
    return apply_overrides(RunConfig(), data)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text)
