"""Flat ``key = value`` configuration for the benchmark pipeline.

The format is line-based: one ``key = value`` assignment per line,
``#`` starts a comment, blank lines are ignored, list values are
comma-separated numbers.  Unknown keys are rejected (not ignored), and
range violations name the offending key.

Grid keys shape the full benchmark sweep; the single-scenario keys
(``algorithm``, ``noise_level``, ``alpha``, ``f``, ``lms_eta``) select
one cell for the ``run`` and ``calibrate`` subcommands and have no
defaults: ``run`` refuses to guess a scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .experiment import (
    ALPHAS,
    DEFAULT_BASE_SEED,
    FRACTIONAL_ORDERS,
    GridConfig,
    NOISE_LEVELS,
    PAIRED_LMS_ETAS,
    ScenarioConfig,
)
from .filters import Variant
from .metrics import MetricSpace

__all__ = ["ConfigError", "Settings", "parse_config", "apply_override", "validate_settings"]

ALGORITHM_NAMES = {
    "lms": Variant.LMS,
    "momentum_lms": Variant.MOMENTUM_LMS,
    "flms": Variant.FLMS,
    "mflms": Variant.MFLMS_ASSEMBLED,
    "mflms_published16": Variant.MFLMS_PUBLISHED16,
    "mflms_corrected": Variant.MFLMS_CORRECTED,
}


class ConfigError(ValueError):
    """A configuration line failed to parse or a value is out of range."""


@dataclass
class Settings:
    """Parsed configuration: the grid plus optional single-scenario keys."""

    noise_levels: tuple = NOISE_LEVELS
    noise_scale: str = "variance"
    alphas: tuple = ALPHAS
    fractional_orders: tuple = FRACTIONAL_ORDERS
    lms_etas: tuple = PAIRED_LMS_ETAS
    mflms_mu1: float | None = None
    n_runs: int = 1000
    n_iters: int = 1000
    checkpoint_interval: int = 100
    base_seed: int = DEFAULT_BASE_SEED
    metric_space: str = "aphi"
    calibration_runs: int = 200
    calibration_tolerance: float = 0.05
    # single-scenario selection (no defaults on purpose)
    algorithm: str | None = None
    noise_level: float | None = None
    alpha: float | None = None
    f: float | None = None
    lms_eta: float | None = None

    def grid_config(self) -> GridConfig:
        return GridConfig(
            noise_levels=self.noise_levels,
            noise_scale=self.noise_scale,
            alphas=self.alphas,
            fractional_orders=self.fractional_orders,
            lms_etas=self.lms_etas,
            mflms_mu1=self.mflms_mu1,
            n_runs=self.n_runs,
            n_iters=self.n_iters,
            checkpoint_interval=self.checkpoint_interval,
            base_seed=self.base_seed,
            metric_space=MetricSpace(self.metric_space),
            calibration_runs=self.calibration_runs,
            calibration_tolerance=self.calibration_tolerance,
        )

    def single_scenario(self) -> tuple[Variant, float, ScenarioConfig]:
        """Scenario for ``run``/``calibrate``; raises on missing keys."""
        missing = [k for k in ("noise_level", "alpha", "f") if getattr(self, k) is None]
        if missing:
            raise ConfigError(f"missing required scenario key(s): {', '.join(missing)}")
        variant = ALGORITHM_NAMES[self.algorithm or "mflms"]
        eta = self.lms_eta
        if eta is None:
            pairing = dict(zip(self.alphas, self.lms_etas))
            eta = pairing.get(self.alpha)
            if eta is None:
                raise ConfigError(
                    "lms_eta is required when alpha is not one of the paired grid values"
                )
        grid = self.grid_config()
        scenario = grid.scenario(self.noise_level, self.alpha, self.f, eta)
        return variant, eta, scenario


def _parse_float(key, text):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    return value


def _parse_int(key, text):
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {text!r}") from None


def _parse_float_list(key, text):
    items = [t.strip() for t in text.split(",")]
    if not any(items):
        raise ConfigError(f"{key}: empty list")
    return tuple(_parse_float(key, t) for t in items if t)


def _check_probability_open(key, value, lo_open=False):
    if lo_open and not 0.0 < value < 1.0:
        raise ConfigError(f"{key}: must lie strictly in (0, 1), got {value:g}")
    if not lo_open and not 0.0 <= value < 1.0:
        raise ConfigError(f"{key}: must lie in [0, 1), got {value:g}")
    return value


def _check_positive(key, value):
    if not value > 0:
        raise ConfigError(f"{key}: must be positive, got {value!r}")
    return value


_KEY_PARSERS = {
    "noise_levels": lambda v: tuple(_check_positive("noise_levels", x)
                                    for x in _parse_float_list("noise_levels", v)),
    "noise_scale": None,  # handled below
    "alphas": lambda v: tuple(_check_probability_open("alphas", x)
                              for x in _parse_float_list("alphas", v)),
    "fractional_orders": lambda v: tuple(_check_probability_open("fractional_orders", x, lo_open=True)
                                         for x in _parse_float_list("fractional_orders", v)),
    "lms_etas": lambda v: tuple(_check_positive("lms_etas", x)
                                for x in _parse_float_list("lms_etas", v)),
    "mflms_mu1": lambda v: _check_positive("mflms_mu1", _parse_float("mflms_mu1", v)),
    "n_runs": lambda v: _check_positive("n_runs", _parse_int("n_runs", v)),
    "n_iters": lambda v: _check_positive("n_iters", _parse_int("n_iters", v)),
    "checkpoint_interval": lambda v: _check_positive("checkpoint_interval",
                                                     _parse_int("checkpoint_interval", v)),
    "base_seed": lambda v: _parse_int("base_seed", v),
    "metric_space": None,
    "calibration_runs": lambda v: _check_positive("calibration_runs",
                                                  _parse_int("calibration_runs", v)),
    "calibration_tolerance": lambda v: _check_positive("calibration_tolerance",
                                                       _parse_float("calibration_tolerance", v)),
    "algorithm": None,
    "noise_level": lambda v: _check_positive("noise_level", _parse_float("noise_level", v)),
    "alpha": lambda v: _check_probability_open("alpha", _parse_float("alpha", v)),
    "f": lambda v: _check_probability_open("f", _parse_float("f", v), lo_open=True),
    "lms_eta": lambda v: _check_positive("lms_eta", _parse_float("lms_eta", v)),
}


def _parse_enum(key, value, allowed):
    value = value.strip().lower()
    if value not in allowed:
        raise ConfigError(f"{key}: expected one of {sorted(allowed)}, got {value!r}")
    return value


def apply_override(settings: Settings, key: str, value: str) -> Settings:
    """Apply one ``key=value`` assignment, validating key and range.

    Cross-field constraints are deferred to :func:`validate_settings`
    so that related keys may be assigned in any order.
    """
    key = key.strip()
    if key not in _KEY_PARSERS:
        raise ConfigError(f"unknown configuration key: {key!r}")
    value = value.strip()
    if key == "noise_scale":
        parsed = _parse_enum(key, value, {"variance", "std"})
    elif key == "metric_space":
        parsed = _parse_enum(key, value, {"aphi", "bc"})
    elif key == "algorithm":
        parsed = _parse_enum(key, value, set(ALGORITHM_NAMES))
    else:
        parsed = _KEY_PARSERS[key](value)
    return replace(settings, **{key: parsed})


def validate_settings(settings: Settings) -> Settings:
    """Check constraints that couple several keys; returns the settings."""
    if settings.n_iters % settings.checkpoint_interval:
        raise ConfigError("checkpoint_interval: must divide n_iters")
    if len(settings.alphas) != len(settings.lms_etas):
        raise ConfigError("lms_etas: must pair one-to-one with alphas")
    if not 0 <= settings.base_seed < 2**64:
        raise ConfigError("base_seed: must fit in an unsigned 64-bit integer")
    return settings


def parse_config(text: str) -> Settings:
    """Parse a configuration file body into validated settings.

    An empty body yields the full default benchmark grid.  Errors carry
    the 1-based line number of the offending assignment.
    """
    settings = Settings()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        try:
            settings = apply_override(settings, key, value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return validate_settings(settings)
