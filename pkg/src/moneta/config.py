"""Experiment configuration: `key = value` text files, strictly validated.

Lines are `key = value`, blank, or `#` comments. Unknown and duplicate
keys are rejected with the offending line number. Defaults: lifetime
cutoffs 10 / 100000 turns, 8 histogram bins per decade, fit window lower
edge 1000 turns, workers = available parallelism (overridable via the
MONETA_WORKERS environment variable).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .model import MonetaError, Params, validate_params

KINDS = ("strength-series", "threshold-sweep", "lifetimes")

DEFAULT_BINS_PER_DECADE = 8
DEFAULT_FIT_WINDOW_LO = 1000.0


class ConfigError(MonetaError, ValueError):
    pass


@dataclass
class ExperimentConfig:
    params: Params
    experiment_kind: str
    thresholds: Optional[List[float]]  # sweep / multi-threshold lifetimes only
    output_dir: Path
    workers: int
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE
    fit_window_lo: float = DEFAULT_FIT_WINDOW_LO
    fit_window_hi: Optional[float] = None  # defaults to the high lifetime cutoff

    @property
    def effective_fit_window(self):
        hi = self.fit_window_hi
        if hi is None:
            hi = float(self.params.lifetime_high_cutoff)
        return (self.fit_window_lo, hi)

    @property
    def threshold_grid(self) -> List[float]:
        if self.thresholds is not None:
            return list(self.thresholds)
        return [self.params.threshold]


def default_workers() -> int:
    env = os.environ.get("MONETA_WORKERS")
    if env:
        try:
            w = int(env)
        except ValueError as e:
            raise ConfigError(f"MONETA_WORKERS must be an integer, got {env!r}") from e
        if w < 1:
            raise ConfigError("MONETA_WORKERS must be >= 1")
        return w
    return os.cpu_count() or 1


_KNOWN_KEYS = {
    "kind",
    "n_agents",
    "n_commodities",
    "threshold",
    "thresholds",
    "horizon",
    "n_realizations",
    "base_seed",
    "lifetime_low_cutoff",
    "lifetime_high_cutoff",
    "bins_per_decade",
    "fit_window_lo",
    "fit_window_hi",
    "output_dir",
    "workers",
}

_REQUIRED_KEYS = {"kind", "n_agents", "horizon"}


def _parse_int(key: str, raw: str, line_no: int) -> int:
    try:
        # accept scientific notation for large integers (e.g. 1e6)
        f = float(raw)
        if f != int(f):
            raise ValueError
        return int(f)
    except ValueError as e:
        raise ConfigError(f"line {line_no}: {key} must be an integer, got {raw!r}") from e


def _parse_float(key: str, raw: str, line_no: int) -> float:
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigError(f"line {line_no}: {key} must be a number, got {raw!r}") from e


def parse_config(source: str, *, name: str = "<config>") -> ExperimentConfig:
    """Parse and fully validate a config text; raises ConfigError on any defect."""
    raw: dict = {}
    lines: dict = {}
    for line_no, line in enumerate(source.splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{name} line {line_no}: expected 'key = value', got {line!r}")
        key, _, value = text.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{name} line {line_no}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(
                f"{name} line {line_no}: duplicate key {key!r} (first on line {lines[key]})"
            )
        if not value:
            raise ConfigError(f"{name} line {line_no}: empty value for {key!r}")
        raw[key] = value
        lines[key] = line_no

    missing = _REQUIRED_KEYS - raw.keys()
    if missing:
        raise ConfigError(f"{name}: missing required keys: {', '.join(sorted(missing))}")

    kind = raw["kind"]
    if kind not in KINDS:
        raise ConfigError(
            f"{name} line {lines['kind']}: kind must be one of {', '.join(KINDS)}, got {kind!r}"
        )

    threshold = _parse_float("threshold", raw["threshold"], lines["threshold"]) if "threshold" in raw else None
    thresholds = None
    if "thresholds" in raw:
        items = [s.strip() for s in raw["thresholds"].split(",") if s.strip()]
        if not items:
            raise ConfigError(f"{name} line {lines['thresholds']}: thresholds list is empty")
        thresholds = [_parse_float("thresholds", s, lines["thresholds"]) for s in items]

    if kind == "strength-series":
        if threshold is None:
            raise ConfigError(f"{name}: kind strength-series requires 'threshold'")
        if thresholds is not None:
            raise ConfigError(f"{name}: kind strength-series does not take 'thresholds'")
    elif kind == "threshold-sweep":
        if thresholds is None:
            raise ConfigError(f"{name}: kind threshold-sweep requires 'thresholds'")
        if threshold is not None:
            raise ConfigError(f"{name}: kind threshold-sweep does not take 'threshold'")
    else:  # lifetimes: single threshold or a grid, but not both
        if (threshold is None) == (thresholds is None):
            raise ConfigError(
                f"{name}: kind lifetimes requires exactly one of 'threshold' or 'thresholds'"
            )

    params_kwargs = dict(
        n_agents=_parse_int("n_agents", raw["n_agents"], lines["n_agents"]),
        threshold=threshold if threshold is not None else thresholds[0],
        turns_horizon=_parse_int("horizon", raw["horizon"], lines["horizon"]),
    )
    if "n_commodities" in raw:
        params_kwargs["n_commodities"] = _parse_int(
            "n_commodities", raw["n_commodities"], lines["n_commodities"]
        )
    if "n_realizations" in raw:
        params_kwargs["n_realizations"] = _parse_int(
            "n_realizations", raw["n_realizations"], lines["n_realizations"]
        )
    if "base_seed" in raw:
        params_kwargs["base_seed"] = _parse_int("base_seed", raw["base_seed"], lines["base_seed"])
    if "lifetime_low_cutoff" in raw:
        params_kwargs["lifetime_low_cutoff"] = _parse_int(
            "lifetime_low_cutoff", raw["lifetime_low_cutoff"], lines["lifetime_low_cutoff"]
        )
    if "lifetime_high_cutoff" in raw:
        params_kwargs["lifetime_high_cutoff"] = _parse_int(
            "lifetime_high_cutoff", raw["lifetime_high_cutoff"], lines["lifetime_high_cutoff"]
        )
    params = validate_params(Params(**params_kwargs))

    workers = (
        _parse_int("workers", raw["workers"], lines["workers"])
        if "workers" in raw
        else default_workers()
    )
    if workers < 1:
        raise ConfigError(f"{name}: workers must be >= 1")

    bins_per_decade = (
        _parse_int("bins_per_decade", raw["bins_per_decade"], lines["bins_per_decade"])
        if "bins_per_decade" in raw
        else DEFAULT_BINS_PER_DECADE
    )
    if bins_per_decade < 1:
        raise ConfigError(f"{name}: bins_per_decade must be >= 1")

    fit_lo = (
        _parse_float("fit_window_lo", raw["fit_window_lo"], lines["fit_window_lo"])
        if "fit_window_lo" in raw
        else DEFAULT_FIT_WINDOW_LO
    )
    fit_hi = (
        _parse_float("fit_window_hi", raw["fit_window_hi"], lines["fit_window_hi"])
        if "fit_window_hi" in raw
        else None
    )
    if fit_hi is not None and fit_hi <= fit_lo:
        raise ConfigError(f"{name}: fit window must satisfy lo < hi")

    return ExperimentConfig(
        params=params,
        experiment_kind=kind,
        thresholds=thresholds,
        output_dir=Path(raw.get("output_dir", "out")),
        workers=workers,
        bins_per_decade=bins_per_decade,
        fit_window_lo=fit_lo,
        fit_window_hi=fit_hi,
    )


def parse_config_file(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config(text, name=str(path))
