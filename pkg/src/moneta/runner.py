"""Experiment orchestration: parallel ensembles and persistent artifacts.

Per-realization seeding makes scheduling irrelevant: every aggregate is
assembled after sorting by (threshold, realization index), so the CSV and
JSON artifacts are byte-identical for any worker count. Commodity indices
are written 1-based; realization indices are written as the 0-based seed
indices recorded in the manifest.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import logging
import time
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .kernel import simulate
from .model import MonetaError, Params
from .observables import (
    SwitchRecord,
    detect_switches,
    filter_lifetimes,
    lifetimes_from_switches,
)
from .rng import mix_seed
from .stats import FitError, LogHistogram, PowerLawFit, fit_power_law, log_binned_pdf

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_FAILURE_FRACTION = 0.10


class RunError(MonetaError, RuntimeError):
    pass


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form; locale-independent '.' separator."""
    return repr(float(x))


def _run_task(p: Params, realization: int, reduce_kind: str):
    """Worker entry point: one realization, reduced to what the kind needs."""
    v_max, j_max = simulate(p, realization)
    if reduce_kind == "series":
        return v_max, j_max
    if reduce_kind == "final":
        return float(v_max[-1])
    if reduce_kind == "switches":
        rec = detect_switches(j_max, realization)
        return np.asarray(rec.change_times, dtype=np.int64), float(v_max[-1])
    raise ValueError(f"unknown reduce kind {reduce_kind!r}")


def _run_ensemble(
    tasks: Sequence[Tuple[Params, int, str]], workers: int
) -> Tuple[dict, List[dict]]:
    """Execute tasks, keyed by position; returns (results, failures).

    A failed realization is excluded from aggregates and reported; the
    caller enforces the global failure budget.
    """
    results: dict = {}
    failures: List[dict] = []

    def record_failure(i, exc):
        p, r, _ = tasks[i]
        log.warning("realization %d (T=%s) failed: %s", r, p.threshold, exc)
        failures.append(
            {"realization": r, "threshold": p.threshold, "error": f"{type(exc).__name__}: {exc}"}
        )

    if workers <= 1 or len(tasks) <= 1:
        for i, (p, r, kind) in enumerate(tasks):
            try:
                results[i] = _run_task(p, r, kind)
            except Exception as exc:
                record_failure(i, exc)
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_run_task, p, r, kind): i for i, (p, r, kind) in enumerate(tasks)
            }
            for fut in concurrent.futures.as_completed(futures):
                i = futures[fut]
                try:
                    results[i] = fut.result()
                except Exception as exc:
                    record_failure(i, exc)

    if len(failures) > MAX_FAILURE_FRACTION * len(tasks):
        raise RunError(
            f"{len(failures)} of {len(tasks)} realizations failed "
            f"(budget {MAX_FAILURE_FRACTION:.0%})"
        )
    return results, failures


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")


def _mean_stderr(values: np.ndarray) -> Tuple[float, float]:
    n = len(values)
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


def _threshold_tag(t: float) -> str:
    return format(t, "g").replace("-", "m")


def run_experiment(cfg: ExperimentConfig) -> Dict[str, Path]:
    """Execute the configured experiment and write its artifact file set."""
    start = time.perf_counter()
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    p = cfg.params
    artifacts: Dict[str, Path] = {}

    if cfg.experiment_kind == "strength-series":
        tasks = [(p, r, "series") for r in range(p.n_realizations)]
        results, failures = _run_ensemble(tasks, cfg.workers)

        series_path = out / "strength_series.csv"
        rows = []
        trajectories = []
        for i in sorted(results):
            r = tasks[i][1]
            v_max, j_max = results[i]
            trajectories.append(v_max)
            for t in range(len(v_max)):
                rows.append((str(r), str(t + 1), _fmt(v_max[t]), str(int(j_max[t]) + 1)))
        _write_csv(series_path, "realization,t,v_max,j_max", rows)
        artifacts["strength_series"] = series_path

        data = np.asarray(trajectories)
        mean = data.mean(axis=0)
        if data.shape[0] > 1:
            stderr = data.std(axis=0, ddof=1) / np.sqrt(data.shape[0])
        else:
            stderr = np.zeros(data.shape[1])
        mean_path = out / "strength_mean.csv"
        _write_csv(
            mean_path,
            "t,mean,stderr",
            ((str(t + 1), _fmt(mean[t]), _fmt(stderr[t])) for t in range(len(mean))),
        )
        artifacts["strength_mean"] = mean_path

    elif cfg.experiment_kind == "threshold-sweep":
        grid = cfg.threshold_grid
        tasks = [
            (replace(p, threshold=float(t)), r, "final")
            for t in grid
            for r in range(p.n_realizations)
        ]
        results, failures = _run_ensemble(tasks, cfg.workers)

        rows = []
        for gi, t in enumerate(grid):
            finals = np.asarray(
                [
                    results[i]
                    for i in range(gi * p.n_realizations, (gi + 1) * p.n_realizations)
                    if i in results
                ]
            )
            if finals.size == 0:
                mean, stderr = float("nan"), float("nan")
            else:
                mean, stderr = _mean_stderr(finals)
            rows.append((_fmt(t), str(p.n), _fmt(mean), _fmt(mean / p.n), _fmt(stderr)))
        sweep_path = out / "sweep.csv"
        _write_csv(sweep_path, "T,N,mean_vmax,mean_vmax_over_n,stderr", rows)
        artifacts["sweep"] = sweep_path

    elif cfg.experiment_kind == "lifetimes":
        grid = cfg.threshold_grid
        tasks = [
            (replace(p, threshold=float(t)), r, "switches")
            for t in grid
            for r in range(p.n_realizations)
        ]
        results, failures = _run_ensemble(tasks, cfg.workers)

        lifetime_rows = []
        taus_by_threshold: Dict[float, List[int]] = {t: [] for t in grid}
        for gi, t in enumerate(grid):
            for r in range(p.n_realizations):
                i = gi * p.n_realizations + r
                if i not in results:
                    continue
                change_times, _final = results[i]
                rec = SwitchRecord(
                    realization_index=r, change_times=[int(x) for x in change_times]
                )
                samples = lifetimes_from_switches(rec, threshold=float(t))
                kept = filter_lifetimes(
                    samples, p.lifetime_low_cutoff, p.lifetime_high_cutoff
                )
                for s in kept:
                    lifetime_rows.append((str(r), _fmt(t), str(s.tau)))
                    taus_by_threshold[t].append(s.tau)
        lifetimes_path = out / "lifetimes.csv"
        _write_csv(lifetimes_path, "realization,T,tau", lifetime_rows)
        artifacts["lifetimes"] = lifetimes_path

        window = (float(p.lifetime_low_cutoff), float(p.lifetime_high_cutoff))
        single = len(grid) == 1
        for t in grid:
            tag = "" if single else f"_T{_threshold_tag(t)}"
            taus = taus_by_threshold[t]
            if not taus:
                log.warning("no lifetimes collected for T=%s; skipping histogram/fit", t)
                continue
            hist = log_binned_pdf(taus, cfg.bins_per_decade, window)
            hist_path = out / f"histogram{tag}.csv"
            _write_csv(
                hist_path,
                "bin_lo,bin_hi,center,count,density",
                (
                    (
                        _fmt(hist.bin_edges[i]),
                        _fmt(hist.bin_edges[i + 1]),
                        _fmt(hist.centers[i]),
                        str(int(hist.counts[i])),
                        _fmt(hist.density[i]),
                    )
                    for i in range(len(hist.counts))
                ),
            )
            artifacts[f"histogram{tag}"] = hist_path

            fit_path = out / f"fit{tag}.json"
            try:
                fit = fit_power_law(hist, cfg.effective_fit_window)
            except FitError as e:
                log.warning("power-law fit failed for T=%s: %s", t, e)
            else:
                fit_path.write_text(
                    json.dumps(
                        {
                            "A": fit.amplitude,
                            "alpha": fit.alpha,
                            "alpha_stderr": fit.alpha_stderr,
                            "window": list(fit.fit_window),
                            "n_bins_used": fit.n_bins_used,
                            "threshold": t,
                        },
                        indent=2,
                        sort_keys=True,
                    )
                    + "\n"
                )
                artifacts[f"fit{tag}"] = fit_path
    else:
        raise RunError(f"unknown experiment kind {cfg.experiment_kind!r}")

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "moneta_version": __version__,
        "kind": cfg.experiment_kind,
        "config": {
            "n_agents": p.n_agents,
            "n_commodities": p.n_commodities,
            "threshold": p.threshold,
            "thresholds": cfg.thresholds,
            "horizon": p.turns_horizon,
            "n_realizations": p.n_realizations,
            "base_seed": p.base_seed,
            "lifetime_low_cutoff": p.lifetime_low_cutoff,
            "lifetime_high_cutoff": p.lifetime_high_cutoff,
            "bins_per_decade": cfg.bins_per_decade,
            "fit_window": list(cfg.effective_fit_window),
            "workers": cfg.workers,
        },
        "realization_seeds": [
            mix_seed(p.base_seed, r) for r in range(p.n_realizations)
        ],
        "failures": failures,
        "artifacts": {name: _sha256(path) for name, path in sorted(artifacts.items())},
        "wall_time_s": time.perf_counter() - start,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    artifacts["manifest"] = manifest_path
    return artifacts
