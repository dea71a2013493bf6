"""The four figure kinds, rendered from artifact files.

fig1 — money strength vs time: sample trajectories plus the ensemble mean
       (strength_series.csv, strength_mean.csv).
fig2 — scaled money strength vs acceptance threshold (sweep.csv).
fig3 — identity of the money commodity vs log time, one realization
       (strength_series.csv).
fig4 — money-lifetime probability density, double-log, with the fitted
       power law overlaid exactly as recorded (histogram.csv, fit.json;
       or the per-threshold histogram_T*.csv / fit_T*.json sets).

Each ``figN`` builds and returns a matplotlib Figure; :func:`render`
saves one to disk.
"""

from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class PlotError(ValueError):
    pass


def _read_csv(path: Path, expected_header: List[str]) -> Dict[str, np.ndarray]:
    if not path.exists():
        raise PlotError(f"missing artifact: {path}")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotError(f"{path} is empty") from None
        if header != expected_header:
            raise PlotError(
                f"{path} has header {header!r}, expected {expected_header!r}"
            )
        rows = list(reader)
    if not rows:
        raise PlotError(f"{path} contains no data rows")
    cols = np.asarray(rows, dtype=np.float64).T
    return dict(zip(expected_header, cols))


def _read_fit(path: Path) -> dict:
    if not path.exists():
        raise PlotError(f"missing artifact: {path}")
    fit = json.loads(path.read_text())
    for key in ("A", "alpha", "window"):
        if key not in fit:
            raise PlotError(f"{path} lacks required key {key!r}")
    return fit


def fig1(in_dir: Path, max_trajectories: int = 5):
    series = _read_csv(in_dir / "strength_series.csv", ["realization", "t", "v_max", "j_max"])
    mean = _read_csv(in_dir / "strength_mean.csv", ["t", "mean", "stderr"])

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for r in np.unique(series["realization"])[:max_trajectories]:
        sel = series["realization"] == r
        ax.plot(series["t"][sel], series["v_max"][sel], lw=0.7, alpha=0.5,
                label=f"realization {int(r)}")
    ax.plot(mean["t"], mean["mean"], color="black", lw=2.0, label="ensemble mean")
    ax.fill_between(
        mean["t"],
        mean["mean"] - mean["stderr"],
        mean["mean"] + mean["stderr"],
        color="black",
        alpha=0.15,
        lw=0,
    )
    ax.set_xlabel("time $t$ (turns)")
    ax.set_ylabel(r"money strength $V_{\max}(t)$")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    return fig


def fig2(in_dir: Path):
    sweep = _read_csv(in_dir / "sweep.csv", ["T", "N", "mean_vmax", "mean_vmax_over_n", "stderr"])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(
        sweep["T"],
        sweep["mean_vmax_over_n"],
        yerr=sweep["stderr"] / sweep["N"],
        marker="o",
        ms=4,
        lw=1.2,
        capsize=3,
    )
    ax.set_xlabel("acceptance threshold $T$")
    ax.set_ylabel(r"scaled money strength $V_{\max}/N$")
    fig.tight_layout()
    return fig


def fig3(in_dir: Path):
    series = _read_csv(in_dir / "strength_series.csv", ["realization", "t", "v_max", "j_max"])
    r0 = np.unique(series["realization"])[0]
    sel = series["realization"] == r0
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.step(series["t"][sel], series["j_max"][sel], where="post", lw=0.9)
    ax.set_xscale("log")
    ax.set_xlabel("time $t$ (turns)")
    ax.set_ylabel(r"money commodity $j_{\max}$")
    ax.set_ylim(0.5, series["j_max"].max() + 0.5)
    fig.tight_layout()
    return fig


def _fig4_file_sets(in_dir: Path) -> List[tuple]:
    """(label, histogram path, fit path) sets: plain pair or per-threshold pairs."""
    plain = in_dir / "histogram.csv"
    if plain.exists():
        return [("", plain, in_dir / "fit.json")]
    sets = []
    for hist in sorted(in_dir.glob("histogram_T*.csv")):
        tag = hist.stem[len("histogram_"):]
        sets.append((tag.replace("T", "T="), hist, in_dir / f"fit_{tag}.json"))
    if not sets:
        raise PlotError(f"no histogram.csv or histogram_T*.csv in {in_dir}")
    return sets


def fig4(in_dir: Path):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, hist_path, fit_path in _fig4_file_sets(in_dir):
        h = _read_csv(hist_path, ["bin_lo", "bin_hi", "center", "count", "density"])
        occupied = h["count"] > 0
        pts = ax.plot(
            h["center"][occupied],
            h["density"][occupied],
            "o",
            ms=4,
            label=label or "lifetimes",
        )[0]
        if not fit_path.exists():
            warnings.warn(f"{fit_path} absent; rendering histogram only")
            continue
        fit = _read_fit(fit_path)
        lo, hi = fit["window"]
        x = np.geomspace(lo, hi, 64)
        # the overlay uses exactly the recorded amplitude and exponent
        y = fit["A"] * x ** (-fit["alpha"])
        suffix = f" fit: $\\alpha$={fit['alpha']:.2f}"
        ax.plot(x, y, "--", lw=1.2, color=pts.get_color(), label=(label + suffix).strip())
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"money lifetime $\tau$ (turns)")
    ax.set_ylabel(r"probability density $p(\tau)$")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    return fig


FIGURES = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4}


def render(kind: str, in_dir, out_file) -> None:
    """Render one figure kind from an artifact directory to an image file."""
    if kind not in FIGURES:
        raise PlotError(f"unknown figure kind {kind!r}; choose from {sorted(FIGURES)}")
    out = Path(out_file)
    if str(out.parent) not in ("", "."):
        out.parent.mkdir(parents=True, exist_ok=True)
    fig = FIGURES[kind](Path(in_dir))
    try:
        fig.savefig(out, dpi=150)
    finally:
        plt.close(fig)
