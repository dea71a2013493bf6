"""Ensemble aggregation, log-binned lifetime densities, power-law fitting."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .model import MonetaError, Params, validate_params

log = logging.getLogger(__name__)


class FitError(MonetaError, ValueError):
    pass


@dataclass
class EnsembleCurve:
    """Mean +/- standard error over realizations, per abscissa point.

    ``n`` is the number of samples behind each point; a point whose
    realizations all failed carries n=0 and NaN mean/stderr.
    """

    abscissa: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        assert len(self.abscissa) == len(self.mean) == len(self.stderr) == len(self.n)


@dataclass
class LogHistogram:
    """Geometric-bin estimate of the lifetime probability density."""

    bin_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        # geometric mean of the edges: the natural abscissa for log bins
        return np.sqrt(self.bin_edges[:-1] * self.bin_edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)


@dataclass
class PowerLawFit:
    """p(tau) ~ amplitude * tau**(-alpha), fitted over fit_window."""

    amplitude: float
    alpha: float
    alpha_stderr: float
    fit_window: Tuple[float, float]
    n_bins_used: int


def _mean_stderr(values: np.ndarray) -> Tuple[float, float]:
    n = len(values)
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


def ensemble_mean_series(trajectories: Sequence[np.ndarray]) -> EnsembleCurve:
    """Per-turn mean and standard error of V_max across realizations."""
    if len(trajectories) == 0:
        raise ValueError("no trajectories")
    lengths = {len(t) for t in trajectories}
    if len(lengths) != 1:
        raise ValueError(f"ragged trajectories, lengths {sorted(lengths)}")
    data = np.asarray(trajectories, dtype=np.float64)
    nr, horizon = data.shape
    mean = data.mean(axis=0)
    if nr > 1:
        stderr = data.std(axis=0, ddof=1) / math.sqrt(nr)
    else:
        stderr = np.zeros(horizon)
    return EnsembleCurve(
        abscissa=np.arange(1, horizon + 1, dtype=np.float64),
        mean=mean,
        stderr=stderr,
        n=np.full(horizon, nr),
    )


def final_vmax_ensemble(p: Params) -> np.ndarray:
    """Final-turn V_max of each of the nr realizations of ``p``."""
    from .kernel import simulate

    finals = np.empty(p.n_realizations)
    for r in range(p.n_realizations):
        v_max, _ = simulate(p, r)
        finals[r] = v_max[-1]
    return finals


def threshold_sweep(
    p_base: Params, thresholds: Sequence[float], scale_by_n: bool = False
) -> EnsembleCurve:
    """Mean final V_max (optionally divided by N) over a threshold grid.

    A grid point whose run fails is reported as NaN with n=0 instead of
    aborting the remaining points.
    """
    if len(thresholds) == 0:
        raise ValueError("thresholds must be non-empty")
    means = np.empty(len(thresholds))
    stderrs = np.empty(len(thresholds))
    ns = np.empty(len(thresholds), dtype=np.int64)
    for i, t in enumerate(thresholds):
        p = validate_params(replace(p_base, threshold=float(t)))
        try:
            finals = final_vmax_ensemble(p)
        except Exception:
            log.exception("threshold sweep point T=%s failed", t)
            means[i], stderrs[i], ns[i] = np.nan, np.nan, 0
            continue
        means[i], stderrs[i] = _mean_stderr(finals)
        ns[i] = len(finals)
    if scale_by_n:
        means = means / p_base.n
        stderrs = stderrs / p_base.n
    return EnsembleCurve(
        abscissa=np.asarray(thresholds, dtype=np.float64),
        mean=means,
        stderr=stderrs,
        n=ns,
    )


def log_binned_pdf(
    samples: Sequence[float], bins_per_decade: int, window: Tuple[float, float]
) -> LogHistogram:
    """Histogram on geometric bins spanning ``window``, normalized to a pdf.

    density_i = count_i / (total * width_i), so the density integrates to
    one over the window.
    """
    lo, hi = window
    if lo <= 0 or hi <= lo:
        raise ValueError(f"bad window {window}")
    if bins_per_decade < 1:
        raise ValueError("bins_per_decade must be >= 1")
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty sample set")
    if (x < lo).any() or (x > hi).any():
        raise ValueError("samples outside the histogram window")
    decades = math.log10(hi / lo)
    n_bins = max(1, int(round(bins_per_decade * decades)))
    edges = np.geomspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(x, bins=edges)
    # np.histogram treats the last edge as closed, matching the <= hi filter
    widths = np.diff(edges)
    density = counts / (x.size * widths)
    return LogHistogram(bin_edges=edges, counts=counts, density=density)


def fit_power_law(h: LogHistogram, fit_window: Tuple[float, float]) -> PowerLawFit:
    """OLS of log10(density) on log10(bin center) over non-empty window bins.

    alpha = -slope; amplitude = 10**intercept; alpha_stderr is the
    textbook standard error of the OLS slope.
    """
    lo, hi = fit_window
    centers = h.centers
    mask = (centers >= lo) & (centers <= hi) & (h.counts > 0)
    n = int(mask.sum())
    if n < 3:
        raise FitError(f"need >= 3 non-empty bins in the fit window, got {n}")
    x = np.log10(centers[mask])
    y = np.log10(h.density[mask])
    if np.ptp(x) == 0:
        raise FitError("degenerate fit: zero-variance abscissa")
    xm = x.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * y) / sxx)
    intercept = float(y.mean() - slope * xm)
    resid = y - (intercept + slope * x)
    if n > 2:
        s2 = float(np.sum(resid**2)) / (n - 2)
    else:
        s2 = 0.0
    slope_stderr = math.sqrt(s2 / sxx)
    return PowerLawFit(
        amplitude=10.0**intercept,
        alpha=-slope,
        alpha_stderr=slope_stderr,
        fit_window=(float(lo), float(hi)),
        n_bins_used=n,
    )


def fit_power_law_mle(
    samples: Sequence[float], tau_min: float
) -> Tuple[float, float]:
    """Hill (continuous power-law) MLE cross-check: (alpha, stderr).

    Fits the tail tau >= tau_min of an unbounded Pareto; used only as a
    sanity check against the OLS estimate, which defines the reported
    exponent.
    """
    x = np.asarray([s for s in samples if s >= tau_min], dtype=np.float64)
    if x.size < 2:
        raise FitError("too few tail samples for the MLE cross-check")
    alpha = 1.0 + x.size / float(np.sum(np.log(x / tau_min)))
    stderr = (alpha - 1.0) / math.sqrt(x.size)
    return alpha, stderr
