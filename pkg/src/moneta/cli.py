"""Command-line interface.

Subcommands:
  run        execute a strength-series experiment (Fig. 1-style data);
             --stream additionally prints realization 0's per-turn records
  sweep      execute a threshold-sweep experiment (Fig. 2-style data)
  lifetimes  execute a lifetimes experiment (Figs. 3-4-style data)
  fit        re-fit an existing histogram.csv with a different window
  validate   check a config file and exit

On failure a single machine-readable line `error: <kind>: <message>` is
printed to stderr and the exit status is nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from .config import ConfigError, ExperimentConfig, parse_config_file
from .kernel import simulate
from .model import MonetaError, validate_params
from .runner import run_experiment
from .stats import FitError, LogHistogram, fit_power_law

_KIND_BY_COMMAND = {
    "run": "strength-series",
    "sweep": "threshold-sweep",
    "lifetimes": "lifetimes",
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True, help="experiment config file")
    sub.add_argument("--seed", type=int, default=None, help="override base_seed")
    sub.add_argument("--out", default=None, help="override output directory")
    sub.add_argument("--workers", type=int, default=None, help="override worker count")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moneta",
        description="Agent-based commodity-money market simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="strength-series experiment")
    _add_common(p_run)
    p_run.add_argument(
        "--stream",
        action="store_true",
        help="also print realization 0's t,v_max,j_max records to stdout",
    )

    _add_common(sub.add_parser("sweep", help="threshold-sweep experiment"))
    _add_common(sub.add_parser("lifetimes", help="lifetimes experiment"))

    p_fit = sub.add_parser("fit", help="re-fit an existing histogram")
    p_fit.add_argument("--in", dest="input", required=True, help="histogram.csv path")
    p_fit.add_argument(
        "--window", required=True, help="fit window as lo:hi in turns, e.g. 1e3:1e5"
    )
    p_fit.add_argument("--out", default=None, help="output fit.json path")

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", required=True)
    return parser


def _load_config(args) -> ExperimentConfig:
    cfg = parse_config_file(args.config)
    expected = _KIND_BY_COMMAND[args.command]
    if cfg.experiment_kind != expected:
        raise ConfigError(
            f"config kind {cfg.experiment_kind!r} does not match subcommand "
            f"{args.command!r} (expected {expected!r})"
        )
    if args.seed is not None:
        cfg = replace(cfg, params=validate_params(replace(cfg.params, base_seed=args.seed)))
    if args.out is not None:
        cfg = replace(cfg, output_dir=Path(args.out))
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg = replace(cfg, workers=args.workers)
    return cfg


def _read_histogram_csv(path: Path) -> LogHistogram:
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise FitError(f"cannot read histogram {path}: {e}") from e
    if not lines or lines[0] != "bin_lo,bin_hi,center,count,density":
        raise FitError(f"{path} is not a histogram.csv (bad header)")
    lo, hi, counts, density = [], [], [], []
    for line in lines[1:]:
        f = line.split(",")
        lo.append(float(f[0]))
        hi.append(float(f[1]))
        counts.append(int(f[3]))
        density.append(float(f[4]))
    if not lo:
        raise FitError(f"{path} contains no bins")
    edges = np.asarray(lo + [hi[-1]])
    return LogHistogram(
        bin_edges=edges,
        counts=np.asarray(counts, dtype=np.int64),
        density=np.asarray(density),
    )


def _cmd_fit(args) -> int:
    try:
        lo_s, _, hi_s = args.window.partition(":")
        window = (float(lo_s), float(hi_s))
    except ValueError as e:
        raise FitError(f"bad --window {args.window!r}, expected lo:hi") from e
    if window[0] <= 0 or window[1] <= window[0]:
        raise FitError(f"bad --window {args.window!r}: need 0 < lo < hi")
    hist = _read_histogram_csv(Path(args.input))
    fit = fit_power_law(hist, window)
    out = Path(args.out) if args.out else Path(args.input).with_name("fit.json")
    out.write_text(
        json.dumps(
            {
                "A": fit.amplitude,
                "alpha": fit.alpha,
                "alpha_stderr": fit.alpha_stderr,
                "window": list(fit.fit_window),
                "n_bins_used": fit.n_bins_used,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    print(f"alpha = {fit.alpha:.4f} +/- {fit.alpha_stderr:.4f} -> {out}")
    return 0


def cli_dispatch(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            parse_config_file(args.config)
            print(f"{args.config}: ok")
            return 0
        if args.command == "fit":
            return _cmd_fit(args)

        cfg = _load_config(args)
        if args.command == "run" and args.stream:
            v_max, j_max = simulate(cfg.params, 0)
            print("t,v_max,j_max")
            for t in range(len(v_max)):
                print(f"{t + 1},{float(v_max[t])!r},{int(j_max[t]) + 1}")
        artifacts = run_experiment(cfg)
        for name in sorted(artifacts):
            print(f"wrote {artifacts[name]}", file=sys.stderr)
        return 0
    except MonetaError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
