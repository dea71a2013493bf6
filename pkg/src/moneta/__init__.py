"""moneta: agent-based commodity-exchange market with emergent money.

Deterministic, ensemble-capable simulator plus the observables needed to
study money strength, money switching and heavy-tailed money lifetimes.
"""

__version__ = "0.1.0"

from .model import (
    MarketState,
    MonetaError,
    Params,
    ParamsError,
    StrengthRecord,
    init_state,
    validate_params,
)
from .rng import RandomStream, mix_seed
from .dynamics import (
    ABOVE_THRESHOLD_GROWTH,
    SUB_THRESHOLD_GROWTH,
    VIEW_CONCENTRATION,
    RealizationSummary,
    TransactionOutcome,
    execute_transaction,
    normalize_views,
    run_realization,
    run_turn,
    select_offer,
    want_set,
)
from .observables import (
    LifetimeSample,
    SwitchRecord,
    commodity_strength,
    detect_switches,
    filter_lifetimes,
    lifetimes_from_switches,
    money_strength,
)
from .stats import (
    EnsembleCurve,
    FitError,
    LogHistogram,
    PowerLawFit,
    ensemble_mean_series,
    fit_power_law,
    fit_power_law_mle,
    log_binned_pdf,
    threshold_sweep,
)
from .config import ConfigError, ExperimentConfig, parse_config, parse_config_file
from .runner import RunError, run_experiment

__all__ = [
    "MarketState",
    "MonetaError",
    "Params",
    "ParamsError",
    "StrengthRecord",
    "init_state",
    "validate_params",
    "RandomStream",
    "mix_seed",
    "ABOVE_THRESHOLD_GROWTH",
    "SUB_THRESHOLD_GROWTH",
    "VIEW_CONCENTRATION",
    "RealizationSummary",
    "TransactionOutcome",
    "execute_transaction",
    "normalize_views",
    "run_realization",
    "run_turn",
    "select_offer",
    "want_set",
    "LifetimeSample",
    "SwitchRecord",
    "commodity_strength",
    "detect_switches",
    "filter_lifetimes",
    "lifetimes_from_switches",
    "money_strength",
    "EnsembleCurve",
    "FitError",
    "LogHistogram",
    "PowerLawFit",
    "ensemble_mean_series",
    "fit_power_law",
    "fit_power_law_mle",
    "log_binned_pdf",
    "threshold_sweep",
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "parse_config_file",
    "RunError",
    "run_experiment",
]
