"""moneta-plots: renders figures from moneta's CSV/JSON artifacts.

This package never imports the simulator; it consumes only the on-disk
artifact schemas (strength_series.csv, strength_mean.csv, sweep.csv,
histogram.csv, fit.json).
"""

__version__ = "0.1.0"

from .figures import PlotError, fig1, fig2, fig3, fig4, render

__all__ = ["PlotError", "fig1", "fig2", "fig3", "fig4", "render"]
