"""medplots: figure rendering for critical-dimension sweep results."""

__version__ = "0.1.0"

from .render import FigureSpec, SchemaError, baseline_curve, fit_log_linear, read_results, render

__all__ = [
    "FigureSpec",
    "SchemaError",
    "baseline_curve",
    "fit_log_linear",
    "read_results",
    "render",
]
