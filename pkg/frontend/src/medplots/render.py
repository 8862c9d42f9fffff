"""Render sweep-results CSVs into the two standard figures.

The results CSV is the only interface to the experiment pipeline: columns
m,k,scoring,critical_dim,seeds_tried,wall_time_s with optional leading '#'
comment lines. Two chart kinds are supported:

* critical-m-vs-d: universe size against the dimension that accommodated it,
  optionally overlaid with the published cubic baseline curve.
* critical-d-vs-logm: critical dimension against universe size on a log x
  axis, optionally overlaid with the least-squares log-linear fit.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = ("m", "k", "scoring", "critical_dim", "seeds_tried", "wall_time_s")

KINDS = ("critical-m-vs-d", "critical-d-vs-logm")

BASELINE_LABEL = "free-embedding baseline (cubic)"


class SchemaError(ValueError):
    """The input CSV does not match the results schema."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    kind: str
    output: Path
    overlay_baseline: bool = False
    overlay_fit: bool = False
    fit_json: Path | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def baseline_curve(d: np.ndarray | float):
    """Published cubic fit of critical universe size against dimension."""
    d = np.asarray(d, dtype=np.float64)
    return -10.5322 + 4.0309 * d + 0.0520 * d**2 + 0.0037 * d**3


def read_results(path: Path) -> list[dict]:
    """Parse the results CSV, skipping comment lines; validates the header."""
    with Path(path).open() as fp:
        lines = [ln for ln in fp if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise SchemaError(f"{path}: no data (empty results file)")
    reader = csv.reader(lines)
    header = tuple(next(reader))
    if header != EXPECTED_COLUMNS:
        missing = [c for c in EXPECTED_COLUMNS if c not in header]
        raise SchemaError(
            f"{path}: unexpected columns {list(header)}; expected {list(EXPECTED_COLUMNS)}"
            + (f" (missing {missing})" if missing else "")
        )
    rows = []
    for raw in reader:
        if not raw:
            continue
        rows.append(
            {
                "m": int(raw[0]),
                "k": int(raw[1]),
                "scoring": raw[2],
                "critical_dim": None if raw[3] == "not-found" else float(raw[3]),
            }
        )
    found = [r for r in rows if r["critical_dim"] is not None]
    if not found:
        raise SchemaError(f"{path}: no rows with a found critical dimension")
    return found


def fit_log_linear(ms: np.ndarray, dims: np.ndarray) -> tuple[float, float]:
    """OLS coefficients (a, b) of d = a + b*ln m."""
    x = np.log(ms)
    b, a = np.polyfit(x, dims, 1)
    return float(a), float(b)


def _load_fit_coefficients(spec: FigureSpec, ms: np.ndarray, dims: np.ndarray) -> tuple[float, float]:
    if spec.fit_json is not None:
        payload = json.loads(Path(spec.fit_json).read_text())
        return float(payload["a"]), float(payload["b"])
    return fit_log_linear(ms, dims)


def _invert_baseline(m: float) -> float:
    """Dimension at which the baseline curve reaches a given universe size."""
    lo, hi = 0.0, 1.0
    while baseline_curve(hi) < m:
        hi *= 2.0
        if hi > 1e6:
            return math.inf
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if baseline_curve(mid) < m:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def render(spec: FigureSpec):
    """Render the figure described by ``spec``; returns the matplotlib figure.

    The output file is written only after the input passes schema validation,
    so a failed render leaves nothing behind.
    """
    rows = read_results(spec.input_csv)
    ms = np.array([r["m"] for r in rows], dtype=np.float64)
    dims = np.array([r["critical_dim"] for r in rows], dtype=np.float64)
    k_values = sorted({r["k"] for r in rows})
    k_label = ",".join(str(k) for k in k_values)

    fig, ax = plt.subplots(figsize=(8, 6))
    if spec.kind == "critical-m-vs-d":
        ax.plot(dims, ms, marker="o", linestyle="-", label=f"centroid simulation (k={k_label})")
        if spec.overlay_baseline:
            d_grid = np.linspace(float(dims.min()), float(dims.max()), 200)
            ax.plot(d_grid, baseline_curve(d_grid), linestyle="--", label=BASELINE_LABEL)
        ax.set_xlabel("dimension d")
        ax.set_ylabel("critical number of points m")
    else:
        ax.plot(ms, dims, marker="o", linestyle="-", label=f"centroid simulation (k={k_label})")
        if spec.overlay_fit:
            a, b = _load_fit_coefficients(spec, ms, dims)
            m_grid = np.geomspace(float(ms.min()), float(ms.max()), 200)
            ax.plot(m_grid, a + b * np.log(m_grid), linestyle="--", label=f"fit: d = {a:.3f} + {b:.3f} ln m")
        if spec.overlay_baseline:
            m_grid = np.geomspace(float(ms.min()), float(ms.max()), 200)
            ax.plot(m_grid, [_invert_baseline(m) for m in m_grid], linestyle=":", label=BASELINE_LABEL)
        ax.set_xscale("log")
        ax.set_xlabel("number of points m (log scale)")
        ax.set_ylabel("critical dimension d")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.output)
    plt.close(fig)
    return fig
