"""Critical-dimension and critical-size searches with persistent results.

A probe at (m, k, dim) trains embeddings and counts as a success only when
the optimizer reaches zero violations AND the strict verifier confirms the
final embeddings; optimization failure alone never proves non-embeddability,
so each probed dimension may retry a few seeds. Searches follow the windowed
binary-search protocol, threading the previous critical dimension forward as
the next window base.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .core import Scoring
from .exceptions import UsageError
from .optimizer import TrainConfig, TrainState, train
from .seeding import task_seed
from .verifier import verify_k_centroid_shatter

log = logging.getLogger("medlab.harness")

DEFAULT_WINDOW = 40
DEFAULT_RETRIES = 3

RESULTS_COLUMNS = ("m", "k", "scoring", "critical_dim", "seeds_tried", "wall_time_s")


@dataclass
class CriticalRecord:
    """One critical-dimension search result for a universe size m."""

    m: int
    k: int
    scoring: Scoring
    critical_dim: int | None
    search_trace: list[tuple[int, int]] = field(default_factory=list)
    seeds_tried: list[int] = field(default_factory=list)
    wall_time: float = 0.0


@dataclass
class CriticalSizeRecord:
    """One critical-size search result for a fixed dimension."""

    dim: int
    k: int
    scoring: Scoring
    critical_m: int
    search_trace: list[tuple[int, int]] = field(default_factory=list)
    seeds_tried: list[int] = field(default_factory=list)
    wall_time: float = 0.0
    censored: bool = False  # doubling hit the cap without seeing a failure


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of critical dimension against ln m."""

    a: float
    b: float
    r_squared: float
    model: str = "d = a + b*ln m"
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "r_squared": self.r_squared,
            "model": self.model,
            "degenerate": self.degenerate,
        }


def _probe(m: int, k: int, dim: int, budget: TrainConfig, seeds: Sequence[int]) -> tuple[bool, int, TrainState | None]:
    """Train at (m, k, dim) over retry seeds; success needs verifier sign-off.

    Returns (success, best_min_violations, winning_state).
    """
    best = math.inf
    for seed in seeds:
        cfg = replace(budget, m=m, k=k, dim=dim, seed=seed)
        state = train(cfg)
        best = min(best, state.min_violations)
        if state.min_violations == 0 and state.stopped_reason == "zero-violations":
            report = verify_k_centroid_shatter(
                state.embeddings, k, cfg.scoring, "exact" if cfg.exact_size else "atmost"
            )
            if report.passed:
                return True, 0, state
            # boundary tie: the optimizer saw no violation but the strict
            # verifier did not confirm; count the retry as a failure
    return False, int(best), None


def find_critical_dim(
    m: int,
    k: int,
    window_hint: int = DEFAULT_WINDOW,
    budget: TrainConfig | None = None,
    *,
    prev_critical: int = 0,
    retries: int = DEFAULT_RETRIES,
    seed: int = 0,
    full_window: bool = False,
) -> CriticalRecord:
    """Binary-search the smallest dimension whose probe succeeds.

    The window is [prev_critical + 1, prev_critical + window_hint], or [1, m]
    with ``full_window``. Probes are not guaranteed monotone (optimization is
    stochastic); the search simply follows the success/failure outcomes. If
    nothing in the window succeeds the record carries critical_dim=None.
    """
    if m < k or k < 1:
        raise UsageError(f"need m >= k >= 1, got m={m}, k={k}")
    budget = budget if budget is not None else TrainConfig(m=m, k=k, dim=1)
    t0 = time.perf_counter()
    lo = 1 if full_window else prev_critical + 1
    hi = m if full_window else prev_critical + window_hint
    trace: list[tuple[int, int]] = []
    seeds_tried: list[int] = []
    critical: int | None = None
    while lo <= hi:
        mid = max(1, (lo + hi) // 2)
        probe_seeds = [task_seed(seed, m, mid, r) for r in range(retries)]
        seeds_tried.extend(probe_seeds)
        success, best_viol, _ = _probe(m, k, mid, budget, probe_seeds)
        trace.append((mid, best_viol))
        if success:
            critical = mid
            hi = mid - 1
        else:
            lo = mid + 1
    return CriticalRecord(
        m=m,
        k=k,
        scoring=budget.scoring,
        critical_dim=critical,
        search_trace=trace,
        seeds_tried=seeds_tried,
        wall_time=time.perf_counter() - t0,
    )


def find_critical_m(
    dim: int,
    k: int,
    budget: TrainConfig | None = None,
    *,
    retries: int = DEFAULT_RETRIES,
    seed: int = 0,
    m_cap: int = 512,
) -> CriticalSizeRecord:
    """Largest universe size accommodated in ``dim``: doubling then bisection.

    Doubles m from k+1 until the first failing probe (or ``m_cap``), then
    bisects between the last success and the first failure. Failure at the
    very first size yields the degenerate floor critical_m = k. If the cap is
    reached with no failure the result is a censored lower bound.
    """
    if dim < 1 or k < 1:
        raise UsageError(f"need dim >= 1 and k >= 1, got dim={dim}, k={k}")
    budget = budget if budget is not None else TrainConfig(m=k + 1, k=k, dim=dim)
    t0 = time.perf_counter()
    trace: list[tuple[int, int]] = []
    seeds_tried: list[int] = []

    def probe(m: int) -> bool:
        probe_seeds = [task_seed(seed, dim, m, r) for r in range(retries)]
        seeds_tried.extend(probe_seeds)
        success, best_viol, _ = _probe(m, k, dim, budget, probe_seeds)
        trace.append((m, best_viol))
        return success

    def done(critical: int, censored: bool = False) -> CriticalSizeRecord:
        return CriticalSizeRecord(
            dim=dim,
            k=k,
            scoring=budget.scoring,
            critical_m=critical,
            search_trace=trace,
            seeds_tried=seeds_tried,
            wall_time=time.perf_counter() - t0,
            censored=censored,
        )

    m = k + 1
    if not probe(m):
        return done(k)
    last_success = m
    while True:
        m = 2 * last_success
        if m > m_cap:
            return done(last_success, censored=True)
        if not probe(m):
            break
        last_success = m
    lo, hi = last_success, m  # lo succeeded, hi failed
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(mid):
            lo = mid
        else:
            hi = mid
    return done(lo)


def baseline_curve(d: float) -> float:
    """Published cubic fit for the critical universe size of free-embedding search."""
    if d < 0:
        raise UsageError(f"d must be nonnegative, got {d}")
    return -10.5322 + 4.0309 * d + 0.0520 * d**2 + 0.0037 * d**3


def fit_log_linear(records: Iterable[CriticalRecord]) -> FitResult:
    """Ordinary least squares of critical_dim against ln m over found records."""
    pts = [(r.m, r.critical_dim) for r in records if r.critical_dim is not None]
    if len(pts) < 3:
        raise UsageError(f"need at least 3 records with a found critical dimension, got {len(pts)}")
    x = np.log([m for m, _ in pts])
    y = np.array([d for _, d in pts], dtype=np.float64)
    var_y = float(np.sum((y - y.mean()) ** 2))
    if var_y == 0.0:
        return FitResult(a=float(y[0]), b=0.0, r_squared=0.0, degenerate=True)
    b, a = np.polyfit(x, y, 1)
    resid = y - (a + b * x)
    r2 = 1.0 - float(np.sum(resid**2)) / var_y
    return FitResult(a=float(a), b=float(b), r_squared=r2)


# --- persistence ------------------------------------------------------------


def _record_row(rec: CriticalRecord) -> list[str]:
    return [
        str(rec.m),
        str(rec.k),
        rec.scoring.value,
        "not-found" if rec.critical_dim is None else str(rec.critical_dim),
        ";".join(str(s) for s in rec.seeds_tried),
        f"{rec.wall_time:.3f}",
    ]


def append_record(path: Path, rec: CriticalRecord, *, manifest: dict | None = None) -> None:
    """Append one record, creating the file (manifest comment + header) if needed."""
    path = Path(path)
    new_file = not path.exists()
    with path.open("a", newline="") as fp:
        writer = csv.writer(fp)
        if new_file:
            if manifest is not None:
                fp.write("# " + json.dumps(manifest, sort_keys=True) + "\n")
            writer.writerow(RESULTS_COLUMNS)
        writer.writerow(_record_row(rec))
        fp.flush()


def read_records(source: Path | IO[str]) -> list[CriticalRecord]:
    """Read records back from a results CSV (search traces are not persisted)."""
    if hasattr(source, "read"):
        lines = [ln for ln in source if not ln.startswith("#")]
    else:
        with Path(source).open() as fp:
            lines = [ln for ln in fp if not ln.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise UsageError("results CSV is empty") from None
    if tuple(header) != RESULTS_COLUMNS:
        raise UsageError(f"unexpected results CSV columns {header!r}, expected {list(RESULTS_COLUMNS)}")
    records = []
    for row in reader:
        if not row:
            continue
        m, k, scoring, critical, seeds, wall = row
        records.append(
            CriticalRecord(
                m=int(m),
                k=int(k),
                scoring=Scoring.parse(scoring),
                critical_dim=None if critical == "not-found" else int(critical),
                seeds_tried=[int(s) for s in seeds.split(";") if s],
                wall_time=float(wall),
            )
        )
    return records


def sweep(
    k: int,
    m_values: Sequence[int],
    out_path: Path | None,
    budget: TrainConfig | None = None,
    *,
    window_hint: int = DEFAULT_WINDOW,
    retries: int = DEFAULT_RETRIES,
    seed: int = 0,
    full_window: bool = False,
    manifest: dict | None = None,
) -> list[CriticalRecord]:
    """Run find_critical_dim over increasing m, persisting after each record.

    The previous critical dimension seeds the next search window. If the
    output file already holds rows, those m values are skipped and the window
    threading resumes from the last recorded critical dimension, so an
    interrupted sweep picks up where it stopped.
    """
    if any(b <= a for a, b in zip(m_values, m_values[1:])):
        raise UsageError(f"m_values must be strictly increasing, got {list(m_values)}")
    done: list[CriticalRecord] = []
    prev_critical = 0
    if out_path is not None and Path(out_path).exists():
        done = read_records(out_path)
        for rec in done:
            if rec.critical_dim is not None:
                prev_critical = rec.critical_dim
    completed = {rec.m for rec in done}
    records = list(done)
    for m in m_values:
        if m in completed:
            continue
        rec = find_critical_dim(
            m,
            k,
            window_hint,
            budget,
            prev_critical=prev_critical,
            retries=retries,
            seed=seed,
            full_window=full_window,
        )
        records.append(rec)
        if out_path is not None:
            append_record(Path(out_path), rec, manifest=manifest)
        if rec.critical_dim is not None:
            if rec.critical_dim < prev_critical:
                # true critical dims are monotone in m; a drop means the
                # stochastic search got lucky late or unlucky earlier
                log.warning(
                    "anomaly: critical_dim %d at m=%d below previous %d",
                    rec.critical_dim,
                    rec.m,
                    prev_critical,
                )
            prev_critical = rec.critical_dim
    return records
