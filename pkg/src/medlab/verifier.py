"""Exact verification of top-k shattering and centroid shattering.

Separability questions are decided by linear-program feasibility:

* linear: a subset S is separable iff the margin-1 system
  <w, x> - b >= 1 (x in S), <w, y> - b <= -1 (y outside) is feasible.
  Margin-1 is equivalent to strict separation because (w, b) can be scaled.
* cosine: points are radially projected to the unit sphere first; on the
  sphere a cosine threshold is an affine functional, so the linear check
  applies to the projected points.
* euclidean: a ball inequality |x - c|^2 <= r^2 is linear in the lifted
  coordinates (x, |x|^2), but the lifted weight on |x|^2 must be negative,
  otherwise the "witness" is an inverted ball (subset outside), which no
  distance functional realizes. The check therefore fixes that weight and
  maximizes the separation gap instead of testing unconstrained feasibility.

Every report aggregates all enumerated subsets in deterministic order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .constructions import BallWitness, Hyperplane, radial_project
from .core import PointSet, Scoring, SubsetQuery, count_subsets, enumerate_subsets
from .exceptions import DomainError, UsageError
from .validation import check_points, check_positive_int

DEFAULT_TOL = 1e-9

_FREE = (None, None)


@dataclass(frozen=True)
class SubsetFailure:
    """A subset that could not be separated, with the reason."""

    subset: SubsetQuery
    reason: str


@dataclass
class ShatterReport:
    """Outcome of a verification run over all enumerated subsets."""

    passed: bool
    total_subsets: int
    failures: list[SubsetFailure]
    witnesses: dict[tuple[int, ...], Hyperplane | BallWitness] | None
    margin_min: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "total_subsets": self.total_subsets,
            "failures": [
                {"indices": list(f.subset.indices), "reason": f.reason} for f in self.failures
            ],
            "margin_min": self.margin_min if math.isfinite(self.margin_min) else None,
        }


def _duplicate_across(pts: np.ndarray, inside: Sequence[int], outside: Sequence[int]) -> bool:
    for i in inside:
        for j in outside:
            if np.array_equal(pts[i], pts[j]):
                return True
    return False


def separable_linear(
    X: PointSet | np.ndarray,
    S: SubsetQuery | Sequence[int],
    *,
    tol: float = DEFAULT_TOL,
) -> Hyperplane | None:
    """Margin-1 separating hyperplane for S versus the rest, or None.

    A returned witness satisfies <w, x> - b >= 1 on S and <= -1 outside
    (up to solver tolerance). A duplicate point appearing on both sides makes
    the subset immediately inseparable.
    """
    witness, _ = _separate_linear(check_points(X), _as_indices(X, S), tol=tol)
    return witness


def _as_indices(X, S) -> tuple[int, ...]:
    pts = check_points(X)
    if isinstance(S, SubsetQuery):
        return S.validate_against(pts.shape[0])
    return SubsetQuery(tuple(sorted(int(i) for i in S))).validate_against(pts.shape[0])


def _separate_linear(pts: np.ndarray, inside: Sequence[int], *, tol: float) -> tuple[Hyperplane | None, str]:
    """Feasibility LP for the margin-1 system. Returns (witness, reason)."""
    m, d = pts.shape
    outside = [i for i in range(m) if i not in set(inside)]
    if not outside:
        w = np.ones(d)
        return Hyperplane(w, float(np.min(pts @ w)) - 1.0), "vacuous"
    if _duplicate_across(pts, inside, outside):
        return None, "duplicate"
    # variables z = (w, b); rows: -(<w,x> - b) <= -1 for S, <w,y> - b <= -1 outside
    rows_in = np.hstack([-pts[list(inside)], np.ones((len(inside), 1))])
    rows_out = np.hstack([pts[outside], -np.ones((len(outside), 1))])
    a_ub = np.vstack([rows_in, rows_out])
    b_ub = -np.ones(a_ub.shape[0])
    res = linprog(
        c=np.zeros(d + 1),
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[_FREE] * (d + 1),
        method="highs",
        options={"primal_feasibility_tolerance": tol},
    )
    if res.status == 2:
        return None, "inseparable"
    if res.status != 0:
        raise RuntimeError(f"LP solver failed with status {res.status}: {res.message}")
    w = res.x[:d]
    b = float(res.x[d])
    return Hyperplane(normal=w, offset=b), "separable"


def _separate_ball(pts: np.ndarray, inside: Sequence[int], *, tol: float) -> tuple[BallWitness | None, float, str]:
    """Gap-maximizing LP deciding whether some ball contains S and nothing else.

    Variables (u, b, gamma) with the ball encoded as <u, x> - |x|^2 - b >= gamma
    inside and <= -gamma outside; gamma is capped at 1 so the LP stays bounded.
    Separable iff the optimal gamma exceeds the tolerance. The recovered ball
    has center u/2 and squared radius |u|^2/4 - b, leaving a two-sided gap of
    gamma in squared distance.
    """
    m, d = pts.shape
    outside = [i for i in range(m) if i not in set(inside)]
    if not outside:
        return BallWitness(np.zeros(d), float(np.max(np.linalg.norm(pts, axis=1)) + 1.0)), math.inf, "vacuous"
    if _duplicate_across(pts, inside, outside):
        return None, 0.0, "duplicate"
    sq = np.sum(pts * pts, axis=1)
    rows_in = np.hstack([-pts[list(inside)], np.ones((len(inside), 1)), np.ones((len(inside), 1))])
    rhs_in = -sq[list(inside)]
    rows_out = np.hstack([pts[outside], -np.ones((len(outside), 1)), np.ones((len(outside), 1))])
    rhs_out = sq[outside]
    c = np.zeros(d + 2)
    c[-1] = -1.0  # maximize gamma
    res = linprog(
        c=c,
        A_ub=np.vstack([rows_in, rows_out]),
        b_ub=np.concatenate([rhs_in, rhs_out]),
        bounds=[_FREE] * (d + 1) + [(None, 1.0)],
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"LP solver failed with status {res.status}: {res.message}")
    u = res.x[:d]
    b = float(res.x[d])
    gamma = float(res.x[d + 1])
    if gamma <= tol:
        return None, gamma, "tie" if abs(gamma) <= tol else "inseparable"
    center = u / 2.0
    r_sq = float(center @ center) - b
    return BallWitness(center=center, radius=math.sqrt(max(r_sq, 0.0))), gamma, "separable"


def _witness_margin_linear(pts: np.ndarray, inside: Sequence[int], outside: Sequence[int], h: Hyperplane) -> float:
    vals = pts @ h.normal - h.offset
    return float(min(np.min(vals[list(inside)]), np.min(-vals[outside])))


def _check_subset_linear(pts, idx, tol):
    inside = list(idx)
    outside = [i for i in range(pts.shape[0]) if i not in set(inside)]
    witness, reason = _separate_linear(pts, inside, tol=tol)
    if witness is None:
        return None, None, reason
    if not outside:
        return witness, math.inf, reason
    return witness, _witness_margin_linear(pts, inside, outside, witness), reason


def _check_subset_ball(pts, idx, tol):
    witness, gamma, reason = _separate_ball(pts, list(idx), tol=tol)
    return witness, (gamma if witness is not None else None), reason


def _subset_batch(args):
    pts, subsets, scoring_value, tol = args
    scoring = Scoring(scoring_value)
    out = []
    for idx in subsets:
        if scoring is Scoring.EUCLIDEAN:
            out.append(_check_subset_ball(pts, idx, tol))
        else:
            out.append(_check_subset_linear(pts, idx, tol))
    return out


def verify_k_shatter(
    X: PointSet | np.ndarray,
    k: int,
    s: Scoring,
    mode: str = "atmost",
    *,
    tol: float = DEFAULT_TOL,
    collect_witnesses: bool = True,
    jobs: int = 1,
) -> ShatterReport:
    """Check that every subset of size <= k (or == k) admits a separating functional.

    ``mode`` is "atmost" or "exact". Cosine verification requires nonzero
    points (they are radially projected first). Witnesses are hyperplanes for
    linear/cosine and balls for euclidean.
    """
    pts = check_points(X)
    m = pts.shape[0]
    k = check_positive_int(k, name="k")
    if k > m:
        raise UsageError(f"k must satisfy 1 <= k <= m, got k={k}, m={m}")
    exact = _parse_mode(mode)
    if s is Scoring.COSINE:
        pts = check_points(radial_project(pts))

    subsets = [q.indices for q in enumerate_subsets(m, k, exact_size=exact)]
    total = count_subsets(m, k, exact_size=exact)

    if jobs > 1 and len(subsets) > 1:
        chunks = _chunk(subsets, jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_subset_batch, [(pts, ch, s.value, tol) for ch in chunks]))
        results = [r for part in parts for r in part]
    else:
        results = _subset_batch((pts, subsets, s.value, tol))

    failures: list[SubsetFailure] = []
    witnesses: dict[tuple[int, ...], Hyperplane | BallWitness] = {}
    margin_min = math.inf
    for idx, (witness, margin, reason) in zip(subsets, results):
        if witness is None:
            failures.append(SubsetFailure(SubsetQuery(idx), reason))
            continue
        if collect_witnesses:
            witnesses[idx] = witness
        if margin is not None and math.isfinite(margin):
            margin_min = min(margin_min, margin)
    return ShatterReport(
        passed=not failures,
        total_subsets=total,
        failures=failures,
        witnesses=witnesses if collect_witnesses else None,
        margin_min=margin_min,
    )


def verify_k_centroid_shatter(
    X: PointSet | np.ndarray,
    k: int,
    s: Scoring,
    mode: str = "atmost",
    *,
    tol: float = DEFAULT_TOL,
) -> ShatterReport:
    """Check that scoring against each subset's centroid ranks members first.

    For each subset S the query vector is fixed to the centroid c_S; the
    subset passes iff min over members of score(x, c_S) beats max over
    non-members by more than ``tol``. Exact ties are failures ("tie"), and a
    zero centroid under cosine fails that subset ("zero-centroid").
    """
    pts = check_points(X)
    m = pts.shape[0]
    k = check_positive_int(k, name="k")
    if k > m:
        raise UsageError(f"k must satisfy 1 <= k <= m, got k={k}, m={m}")
    exact = _parse_mode(mode)
    norms = np.linalg.norm(pts, axis=1)
    if s is Scoring.COSINE and np.any(norms == 0.0):
        raise DomainError("cosine centroid verification requires nonzero points")

    failures: list[SubsetFailure] = []
    margin_min = math.inf
    total = count_subsets(m, k, exact_size=exact)
    for q in enumerate_subsets(m, k, exact_size=exact):
        inside = list(q.indices)
        outside = [i for i in range(m) if i not in set(inside)]
        if not outside:
            continue
        c = pts[inside].mean(axis=0)
        if s is Scoring.LINEAR:
            scores = pts @ c
        elif s is Scoring.COSINE:
            c_norm = float(np.linalg.norm(c))
            if c_norm == 0.0:
                failures.append(SubsetFailure(q, "zero-centroid"))
                continue
            scores = (pts @ c) / (norms * c_norm)
        else:
            scores = -np.linalg.norm(pts - c[None, :], axis=1)
        margin = float(np.min(scores[inside]) - np.max(scores[outside]))
        if margin > tol:
            margin_min = min(margin_min, margin)
        elif abs(margin) <= tol:
            failures.append(SubsetFailure(q, "tie"))
        else:
            failures.append(SubsetFailure(q, "outscored"))
    return ShatterReport(
        passed=not failures,
        total_subsets=total,
        failures=failures,
        witnesses=None,
        margin_min=margin_min,
    )


def _parse_mode(mode: str) -> bool:
    key = str(mode).strip().lower().replace("-", "").replace("_", "")
    if key in ("atmost", "atmostk"):
        return False
    if key in ("exact", "exactly", "exactlyk", "exactk"):
        return True
    raise UsageError(f"unknown mode {mode!r}; expected 'atmost' or 'exact'")


def _chunk(items: list, n: int) -> list[list]:
    size = max(1, math.ceil(len(items) / n))
    return [items[i : i + size] for i in range(0, len(items), size)]
