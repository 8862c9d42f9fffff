"""Domain types, scoring functions, subset enumeration, and dimension bounds.

Everything downstream (constructions, verification, optimization, search)
builds on the types here. Scores are uniformly "larger is better": the
euclidean score is the negated distance so one comparison direction serves
all three scorings.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterator, Sequence

import numpy as np

from .exceptions import DomainError, UsageError
from .validation import check_points, check_positive_int, check_subset_indices, check_vector


class Scoring(Enum):
    """One of the three supported scoring functions."""

    LINEAR = "linear"
    COSINE = "cos"
    EUCLIDEAN = "l2"

    @classmethod
    def parse(cls, name: str) -> "Scoring":
        """Accept the CLI spellings linear / cos / l2 (plus common aliases)."""
        key = str(name).strip().lower()
        aliases = {
            "linear": cls.LINEAR,
            "inner": cls.LINEAR,
            "dot": cls.LINEAR,
            "cos": cls.COSINE,
            "cosine": cls.COSINE,
            "l2": cls.EUCLIDEAN,
            "euclidean": cls.EUCLIDEAN,
        }
        if key not in aliases:
            raise UsageError(f"unknown scoring {name!r}; expected one of linear, cos, l2")
        return aliases[key]


@dataclass(frozen=True)
class PointSet:
    """An ordered universe of m points in R^d.

    The wrapped array is float64, C-contiguous, read-only, and fully finite.
    Point order is stable: index i identifies element x_i.
    """

    points: np.ndarray

    def __post_init__(self):
        arr = check_points(self.points, name="points").copy()
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, i: int) -> np.ndarray:
        return self.points[i]


@dataclass(frozen=True)
class SubsetQuery:
    """A query asking for the elements at ``indices`` (sorted, unique)."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) == 0:
            raise UsageError("SubsetQuery must contain at least one index")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise UsageError(f"SubsetQuery indices must be strictly increasing, got {idx}")
        if idx[0] < 0:
            raise UsageError(f"SubsetQuery indices must be nonnegative, got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def size(self) -> int:
        return len(self.indices)

    def validate_against(self, m: int) -> tuple[int, ...]:
        return check_subset_indices(self.indices, m)

    def complement(self, m: int) -> tuple[int, ...]:
        inside = set(self.indices)
        return tuple(i for i in range(m) if i not in inside)


@dataclass(frozen=True)
class BoundsTable:
    """Lower/upper bounds on the minimal embeddable dimension for (k, scoring).

    The bounds do not depend on the universe size m.
    """

    lower: int
    upper: int
    scoring: Scoring
    k: int


def score(s: Scoring, x, w) -> float:
    """Score a point ``x`` against a query vector ``w``; larger is better.

    linear: <x, w>; cosine: <x, w> / (|x| |w|); euclidean: -|x - w|_2.
    """
    xv = check_vector(x, name="x")
    wv = check_vector(w, name="w")
    if xv.shape != wv.shape:
        raise UsageError(f"x and w must have the same dimension, got {xv.shape[0]} and {wv.shape[0]}")
    if s is Scoring.LINEAR:
        return float(xv @ wv)
    if s is Scoring.COSINE:
        nx = float(np.linalg.norm(xv))
        nw = float(np.linalg.norm(wv))
        if nx == 0.0 or nw == 0.0:
            raise DomainError("cosine score is undefined for zero vectors")
        return float(xv @ wv) / (nx * nw)
    return -float(np.linalg.norm(xv - wv))


def centroid(X: PointSet | np.ndarray, S: SubsetQuery | Sequence[int]) -> np.ndarray:
    """Mean of the points selected by ``S``."""
    pts = check_points(X)
    idx = S.validate_against(pts.shape[0]) if isinstance(S, SubsetQuery) else check_subset_indices(S, pts.shape[0])
    return pts[list(idx)].mean(axis=0)


def enumerate_subsets(m: int, k: int, *, exact_size: bool = False) -> Iterator[SubsetQuery]:
    """Yield subsets of {0..m-1}: sizes 1..k ascending, lexicographic within a size.

    With ``exact_size`` only the size-k subsets are produced. Total count is
    sum_{j=1..k} C(m, j), or C(m, k) in exact-size mode.
    """
    m = check_positive_int(m, name="m")
    k = check_positive_int(k, name="k")
    if k > m:
        raise UsageError(f"k must satisfy 1 <= k <= m, got k={k}, m={m}")
    sizes = (k,) if exact_size else range(1, k + 1)
    for j in sizes:
        for combo in itertools.combinations(range(m), j):
            yield SubsetQuery(combo)


def count_subsets(m: int, k: int, *, exact_size: bool = False) -> int:
    """Number of subsets enumerate_subsets will yield."""
    if exact_size:
        return math.comb(m, k)
    return sum(math.comb(m, j) for j in range(1, k + 1))


def med_bounds(k: int, s: Scoring) -> BoundsTable:
    """Tight dimension bounds for k-shattering: lower k-1; upper 2k (2k+1 for cosine)."""
    k = check_positive_int(k, name="k", minimum=2)
    upper = 2 * k + 1 if s is Scoring.COSINE else 2 * k
    return BoundsTable(lower=k - 1, upper=upper, scoring=s, k=k)


# --- PointSet CSV serialization -------------------------------------------
#
# Format: optional leading '#' comment lines, then a header "dim=<d>,count=<m>",
# then one point per row as plain decimal coordinates.

_HEADER_RE = re.compile(r"^dim=(\d+),count=(\d+)$")


def save_pointset(X: PointSet | np.ndarray, fp: IO[str], *, comments: Sequence[str] = ()) -> None:
    """Write a point set in the CSV interchange format.

    Coordinates are positional decimals (never scientific notation) with
    enough digits to round-trip the float64 value exactly.
    """
    pts = check_points(X)
    m, d = pts.shape
    for line in comments:
        fp.write(f"# {line}\n")
    fp.write(f"dim={d},count={m}\n")
    for row in pts:
        fp.write(",".join(np.format_float_positional(float(v), unique=True) for v in row))
        fp.write("\n")


def load_pointset(fp: IO[str]) -> PointSet:
    """Read a point set written by :func:`save_pointset`."""
    header = None
    rows: list[list[float]] = []
    for raw in fp:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            match = _HEADER_RE.match(line)
            if not match:
                raise UsageError(f"expected header 'dim=<d>,count=<m>', got {line!r}")
            header = (int(match.group(1)), int(match.group(2)))
            continue
        rows.append([float(tok) for tok in line.split(",")])
    if header is None:
        raise UsageError("point set file has no header line")
    d, m = header
    if len(rows) != m:
        raise UsageError(f"header promises {m} points but file has {len(rows)} rows")
    if any(len(r) != d for r in rows):
        raise UsageError(f"rows do not match header dimension {d}")
    return PointSet(np.array(rows, dtype=np.float64))
