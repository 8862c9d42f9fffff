"""Explicit point configurations with provable shattering behavior.

Cyclic polytope vertices give the deterministic witness that 2k dimensions
suffice for top-k shattering by linear functionals; sphere lifting and radial
projection carry linear witnesses to the cosine setting; tangent balls carry
hyperplane witnesses to the euclidean setting; Gaussian sampling gives the
probabilistic configurations used for centroid shattering at log(m) scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PointSet, SubsetQuery
from .exceptions import DomainError, UsageError
from .validation import check_points, check_positive_int, check_vector


@dataclass(frozen=True)
class Hyperplane:
    """Affine separator f(x) = <normal, x> - offset.

    Positive side means f(x) > 0. Witnesses produced by the verifier are
    normalized so f >= 1 on the inside set and f <= -1 outside.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = check_vector(self.normal, name="normal").copy()
        if not np.any(n != 0.0):
            raise UsageError("hyperplane normal must be nonzero")
        n.setflags(write=False)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    def evaluate(self, x) -> float:
        return float(self.normal @ np.asarray(x, dtype=np.float64)) - self.offset


@dataclass(frozen=True)
class BallWitness:
    """Closed ball that contains the subset and excludes everything else."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = check_vector(self.center, name="center").copy()
        c.setflags(write=False)
        r = float(self.radius)
        if not np.isfinite(r) or r <= 0.0:
            raise UsageError(f"ball radius must be finite and positive, got {r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    def contains(self, x) -> bool:
        return float(np.linalg.norm(np.asarray(x, dtype=np.float64) - self.center)) <= self.radius


def moment_curve_point(t: float, d: int) -> np.ndarray:
    """Point (t, t^2, ..., t^d) on the moment curve in R^d.

    The classical curve carries a leading constant coordinate; it is dropped
    here because it only shifts the affine offset of any separator, and
    dropping it keeps the ambient dimension literally d.
    """
    d = check_positive_int(d, name="d")
    t = float(t)
    return np.power(t, np.arange(1, d + 1, dtype=np.float64))


def cyclic_config(m: int, d: int) -> PointSet:
    """m cyclic-polytope vertices in R^d: moment-curve points at t_i = i/(m+1).

    The parameters are equally spaced in (0, 1) for reproducibility. For
    d = 2k the vertex set is k-neighborly, so every subset of at most k
    vertices is strictly linearly separable from the rest. Conditioning of
    the high powers degrades for large d; intended for desk scale (d <= 12).
    """
    m = check_positive_int(m, name="m")
    d = check_positive_int(d, name="d")
    ts = np.arange(1, m + 1, dtype=np.float64) / (m + 1)
    pts = np.power(ts[:, None], np.arange(1, d + 1, dtype=np.float64)[None, :])
    return PointSet(pts)


def radial_project(X: PointSet | np.ndarray) -> PointSet:
    """Map every point to x / |x| on the unit sphere. Zero points are rejected."""
    pts = check_points(X)
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0.0):
        raise DomainError("radial projection is undefined for zero points")
    return PointSet(pts / norms[:, None])


def sphere_lift(X: PointSet | np.ndarray) -> PointSet:
    """Append a 1 coordinate and normalize: x -> (x, 1) / |(x, 1)|.

    Output points are unit vectors in R^(d+1) with strictly positive last
    coordinate. Affine separations of X become homogeneous separations of
    the lift, which is what carries linear shattering to cosine shattering.
    """
    pts = check_points(X)
    lifted = np.hstack([pts, np.ones((pts.shape[0], 1))])
    norms = np.linalg.norm(lifted, axis=1)
    return PointSet(lifted / norms[:, None])


def ball_from_hyperplane(
    X: PointSet | np.ndarray,
    S: SubsetQuery,
    H: Hyperplane,
    *,
    slack: float = 1e-6,
) -> BallWitness:
    """Turn a strict hyperplane separator into a ball witness for the same split.

    Requires H to put every point of S strictly on the positive side and the
    rest strictly on the negative side. The ball is centered on the inward
    normal through the foot a0 of the subset centroid, with the closed-form
    radius r = max_{x in S} |x - a0|^2 / (2 <x - a0, n>) inflated by
    ``slack`` so containment is strict in floating point. Points behind the
    hyperplane can never enter the ball because it stays on the positive side.
    """
    pts = check_points(X)
    idx = list(S.validate_against(pts.shape[0]))
    outside = [i for i in range(pts.shape[0]) if i not in set(idx)]
    normal = H.normal
    if normal.shape[0] != pts.shape[1]:
        raise UsageError("hyperplane dimension does not match point set")
    nrm = float(np.linalg.norm(normal))
    n_hat = normal / nrm
    gaps = pts @ normal - H.offset
    if np.any(gaps[idx] <= 0.0):
        raise UsageError("hyperplane does not put the subset strictly on its positive side")
    if outside and np.any(gaps[outside] >= 0.0):
        raise UsageError("hyperplane does not strictly separate the subset from the rest")

    c_s = pts[idx].mean(axis=0)
    a0 = c_s - (float(c_s @ normal) - H.offset) / (nrm * nrm) * normal
    diffs = pts[idx] - a0
    g = diffs @ n_hat  # strictly positive: equals gaps / |normal| shifted to a0
    # each term is >= g/2 > 0, so r is strictly positive
    r = float(np.max(np.sum(diffs * diffs, axis=1) / (2.0 * g)))
    r *= 1.0 + slack
    center = a0 + r * n_hat
    return BallWitness(center=center, radius=r)


def gaussian_config(m: int, n: int, seed: int) -> PointSet:
    """m points in R^n with i.i.d. N(0, 1/n) coordinates, deterministic in seed.

    Each point has expected squared norm 1, so pairwise inner products
    concentrate near zero as n grows.
    """
    m = check_positive_int(m, name="m")
    n = check_positive_int(n, name="n")
    rng = np.random.default_rng(int(seed))
    pts = rng.normal(loc=0.0, scale=1.0 / np.sqrt(n), size=(m, n))
    return PointSet(pts)
