"""Input validation helpers.

Small sklearn-style checkers that coerce to float64 arrays and enforce the
package-wide invariants (finite coordinates, consistent dimensions, sorted
index lists). All public entry points funnel through these.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .exceptions import DomainError, UsageError


def check_points(X, *, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to an (m, d) float64 array of finite coordinates.

    Accepts anything array-like with two dimensions, or an object exposing a
    ``points`` attribute (a PointSet). The returned array is C-contiguous and
    may share memory with the input; callers that need ownership copy it.
    """
    if hasattr(X, "points") and not isinstance(X, np.ndarray):
        X = X.points
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise UsageError(f"{name} must be a 2-D array of shape (m, d), got ndim={arr.ndim}")
    m, d = arr.shape
    if m < 1 or d < 1:
        raise UsageError(f"{name} must contain at least one point of dimension >= 1, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DomainError(f"{name} contains non-finite coordinates")
    return np.ascontiguousarray(arr)


def check_vector(v, *, name: str = "v") -> np.ndarray:
    """Coerce ``v`` to a 1-D float64 array of finite values."""
    arr = np.asarray(v, dtype=np.float64).ravel()
    if arr.size < 1:
        raise UsageError(f"{name} must be a nonempty vector")
    if not np.isfinite(arr).all():
        raise DomainError(f"{name} contains non-finite values")
    return arr


def check_subset_indices(indices: Sequence[int], m: int) -> tuple[int, ...]:
    """Validate subset indices: unique, strictly increasing, within [0, m)."""
    idx = tuple(int(i) for i in indices)
    if len(idx) == 0:
        raise UsageError("subset must contain at least one index")
    if any(i < 0 or i >= m for i in idx):
        raise UsageError(f"subset indices must lie in [0, {m}), got {idx}")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise UsageError(f"subset indices must be strictly increasing, got {idx}")
    return idx


def check_positive_int(value: int, *, name: str, minimum: int = 1) -> int:
    """Validate an integer parameter with a lower bound."""
    iv = int(value)
    if iv != value or iv < minimum:
        raise UsageError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return iv
