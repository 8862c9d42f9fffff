"""Scikit-learn style wrappers around the optimizer and the verifier.

These expose the package's two central algorithms through the familiar
param-storing ``__init__`` / ``fit`` / trailing-underscore-attribute
conventions, so they compose with pipelines, ``clone``, and grid search.
The functional APIs in :mod:`medlab.optimizer` and :mod:`medlab.verifier`
remain the primitive layer.
"""

from __future__ import annotations

import numbers

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .core import Scoring
from .optimizer import TrainConfig, train
from .validation import check_points
from .verifier import ShatterReport, verify_k_centroid_shatter, verify_k_shatter


class CentroidShatterEmbedder(BaseEstimator):
    """Learn m embeddings whose subset centroids rank members above outsiders.

    fit(X) accepts either an integer m (embeddings start from a seeded
    standard-normal draw) or an (m, dim) array whose shape fixes m and dim.
    After fitting, ``embeddings_`` holds the final configuration and
    ``min_violations_`` tells whether it centroid-shatters (0 means yes,
    confirmed via ``verify()``).
    """

    def __init__(
        self,
        k: int = 2,
        dim: int = 2,
        max_steps: int = 1000,
        base_lr: float = 1.0,
        patience: int | None = None,
        seed: int = 0,
        exact_size: bool = True,
    ):
        self.k = k
        self.dim = dim
        self.max_steps = max_steps
        self.base_lr = base_lr
        self.patience = patience
        self.seed = seed
        self.exact_size = exact_size

    def fit(self, X, y=None):
        if isinstance(X, numbers.Integral):
            m, dim = int(X), self.dim
        else:
            arr = check_points(X, name="X")
            m, dim = arr.shape
        cfg = TrainConfig(
            m=m,
            k=self.k,
            dim=dim,
            max_steps=self.max_steps,
            base_lr=self.base_lr,
            patience=self.patience,
            seed=self.seed,
            exact_size=self.exact_size,
        )
        state = train(cfg)
        self.state_ = state
        self.embeddings_ = state.embeddings
        self.min_violations_ = state.min_violations
        self.violation_history_ = list(state.violation_history)
        self.stopped_reason_ = state.stopped_reason
        self.n_steps_ = len(state.violation_history)
        return self

    def verify(self) -> ShatterReport:
        """Strict centroid-shattering check of the fitted embeddings."""
        self._check_fitted()
        mode = "exact" if self.exact_size else "atmost"
        return verify_k_centroid_shatter(self.embeddings_, self.k, Scoring.LINEAR, mode)

    def score(self, X=None, y=None) -> float:
        """Fraction of ranking pairs satisfied at the end of training."""
        self._check_fitted()
        from .optimizer import total_pair_count

        total = total_pair_count(self.embeddings_.shape[0], self.k, exact_size=self.exact_size)
        return 1.0 if total == 0 else 1.0 - self.min_violations_ / total

    def _check_fitted(self):
        if not hasattr(self, "embeddings_"):
            raise NotFittedError("call fit before using this estimator")


class ShatterVerifier(BaseEstimator):
    """Configured exact verifier for top-k shattering questions.

    ``verify(X)`` returns the full report; ``predict(X)`` just the verdict.
    """

    def __init__(
        self,
        k: int = 2,
        scoring: str = "linear",
        mode: str = "atmost",
        centroid: bool = False,
        tol: float = 1e-9,
        jobs: int = 1,
    ):
        self.k = k
        self.scoring = scoring
        self.mode = mode
        self.centroid = centroid
        self.tol = tol
        self.jobs = jobs

    def verify(self, X) -> ShatterReport:
        s = Scoring.parse(self.scoring)
        if self.centroid:
            return verify_k_centroid_shatter(X, self.k, s, self.mode, tol=self.tol)
        return verify_k_shatter(X, self.k, s, self.mode, tol=self.tol, jobs=self.jobs)

    def predict(self, X) -> bool:
        return self.verify(X).passed

    def fit(self, X=None, y=None):
        # stateless: nothing to learn, kept for pipeline compatibility
        return self
