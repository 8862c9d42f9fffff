import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from medlab.core import Scoring
from medlab.estimators import CentroidShatterEmbedder, ShatterVerifier
from medlab.verifier import verify_k_centroid_shatter, verify_k_shatter


def test_embedder_get_params_roundtrip():
    est = CentroidShatterEmbedder(k=3, dim=7, max_steps=50, seed=9)
    params = est.get_params()
    assert params["k"] == 3 and params["dim"] == 7
    cloned = clone(est)
    assert cloned.get_params() == params


def test_embedder_fit_from_integer_m():
    est = CentroidShatterEmbedder(k=2, dim=5, seed=0).fit(5)
    assert est.embeddings_.shape == (5, 5)
    assert est.min_violations_ == 0
    assert est.stopped_reason_ == "zero-violations"
    assert est.verify().passed
    assert est.score() == 1.0


def test_embedder_fit_from_array_initialization():
    rng = np.random.default_rng(0)
    X0 = rng.standard_normal((4, 6))
    est = CentroidShatterEmbedder(k=1, max_steps=200).fit(X0)
    assert est.embeddings_.shape == (4, 6)
    assert est.n_steps_ == len(est.violation_history_)


def test_embedder_requires_fit():
    with pytest.raises(NotFittedError):
        CentroidShatterEmbedder().verify()


def test_verifier_matches_functional_api():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((6, 6))
    est = ShatterVerifier(k=2, scoring="linear")
    assert est.predict(pts) == verify_k_shatter(pts, 2, Scoring.LINEAR).passed
    est_c = ShatterVerifier(k=2, scoring="l2", centroid=True)
    assert est_c.predict(pts) == verify_k_centroid_shatter(pts, 2, Scoring.EUCLIDEAN).passed


def test_verifier_is_cloneable_and_stateless():
    est = ShatterVerifier(k=3, scoring="cos", mode="exact")
    cloned = clone(est)
    assert cloned.get_params() == est.get_params()
    assert est.fit() is est
