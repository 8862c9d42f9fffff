"""medlab: constructions, exact verification, and simulation for the
minimal embeddable dimension of top-k subset retrieval."""

__version__ = "0.1.0"

from .core import (
    BoundsTable,
    PointSet,
    Scoring,
    SubsetQuery,
    centroid,
    count_subsets,
    enumerate_subsets,
    load_pointset,
    med_bounds,
    save_pointset,
    score,
)
from .constructions import (
    BallWitness,
    Hyperplane,
    ball_from_hyperplane,
    cyclic_config,
    gaussian_config,
    moment_curve_point,
    radial_project,
    sphere_lift,
)
from .exceptions import DomainError, UsageError
from .verifier import ShatterReport, separable_linear, verify_k_centroid_shatter, verify_k_shatter
from .optimizer import (
    TrainConfig,
    TrainState,
    adam_step,
    centroid_hinge_grad,
    centroid_hinge_loss,
    one_cycle_lr,
    train,
)
from .harness import (
    CriticalRecord,
    CriticalSizeRecord,
    FitResult,
    baseline_curve,
    find_critical_dim,
    find_critical_m,
    fit_log_linear,
    read_records,
    sweep,
)
from .estimators import CentroidShatterEmbedder, ShatterVerifier

__all__ = [
    "BallWitness",
    "BoundsTable",
    "CentroidShatterEmbedder",
    "CriticalRecord",
    "CriticalSizeRecord",
    "DomainError",
    "FitResult",
    "Hyperplane",
    "PointSet",
    "Scoring",
    "ShatterReport",
    "ShatterVerifier",
    "SubsetQuery",
    "TrainConfig",
    "TrainState",
    "UsageError",
    "adam_step",
    "ball_from_hyperplane",
    "baseline_curve",
    "centroid",
    "centroid_hinge_grad",
    "centroid_hinge_loss",
    "count_subsets",
    "cyclic_config",
    "enumerate_subsets",
    "find_critical_dim",
    "find_critical_m",
    "fit_log_linear",
    "gaussian_config",
    "load_pointset",
    "med_bounds",
    "moment_curve_point",
    "one_cycle_lr",
    "radial_project",
    "read_records",
    "save_pointset",
    "score",
    "separable_linear",
    "sphere_lift",
    "sweep",
    "train",
    "verify_k_centroid_shatter",
    "verify_k_shatter",
]
