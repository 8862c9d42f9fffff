"""Embedding optimization under the centroid hinge loss.

Trains m element embeddings so that, for every size-k subset, each member's
inner product with the subset centroid beats every non-member's. The loss,
its closed-form gradient, the Adam update, and the one-cycle schedule are all
implemented here directly so a training run is a deterministic function of
its config.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PointSet, Scoring
from .exceptions import UsageError
from .validation import check_points, check_positive_int

# cap on subsets processed per vectorized block, keeps peak memory bounded
_SUBSET_CHUNK = 8192


@dataclass
class TrainConfig:
    """Hyperparameters for one training run.

    The effective peak learning rate is base_lr / log2(m); the schedule
    anneals it to ~0 over max_steps. patience=None disables improvement-based
    stopping by setting it equal to max_steps.
    """

    m: int
    k: int
    dim: int
    scoring: Scoring = Scoring.LINEAR
    max_steps: int = 1000
    base_lr: float = 1.0
    patience: int | None = None
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    exact_size: bool = True

    def __post_init__(self):
        self.m = check_positive_int(self.m, name="m")
        self.k = check_positive_int(self.k, name="k")
        self.dim = check_positive_int(self.dim, name="dim")
        self.max_steps = check_positive_int(self.max_steps, name="max_steps")
        if self.k > self.m:
            raise UsageError(f"k must satisfy k <= m, got k={self.k}, m={self.m}")
        if self.base_lr <= 0:
            raise UsageError("base_lr must be positive")
        if not (0.0 < self.adam_beta1 < 1.0 and 0.0 < self.adam_beta2 < 1.0):
            raise UsageError("adam betas must lie strictly between 0 and 1")
        if self.scoring is not Scoring.LINEAR:
            raise UsageError("training supports the linear scoring only")
        if self.patience is None:
            self.patience = self.max_steps

    @property
    def lr_scale(self) -> float:
        return 1.0 / math.log2(self.m) if self.m > 1 else 1.0

    @property
    def max_lr(self) -> float:
        return self.base_lr * self.lr_scale


@dataclass
class TrainState:
    """Mutable state of a run: embeddings, Adam moments, and stop bookkeeping."""

    embeddings: np.ndarray
    adam_m: np.ndarray
    adam_v: np.ndarray
    step: int = 0
    min_violations: int = 0
    violation_history: list[int] = field(default_factory=list)
    stopped_reason: str | None = None
    final_loss: float = math.nan

    @property
    def pointset(self) -> PointSet:
        return PointSet(self.embeddings.copy())


@functools.lru_cache(maxsize=64)
def _size_groups(m: int, k: int, exact_size: bool) -> tuple[tuple[int, np.ndarray, np.ndarray], ...]:
    """Member/non-member index arrays per subset size, cached across steps."""
    groups = []
    sizes = (k,) if exact_size else range(1, k + 1)
    for j in sizes:
        in_idx = np.array(list(itertools.combinations(range(m), j)), dtype=np.intp).reshape(-1, j)
        mask = np.zeros((in_idx.shape[0], m), dtype=bool)
        np.put_along_axis(mask, in_idx, True, axis=1)
        out_idx = np.nonzero(~mask)[1].reshape(in_idx.shape[0], m - j)
        in_idx.setflags(write=False)
        out_idx.setflags(write=False)
        groups.append((j, in_idx, out_idx))
    return tuple(groups)


def total_pair_count(m: int, k: int, *, exact_size: bool = True) -> int:
    """Number of (member, non-member) pairs the loss ranges over."""
    sizes = (k,) if exact_size else range(1, k + 1)
    return sum(math.comb(m, j) * j * (m - j) for j in sizes)


def _loss_grad(pts: np.ndarray, k: int, exact_size: bool, want_grad: bool):
    m, d = pts.shape
    loss_sum = 0.0
    violations = 0
    n_subsets = 0
    grad = np.zeros((m, d)) if want_grad else None
    for j, in_idx_all, out_idx_all in _size_groups(m, k, exact_size):
        n_subsets += in_idx_all.shape[0]
        if j == m:
            continue  # no non-members, nothing to rank against
        for lo in range(0, in_idx_all.shape[0], _SUBSET_CHUNK):
            in_idx = in_idx_all[lo : lo + _SUBSET_CHUNK]
            out_idx = out_idx_all[lo : lo + _SUBSET_CHUNK]
            centroids = pts[in_idx].mean(axis=1)  # (N, d)
            dots = centroids @ pts.T  # (N, m)
            din = np.take_along_axis(dots, in_idx, axis=1)  # (N, j)
            dout = np.take_along_axis(dots, out_idx, axis=1)  # (N, m-j)
            margins = din[:, :, None] - dout[:, None, :]  # (N, j, m-j)
            active = margins < 0.0
            loss_sum += float(-margins[active].sum())
            violations += int(active.sum())
            if not want_grad or not active.any():
                continue
            # term = <y - x, c>; d/dy = c, d/dx = -c, plus (y - x)/j into every
            # member of the subset through the centroid. Contributions are
            # accumulated through dense per-subset weight matrices and matrix
            # products (elementwise scatter is far too slow at this fan-out).
            n_chunk = in_idx.shape[0]
            a_in = active.sum(axis=2).astype(np.float64)  # (N, j)
            a_out = active.sum(axis=1).astype(np.float64)  # (N, m-j)
            w_direct = np.zeros((n_chunk, m))
            np.put_along_axis(w_direct, out_idx, a_out, axis=1)
            np.put_along_axis(w_direct, in_idx, -a_in, axis=1)
            grad += w_direct.T @ centroids
            members = np.zeros((n_chunk, m))
            np.put_along_axis(members, in_idx, 1.0, axis=1)
            grad += members.T @ ((w_direct @ pts) / j)
    loss = loss_sum / n_subsets
    if want_grad:
        grad /= n_subsets
    return loss, violations, grad


def centroid_hinge_loss(X: PointSet | np.ndarray, k: int, *, exact_size: bool = True) -> tuple[float, int]:
    """Mean-over-subsets hinge loss and the count of strictly violated pairs.

    A pair (x in S, y outside S) contributes max(0, <y - x, c_S>) to its
    subset's sum and counts as a violation when <x - y, c_S> < 0. With k = m
    there are no pairs: loss 0, violations 0.
    """
    pts = check_points(X)
    k = check_positive_int(k, name="k")
    if k > pts.shape[0]:
        raise UsageError(f"k must satisfy k <= m, got k={k}, m={pts.shape[0]}")
    loss, violations, _ = _loss_grad(pts, k, exact_size, want_grad=False)
    return loss, violations


def centroid_hinge_grad(X: PointSet | np.ndarray, k: int, *, exact_size: bool = True) -> np.ndarray:
    """Closed-form gradient of :func:`centroid_hinge_loss` in the embeddings.

    For each active pair the non-member receives +c_S, the member -c_S, and
    every subset member additionally receives (y - x)/|S| from the centroid
    dependence; all contributions carry the 1/#subsets mean factor. The
    subgradient at exact hinge kinks is taken as 0.
    """
    pts = check_points(X)
    k = check_positive_int(k, name="k")
    if k > pts.shape[0]:
        raise UsageError(f"k must satisfy k <= m, got k={k}, m={pts.shape[0]}")
    _, _, grad = _loss_grad(pts, k, exact_size, want_grad=True)
    return grad


def one_cycle_lr(step: int, total: int, max_lr: float) -> float:
    """Cosine annealing from max_lr at step 0 toward ~0 at step total-1 (no warmup)."""
    total = check_positive_int(total, name="total")
    if not 0 <= step < total:
        raise UsageError(f"step must lie in [0, {total}), got {step}")
    return max_lr * 0.5 * (1.0 + math.cos(math.pi * step / total))


def adam_step(state: TrainState, grad: np.ndarray, lr: float, *, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> TrainState:
    """One Adam update with bias correction; mutates and returns ``state``."""
    if grad.shape != state.embeddings.shape:
        raise UsageError(f"gradient shape {grad.shape} does not match embeddings {state.embeddings.shape}")
    if not np.isfinite(grad).all():
        raise RuntimeError(f"non-finite gradient at step {state.step}; aborting")
    state.step += 1
    t = state.step
    state.adam_m *= beta1
    state.adam_m += (1.0 - beta1) * grad
    state.adam_v *= beta2
    state.adam_v += (1.0 - beta2) * (grad * grad)
    m_hat = state.adam_m / (1.0 - beta1**t)
    v_hat = state.adam_v / (1.0 - beta2**t)
    state.embeddings -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return state


def train(cfg: TrainConfig) -> TrainState:
    """Run the full optimization loop and return the final state.

    Embeddings start from a standard normal draw seeded by cfg.seed. Each
    step evaluates the loss on the current embeddings first and stops before
    updating when the violation count hits zero, so the returned embeddings
    are exactly the ones that achieved zero. Other stop causes: ``patience``
    steps without a new minimum, or ``max_steps``.
    """
    rng = np.random.default_rng(cfg.seed)
    emb = rng.standard_normal((cfg.m, cfg.dim))
    state = TrainState(
        embeddings=emb,
        adam_m=np.zeros_like(emb),
        adam_v=np.zeros_like(emb),
        min_violations=total_pair_count(cfg.m, cfg.k, exact_size=cfg.exact_size),
    )
    no_improve = 0
    for step in range(cfg.max_steps):
        loss, violations, grad = _loss_grad(state.embeddings, cfg.k, cfg.exact_size, want_grad=True)
        state.violation_history.append(violations)
        state.final_loss = loss
        if violations < state.min_violations:
            state.min_violations = violations
            no_improve = 0
        else:
            no_improve += 1
        if violations == 0:
            state.stopped_reason = "zero-violations"
            return state
        if no_improve >= cfg.patience:
            state.stopped_reason = "patience"
            return state
        lr = one_cycle_lr(step, cfg.max_steps, cfg.max_lr)
        adam_step(state, grad, lr, beta1=cfg.adam_beta1, beta2=cfg.adam_beta2, eps=cfg.adam_eps)
    state.stopped_reason = "max-steps"
    return state
