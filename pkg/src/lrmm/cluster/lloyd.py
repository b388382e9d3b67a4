"""Lloyd iterations for matrix observations: low-rank, relaxed two-cluster, and vectorized."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..lowrank import truncated_svd, RANK_TOL
from ..metrics import clustering_error
from ..model import GroundTruth, as_labels
from ..tensor_core import Tensor3
from .kmeans import repair_empty

DEFAULT_T = 20


@dataclass
class LloydTrace:
    labels_per_iter: list = field(default_factory=list)
    error_per_iter: Optional[list] = None
    converged_at: Optional[int] = None

    @property
    def n_iter(self) -> int:
        return len(self.labels_per_iter)


@dataclass(frozen=True)
class LloydResult:
    labels: np.ndarray
    centers: np.ndarray  # (K, d1, d2) estimated centers used for the final relabel
    trace: LloydTrace

    def __iter__(self):
        return iter((self.labels, self.centers, self.trace))


def cluster_means(slices: np.ndarray, labels: np.ndarray, K: int) -> np.ndarray:
    """Within-cluster averages, shape ``(K, d1, d2)``; clusters must be nonempty."""
    counts = np.bincount(labels, minlength=K)
    if np.any(counts == 0):
        raise ValueError(f"empty cluster in labeling, sizes={counts.tolist()}")
    n, d1, d2 = slices.shape
    sums = np.zeros((K, d1 * d2))
    np.add.at(sums, labels, slices.reshape(n, -1))
    return (sums / counts[:, None]).reshape(K, d1, d2)


def rank_r_center(mean: np.ndarray, r: int) -> tuple[np.ndarray, float]:
    """Best rank-``r`` approximation of ``mean`` and its top singular value."""
    t = truncated_svd(mean, r)
    keep = t.sigma > RANK_TOL * t.sigma[0] if t.sigma[0] > 0 else np.zeros(t.rank, bool)
    approx = (t.u[:, keep] * t.sigma[keep]) @ t.v[:, keep].T
    return approx, float(t.sigma[0])


def squared_distances(slices: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """``D[i, k] = ||X_i - M_k||_F^2`` computed entrywise (no expansion)."""
    n = slices.shape[0]
    flat = slices.reshape(n, -1)
    out = np.empty((n, centers.shape[0]))
    for k, c in enumerate(centers.reshape(centers.shape[0], -1)):
        diff = flat - c
        out[:, k] = np.einsum("ij,ij->i", diff, diff)
    return out


def _check_tensor(x) -> None:
    if not isinstance(x, Tensor3):
        raise TypeError("x must be a Tensor3")


def _run(
    x: Tensor3,
    init,
    K: int,
    update: Callable[[np.ndarray, np.ndarray], np.ndarray],
    T: int,
    gt,
) -> LloydResult:
    _check_tensor(x)
    if T < 1:
        raise ValueError("T must be >= 1")
    slices = x.slices
    labels = as_labels(init, K)
    if labels.size != x.n:
        raise ValueError(f"init has {labels.size} labels for n={x.n} observations")
    if np.any(np.bincount(labels, minlength=K) == 0):
        raise ValueError("every cluster must be nonempty in the initial labeling")
    truth = None
    if gt is not None:
        truth = gt.labels if isinstance(gt, GroundTruth) else as_labels(gt)
        if truth.size != x.n:
            raise ValueError("ground truth does not match the data")
    trace = LloydTrace(error_per_iter=[] if truth is not None else None)
    centers = None
    for t in range(1, T + 1):
        centers = update(slices, labels)
        d = squared_distances(slices, centers)
        new = repair_empty(np.argmin(d, axis=1), d, K)
        trace.labels_per_iter.append(new)
        if truth is not None:
            trace.error_per_iter.append(clustering_error(new, truth, max(K, int(truth.max()) + 1)))
        if np.array_equal(new, labels):
            trace.converged_at = t
            break
        labels = new
    return LloydResult(new, centers, trace)


def lr_lloyd(
    x: Tensor3,
    init,
    ranks: Sequence[int],
    T: int = DEFAULT_T,
    gt: Optional[GroundTruth] = None,
) -> LloydResult:
    """Low-rank Lloyd iterations.

    Each iteration replaces every cluster average by its best rank-``r_k``
    approximation, then moves each observation to the nearest center in
    Frobenius norm (ties to the smaller cluster id). Stops once the labels
    repeat. Returns ``(labels, centers, trace)``. ``gt`` (a ``GroundTruth``
    or a plain label vector) only fills ``trace.error_per_iter``.
    """
    ranks = [int(r) for r in ranks]
    K = len(ranks)
    if K < 1:
        raise ValueError("need at least one rank")
    _check_tensor(x)
    d1, d2, _ = x.dims
    if any(r < 1 or r > min(d1, d2) for r in ranks):
        raise ValueError(f"ranks must lie in [1, {min(d1, d2)}]")

    def update(slices, labels):
        means = cluster_means(slices, labels, K)
        return np.stack([rank_r_center(m, r)[0] for m, r in zip(means, ranks)])

    return _run(x, init, K, update, T, gt)


def vec_lloyd(
    x: Tensor3,
    init,
    K: int,
    T: int = DEFAULT_T,
    gt: Optional[GroundTruth] = None,
) -> LloydResult:
    """Vanilla Lloyd iterations on vectorized observations (centers are plain means)."""
    return _run(x, init, K, lambda s, lab: cluster_means(s, lab, K), T, gt)


def rlr_lloyd(
    x: Tensor3,
    init,
    r1: int,
    r2: int,
    T: int = DEFAULT_T,
    gt: Optional[GroundTruth] = None,
) -> LloydResult:
    """Relaxed low-rank Lloyd iterations for two clusters with one weak center.

    Both averages are truncated to their ranks; the one with the smaller top
    singular value is replaced by zero. If cluster 2's estimate is strictly
    stronger, it is moved to slot 0 first, so slot 0 always holds the strong
    center. On an exact tie no swap happens and slot 1 is zeroed.
    """
    _check_tensor(x)
    d1, d2, _ = x.dims
    for r in (r1, r2):
        if not 1 <= int(r) <= min(d1, d2):
            raise ValueError(f"ranks must lie in [1, {min(d1, d2)}]")

    def update(slices, labels):
        means = cluster_means(slices, labels, 2)
        m1, s1 = rank_r_center(means[0], int(r1))
        m2, s2 = rank_r_center(means[1], int(r2))
        if s2 > s1:
            m1 = m2
        return np.stack([m1, np.zeros_like(m1)])

    return _run(x, init, 2, update, T, gt)
