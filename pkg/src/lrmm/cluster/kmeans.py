"""k-means on the rows of a matrix: k-means++ seeding, Lloyd updates, restarts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rng import stream


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    objective: float
    n_iter: int = 0
    objective_trace: tuple[float, ...] = field(default=(), repr=False)


def _sq_dists(x: np.ndarray, x_sq: np.ndarray, c: np.ndarray) -> np.ndarray:
    d = x_sq[:, None] - 2.0 * (x @ c.T) + np.sum(c * c, axis=1)[None, :]
    return np.maximum(d, 0.0)


def _plusplus(x: np.ndarray, x_sq: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    idx = [int(rng.integers(n))]
    closest = _sq_dists(x, x_sq, x[idx])[:, 0]
    for _ in range(1, K):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            nxt = int(rng.integers(n))
        idx.append(nxt)
        closest = np.minimum(closest, _sq_dists(x, x_sq, x[[nxt]])[:, 0])
    return x[idx].copy()


def repair_empty(labels: np.ndarray, dists: np.ndarray, K: int) -> np.ndarray:
    """Give each empty cluster the point farthest from its own center.

    Only points whose cluster keeps at least one other member are eligible;
    ties go to the smallest index. ``dists`` is ``(n, K)`` squared distances.
    """
    labels = labels.copy()
    counts = np.bincount(labels, minlength=K)
    for k in np.flatnonzero(counts == 0):
        own = dists[np.arange(labels.size), labels]
        eligible = counts[labels] > 1
        if not np.any(eligible):
            break
        own = np.where(eligible, own, -np.inf)
        i = int(np.argmax(own))
        counts[labels[i]] -= 1
        labels[i] = k
        counts[k] += 1
    return labels


def _means(x: np.ndarray, labels: np.ndarray, K: int) -> np.ndarray:
    counts = np.bincount(labels, minlength=K).astype(np.float64)
    sums = np.zeros((K, x.shape[1]))
    np.add.at(sums, labels, x)
    return sums / np.maximum(counts, 1.0)[:, None]


def _objective(x: np.ndarray, labels: np.ndarray, c: np.ndarray) -> float:
    return float(np.sum((x - c[labels]) ** 2))


def _single_run(x, x_sq, K, rng, max_iter):
    centroids = _plusplus(x, x_sq, K, rng)
    labels = None
    trace = []
    it = 0
    for it in range(1, max_iter + 1):
        d = _sq_dists(x, x_sq, centroids)
        new = repair_empty(np.argmin(d, axis=1), d, K)
        centroids = _means(x, new, K)
        trace.append(_objective(x, new, centroids))
        if labels is not None and np.array_equal(new, labels):
            labels = new
            break
        labels = new
    return labels, centroids, trace, it


def kmeans_rows(x, K: int, seed: int = 0, restarts: int = 20, max_iter: int = 100) -> KMeansResult:
    """Cluster the rows of ``x`` into ``K`` groups.

    Each restart ``j`` draws its k-means++ seeds from the stream
    ``(seed, "kmeans", j)`` and runs Lloyd updates until the labels repeat or
    ``max_iter`` is hit. The lowest-objective run wins (earliest on ties).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("kmeans_rows expects a matrix")
    n = x.shape[0]
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > n:
        raise ValueError(f"K={K} exceeds the number of rows n={n}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    x_sq = np.sum(x * x, axis=1)
    best = None
    for j in range(restarts):
        labels, c, trace, it = _single_run(x, x_sq, K, stream(seed, "kmeans", j), max_iter)
        obj = trace[-1]
        if best is None or obj < best.objective:
            best = KMeansResult(labels, c, obj, it, tuple(trace))
    return best
