"""Permutation-aligned clustering error and Frobenius loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import CenterSet, as_labels


@dataclass(frozen=True)
class AlignmentResult:
    permutation: tuple[int, ...]  # permutation[true_label] = estimated label
    hamming: int
    rate: float


def confusion(s_hat, s_star, K: int) -> np.ndarray:
    """``C[a, b] = #{i : s_hat_i = a, s_star_i = b}``."""
    a = as_labels(s_hat, K)
    b = as_labels(s_star, K)
    if a.shape != b.shape:
        raise ValueError(f"label vectors differ in length: {a.size} vs {b.size}")
    return np.bincount(a * K + b, minlength=K * K).reshape(K, K)


def _lexicographic_min_assignment(cost: np.ndarray, atol: float) -> tuple[tuple[int, ...], float]:
    """Minimum-cost assignment ``row -> column``; among optimal ones, the
    lexicographically smallest column sequence."""
    K = cost.shape[0]
    rows, cols = linear_sum_assignment(cost)
    best = float(cost[rows, cols].sum())
    perm: list[int] = []
    free_cols = list(range(K))
    fixed = 0.0
    for r in range(K):
        rest_rows = list(range(r + 1, K))
        for c in free_cols:
            remaining = [cc for cc in free_cols if cc != c]
            sub = 0.0
            if rest_rows:
                sub_cost = cost[np.ix_(rest_rows, remaining)]
                rr, cc = linear_sum_assignment(sub_cost)
                sub = float(sub_cost[rr, cc].sum())
            if fixed + cost[r, c] + sub <= best + atol:
                perm.append(c)
                fixed += cost[r, c]
                free_cols.remove(c)
                break
    return tuple(perm), best


def hamming_error(s_hat, s_star, K: int) -> AlignmentResult:
    """``min_pi sum_i 1{s_hat_i != pi(s_star_i)}`` with the optimal ``pi``.

    Solved as a maximum-agreement assignment on the confusion matrix, which
    is exactly the brute-force minimum over all ``K!`` permutations.
    """
    c = confusion(s_hat, s_star, K)
    n = int(c.sum())
    # row b = true label, column a = estimated label
    perm, agree_neg = _lexicographic_min_assignment(-c.T.astype(np.float64), atol=0.5)
    hamming = n - int(round(-agree_neg))
    return AlignmentResult(perm, hamming, hamming / n)


def clustering_error(s_hat, s_star, K: int) -> float:
    return hamming_error(s_hat, s_star, K).rate


def frob_loss(s_hat, s_star, cs: CenterSet) -> float:
    """``min_pi sum_i ||M_{s_hat_i} - M_{pi(s_star_i)}||_F^2``."""
    K = cs.K
    c = confusion(s_hat, s_star, K)
    flat = cs.centers.reshape(K, -1)
    sq = np.sum((flat[:, None, :] - flat[None, :, :]) ** 2, axis=2)  # sq[a', a]
    # cost[b, a]: true label b mapped to estimated label a
    cost = c.T.astype(np.float64) @ sq
    scale = max(1.0, float(np.abs(cost).max()))
    _, best = _lexicographic_min_assignment(cost, atol=1e-12 * scale)
    return max(best, 0.0)


def align_labels(s_hat, s_star, K: int) -> np.ndarray:
    """Relabel ``s_hat`` so that it agrees with ``s_star`` as much as possible."""
    perm = hamming_error(s_hat, s_star, K).permutation
    inverse = np.empty(K, dtype=np.int64)
    inverse[list(perm)] = np.arange(K)
    return inverse[as_labels(s_hat, K)]
