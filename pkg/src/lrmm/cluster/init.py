"""Initial clusterings: tensor spectral (HOSVD projection + k-means) and baselines."""

from __future__ import annotations

import numpy as np

from ..lowrank import top_left_singular_vectors
from ..model import as_labels
from ..tensor_core import Tensor3, matricize, mode_multiply
from .kmeans import kmeans_rows

DEFAULT_RESTARTS = 20


def hosvd_factors(x: Tensor3, r_u: int, r_v: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-``r_u`` / top-``r_v`` left singular vectors of the mode-1 / mode-2 unfoldings."""
    d1, d2, _ = x.dims
    if not 1 <= r_u <= d1:
        raise ValueError(f"r_u={r_u} out of range [1, {d1}]")
    if not 1 <= r_v <= d2:
        raise ValueError(f"r_v={r_v} out of range [1, {d2}]")
    return top_left_singular_vectors(matricize(x, 1), r_u), top_left_singular_vectors(matricize(x, 2), r_v)


def project(x: Tensor3, u: np.ndarray, v: np.ndarray) -> Tensor3:
    """``x x1 U U^T x2 V V^T``."""
    return mode_multiply(mode_multiply(x, u @ u.T, 1), v @ v.T, 2)


def core_rows(x: Tensor3, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rows ``vec(U^T X_i V)``, shape ``(n, r_u * r_v)``.

    ``vec(U U^T X_i V V^T) = (U kron V) vec(U^T X_i V)`` in row-major order and
    ``U kron V`` has orthonormal columns, so these rows have exactly the
    pairwise distances of the rows of ``M_3(project(x, u, v))``; k-means on
    them is the same problem in ``r_u * r_v`` instead of ``d1 * d2`` columns.
    """
    c = np.einsum("ia,nij,jb->nab", u, x.slices, v, optimize=True)
    return c.reshape(x.n, -1)


def ts_init(
    x: Tensor3,
    r_u: int,
    r_v: int,
    K: int,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    use_core: bool = True,
) -> np.ndarray:
    """Tensor spectral initialization.

    1. ``U``, ``V``: leading singular vectors of the mode-1 and mode-2 unfoldings.
    2. Project every slice onto ``span(U) x span(V)``.
    3. k-means (``restarts`` k-means++ runs) on the projected slices.

    With ``use_core=False`` k-means runs on the full ``n x d1 d2`` unfolding of
    the projected tensor instead of the equivalent core coordinates.
    """
    if not 1 <= K <= x.n:
        raise ValueError(f"K={K} must lie in [1, n={x.n}]")
    u, v = hosvd_factors(x, int(r_u), int(r_v))
    rows = core_rows(x, u, v) if use_core else matricize(project(x, u, v), 3)
    return kmeans_rows(rows, K, seed=seed, restarts=restarts).labels


def rts_init(x: Tensor3, r1: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> np.ndarray:
    """Spectral initialization for two clusters using only the strong center's rank."""
    d1, d2, _ = x.dims
    if not 1 <= r1 <= min(d1, d2):
        raise ValueError(f"r1={r1} out of range [1, {min(d1, d2)}]")
    return ts_init(x, r1, r1, 2, seed=seed, restarts=restarts)


def kmeans_m3(x: Tensor3, K: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> np.ndarray:
    """k-means directly on the vectorized observations (rows of the mode-3 unfolding)."""
    return kmeans_rows(matricize(x, 3), K, seed=seed, restarts=restarts).labels


def spectral_m3(x: Tensor3, K: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> np.ndarray:
    """Vectorized spectral clustering: k-means on the rank-``K`` embedding ``U_K Sigma_K``
    of the mode-3 unfolding."""
    m3 = matricize(x, 3)
    g = m3 @ m3.T
    w, q = np.linalg.eigh(g)
    top = np.argsort(w)[::-1][:K]
    emb = q[:, top] * np.sqrt(np.clip(w[top], 0.0, None))
    return kmeans_rows(emb, K, seed=seed, restarts=restarts).labels


def warm_start(s_star, K: int, error: float) -> np.ndarray:
    """Fixed perturbation of the true labels: the first ``round(error * n)``
    observations are moved to the next cluster id (mod ``K``)."""
    s = as_labels(s_star, K).copy()
    if not 0 <= error <= 1:
        raise ValueError("error must lie in [0, 1]")
    m = int(round(error * s.size))
    s[:m] = (s[:m] + 1) % K
    return s
