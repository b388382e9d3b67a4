"""Truncated SVD, best rank-r approximation and scree-elbow rank selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# trailing singular values at or below this fraction of sigma_1 are numerically zero
RANK_TOL = 1e-10
ELBOW_EPS = 1e-8


@dataclass(frozen=True)
class TruncatedSVD:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def rank(self) -> int:
        return self.sigma.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def fix_signs(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip paired columns so the largest-magnitude entry of each ``u`` column is >= 0.

    ``argmax`` returns the first maximiser, so ties go to the lowest row index.
    """
    if u.shape[1] == 0:
        return u, v
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.where(u[idx, np.arange(u.shape[1])] < 0, -1.0, 1.0)
    return u * signs, v * signs


def svd(a) -> TruncatedSVD:
    """Thin SVD of ``a`` (all ``min(d1, d2)`` triplets) under the sign convention."""
    a = _as_matrix(a)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    u, v = fix_signs(u, vt.T)
    return TruncatedSVD(u, s, v)


def singular_values(a) -> np.ndarray:
    return np.linalg.svd(_as_matrix(a), compute_uv=False)


def truncated_svd(a, r: int) -> TruncatedSVD:
    """Top-``r`` singular triplets of ``a``.

    Computed from a dense LAPACK SVD, so ``u @ diag(sigma) @ v.T`` is the
    Frobenius-optimal approximation of rank at most ``r``.
    """
    a = _as_matrix(a)
    r = int(r)
    if not 1 <= r <= min(a.shape):
        raise ValueError(f"rank r={r} out of range [1, {min(a.shape)}]")
    full = svd(a)
    return TruncatedSVD(full.u[:, :r].copy(), full.sigma[:r].copy(), full.v[:, :r].copy())


def best_rank_r(a, r: int) -> np.ndarray:
    """Eckart-Young approximation; components with sigma_i <= 1e-10 * sigma_1 are dropped."""
    t = truncated_svd(a, r)
    keep = t.sigma > RANK_TOL * t.sigma[0] if t.sigma[0] > 0 else np.zeros(t.rank, bool)
    return (t.u[:, keep] * t.sigma[keep]) @ t.v[:, keep].T


def numerical_rank(a, rtol: float = 1e-8) -> int:
    s = singular_values(a)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def top_left_singular_vectors(a, r: int) -> np.ndarray:
    """First ``r`` left singular vectors of ``a`` (sign-fixed).

    For wide matrices (the mode-1/2 unfoldings are ``d x (d n)``) the vectors
    come from the eigendecomposition of ``a a^T``, which spans the same space
    and is much cheaper than a full SVD of the unfolding.
    """
    a = _as_matrix(a)
    r = int(r)
    if not 1 <= r <= min(a.shape):
        raise ValueError(f"rank r={r} out of range [1, {min(a.shape)}]")
    if a.shape[1] < 4 * a.shape[0]:
        return truncated_svd(a, r).u
    w, q = np.linalg.eigh(a @ a.T)
    u = q[:, ::-1][:, :r]
    u, _ = fix_signs(u, np.zeros((1, r)))
    return np.ascontiguousarray(u)


def gram_singular_values(a) -> np.ndarray:
    """Singular values of ``a`` via the eigenvalues of the smaller Gram matrix."""
    a = _as_matrix(a)
    g = a @ a.T if a.shape[0] <= a.shape[1] else a.T @ a
    w = np.linalg.eigvalsh(g)[::-1]
    return np.sqrt(np.clip(w, 0.0, None))


def elbow_rank(sigma, r_max: int, r_min: int = 1) -> int:
    """Scree elbow: the ``i`` maximising ``sigma_i / (sigma_{i+1} + eps * sigma_1)``.

    ``i`` is 1-based and ranges over ``[r_min, min(r_max, len(sigma) - 1)]``;
    ties go to the smaller ``i``. If that range is empty, ``r_min`` is returned.
    """
    s = np.asarray(sigma, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("elbow_rank needs at least one singular value")
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    if np.any(s < 0) or np.any(np.diff(s) > 0):
        raise ValueError("singular values must be nonnegative and nonincreasing")
    hi = min(int(r_max), s.size - 1)
    if hi < r_min:
        return int(r_min)
    i = np.arange(r_min, hi + 1)
    ratios = s[i - 1] / (s[i] + ELBOW_EPS * s[0])
    if s[0] == 0:
        return int(r_min)
    return int(i[np.argmax(ratios)])
