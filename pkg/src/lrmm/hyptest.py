"""Detection test for the symmetric rank-one two-component mixture.

The data ``X_i = s_i n^{-1/2} L u v^T + E_i`` either carries a signal (``L > 0``)
or is pure noise. The test splits the data with fresh Gaussian noise into two
independent copies, clusters the second copy, and measures the operator norm
of the sign-weighted average of the first copy:

    T_n = || sum_i s_hat_i X1_i / n ||_op.

Given the labels, the first copy is still pure noise under the null, so
``T_n`` has the law of ``||G|| / sqrt(n)`` for a standard Gaussian ``d1 x d2``
matrix ``G`` no matter which labels the clusterer produced. The rejection
threshold is the Monte Carlo ``1 - alpha`` quantile of that law.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cluster import rlr_lloyd, rts_init
from .rng import stream
from .tensor_core import Tensor3

DEFAULT_EPSILON = 0.5
NULL_DRAWS = 10_000
_CHUNK = 1_000


@dataclass(frozen=True)
class SplitPair:
    x1: Tensor3
    x2: Tensor3
    epsilon: float


@dataclass(frozen=True)
class TestResult:
    reject: bool
    statistic: float
    threshold: float
    labels: np.ndarray  # signs in {-1, +1} estimated from x2

    @property
    def decision(self) -> str:
        return "reject" if self.reject else "accept"


def split_samples(x: Tensor3, epsilon: float, seed: int = 0) -> SplitPair:
    """Two copies of ``x`` that are independent given the signal.

    With ``Et`` i.i.d. standard normal,
    ``x1 = (x + Et / eps) / sqrt(1 + eps^-2)`` and ``x2 = (x - eps Et) / sqrt(1 + eps^2)``.
    Both keep unit noise variance and their noise parts are uncorrelated.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    s = x.slices
    et = stream(seed, "split").standard_normal(s.shape)
    x1 = (s + et / epsilon) / np.sqrt(1.0 + epsilon**-2)
    x2 = (s - epsilon * et) / np.sqrt(1.0 + epsilon**2)
    return SplitPair(Tensor3.from_slices(x1), Tensor3.from_slices(x2), float(epsilon))


def test_statistic(x1: Tensor3, labels) -> float:
    """Largest singular value of ``sum_i labels_i X1_i / n``."""
    signs = np.asarray(labels, dtype=float).ravel()
    if signs.size != x1.n:
        raise ValueError(f"got {signs.size} labels for n={x1.n} slices")
    avg = np.tensordot(signs, x1.slices, axes=1) / x1.n
    return float(np.linalg.norm(avg, 2))


# keep pytest from collecting the function above as a test
test_statistic.__test__ = False


def null_statistics(d1: int, d2: int, n: int, draws: int = NULL_DRAWS, seed: int = 0) -> np.ndarray:
    """Draws of ``||G|| / sqrt(n)``, the exact null law of the statistic."""
    rng = stream(seed, "null")
    out = np.empty(draws)
    for lo in range(0, draws, _CHUNK):
        m = min(_CHUNK, draws - lo)
        g = rng.standard_normal((m, d1, d2))
        out[lo : lo + m] = np.linalg.svd(g, compute_uv=False)[:, 0]
    return out / np.sqrt(n)


@lru_cache(maxsize=64)
def null_threshold(d1: int, d2: int, n: int, alpha: float = 0.05, draws: int = NULL_DRAWS, seed: int = 0) -> float:
    """Monte Carlo ``1 - alpha`` quantile of the null statistic (cached)."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return float(np.quantile(null_statistics(d1, d2, n, draws, seed), 1.0 - alpha))


def estimate_signs(x: Tensor3, seed: int = 0, T: int = 20) -> np.ndarray:
    """Two-cluster labels from rank-one spectral initialization and relaxed
    low-rank Lloyd, returned as signs (cluster 0 -> +1, cluster 1 -> -1)."""
    init = rts_init(x, 1, seed=seed)
    labels = rlr_lloyd(x, init, 1, 1, T=T).labels
    return np.where(labels == 0, 1.0, -1.0)


def reduction_test(
    x: Tensor3,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    alpha_level: float = 0.05,
    draws: int = NULL_DRAWS,
    calibration_seed: int = 0,
) -> TestResult:
    """Reject the pure-noise hypothesis when ``T_n`` exceeds the calibrated threshold.

    The threshold depends only on ``(d1, d2, n, alpha_level)`` and the
    calibration seed, never on the data seed.
    """
    pair = split_samples(x, epsilon, seed)
    d1, d2, n = x.dims
    if n < 2:
        raise ValueError("need at least two observations")
    thr = null_threshold(d1, d2, n, alpha_level, draws, calibration_seed)
    if not np.any(x.slices):
        # an identically zero tensor carries no data at all; the injected
        # splitting noise alone would only produce a null draw
        return TestResult(False, 0.0, thr, np.ones(n))
    signs = estimate_signs(pair.x2, seed=seed)
    stat = test_statistic(pair.x1, signs)
    return TestResult(bool(stat > thr), stat, thr, signs)


def rank_one_mixture(d1: int, d2: int, n: int, strength: float, seed: int = 0) -> tuple[Tensor3, np.ndarray]:
    """Sample ``X_i = s_i n^{-1/2} strength u v^T + E_i``.

    ``u`` and ``v`` have i.i.d. uniform ``+-d^{-1/2}`` entries and ``s`` is
    Rademacher. ``strength = 0`` gives the null. Returns the data and ``s``.
    """
    if strength < 0:
        raise ValueError("strength must be nonnegative")
    rng = stream(seed, "rank-one")
    u = rng.choice([-1.0, 1.0], size=d1) / np.sqrt(d1)
    v = rng.choice([-1.0, 1.0], size=d2) / np.sqrt(d2)
    s = rng.choice([-1.0, 1.0], size=n)
    m = strength / np.sqrt(n) * np.outer(u, v)
    data = s[:, None, None] * m + stream(seed, "rank-one-noise").standard_normal((n, d1, d2))
    return Tensor3.from_slices(data), s
