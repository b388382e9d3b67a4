"""Low-rank mixture model parameters and their scalar diagnostics.

Cluster ids are 0-based throughout the library (``0..K-1``); file formats
use 1-based ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .lowrank import singular_values, truncated_svd
from .tensor_core import Tensor3, matricize

# a center's numerical rank counts singular values above this fraction of sigma_1
CENTER_RANK_TOL = 1e-8
# the nonzero spectrum of a matricization is everything above this fraction of sigma_1
MATRICIZATION_TOL = 1e-8


def as_labels(labels, K: int | None = None) -> np.ndarray:
    """Validate a labeling and return it as an int64 array."""
    a = np.asarray(labels)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("labels must be a nonempty 1-d sequence")
    if not np.issubdtype(a.dtype, np.integer):
        if not np.all(np.mod(a, 1) == 0):
            raise ValueError("labels must be integers")
    a = a.astype(np.int64)
    if a.min() < 0 or (K is not None and a.max() >= K):
        raise ValueError(f"labels must lie in [0, {K})" if K is not None else "labels must be >= 0")
    return a


def cluster_sizes(labels, K: int) -> np.ndarray:
    return np.bincount(as_labels(labels, K), minlength=K)


@dataclass(frozen=True)
class CenterSet:
    """K population center matrices with their ranks."""

    centers: np.ndarray  # (K, d1, d2)
    ranks: tuple[int, ...]
    check_rank: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.float64)
        if c.ndim != 3:
            raise ValueError("centers must be a list of equally shaped matrices")
        if c.shape[0] < 2:
            raise ValueError("a center set needs K >= 2")
        if not np.all(np.isfinite(c)):
            raise ValueError("centers must be finite")
        ranks = tuple(int(r) for r in self.ranks)
        if len(ranks) != c.shape[0]:
            raise ValueError("one rank per center is required")
        if any(r < 1 or r > min(c.shape[1:]) for r in ranks):
            raise ValueError("ranks must lie in [1, min(d1, d2)]")
        if self.check_rank:
            for k, (m, r) in enumerate(zip(c, ranks)):
                s = singular_values(m)
                got = int(np.sum(s > CENTER_RANK_TOL * s[0])) if s[0] > 0 else 0
                if got != r:
                    raise ValueError(f"center {k} has numerical rank {got}, declared {r}")
        c.flags.writeable = False
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "ranks", ranks)

    @property
    def K(self) -> int:
        return self.centers.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.centers.shape[1], self.centers.shape[2]

    def factors(self, k: int):
        """Compact SVD ``(U_k, sigma_k, V_k)`` of center ``k``."""
        return truncated_svd(self.centers[k], self.ranks[k])


@dataclass(frozen=True)
class GroundTruth:
    labels: np.ndarray
    center_set: CenterSet

    def __post_init__(self):
        lab = as_labels(self.labels, self.center_set.K)
        sizes = np.bincount(lab, minlength=self.center_set.K)
        if np.any(sizes == 0):
            raise ValueError(f"every cluster needs at least one member, sizes={sizes.tolist()}")
        lab.flags.writeable = False
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def K(self) -> int:
        return self.center_set.K

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.K)

    @property
    def alpha(self) -> float:
        """Minimal relative cluster size ``min_k n_k / (n / K)``."""
        return float(self.sizes.min() * self.K / self.n)


def separation_strength(cs: CenterSet) -> float:
    """Minimum pairwise Frobenius distance between centers."""
    if cs.K < 2:
        raise ValueError("separation strength needs K >= 2")
    return min(float(np.linalg.norm(cs.centers[a] - cs.centers[b])) for a, b in combinations(range(cs.K), 2))


def max_separation(cs: CenterSet) -> float:
    return max(float(np.linalg.norm(cs.centers[a] - cs.centers[b])) for a, b in combinations(range(cs.K), 2))


def signal_strength(cs: CenterSet) -> float:
    """Smallest ``sigma_{r_k}(M_k)`` over the centers."""
    return min(float(singular_values(m)[r - 1]) for m, r in zip(cs.centers, cs.ranks))


def signal_tensor(gt: GroundTruth) -> Tensor3:
    """Tensor whose slice ``i`` is the center of observation ``i``."""
    return Tensor3.from_slices(gt.center_set.centers[gt.labels])


def _nonzero_spectrum(m: np.ndarray) -> np.ndarray:
    s = singular_values(m)
    if s.size == 0 or s[0] == 0:
        return s[:0]
    return s[s > MATRICIZATION_TOL * s[0]]


def matricization_spectrum(gt: GroundTruth, mode: int) -> np.ndarray:
    """Nonzero singular values of the mode-``mode`` unfolding of the signal tensor."""
    return _nonzero_spectrum(matricize(signal_tensor(gt), mode))


def tensor_signal_strength(gt: GroundTruth) -> float:
    """``min_{j=1,2}`` of the smallest nonzero singular value of ``M_j(signal tensor)``."""
    return min(float(matricization_spectrum(gt, j)[-1]) for j in (1, 2))


def condition_numbers(gt: GroundTruth) -> tuple[float, float, float]:
    """``(kappa0, kappa1, kappa2)``.

    ``kappa0 = max_k ||M_k|| / min_k sigma_{r_k}(M_k)``; ``kappa_j`` is the ratio
    of extreme nonzero singular values of the mode-``j`` unfolding.
    """
    cs = gt.center_set
    top = max(float(singular_values(m)[0]) for m in cs.centers)
    kappa0 = top / signal_strength(cs)
    kappas = []
    for j in (1, 2):
        s = matricization_spectrum(gt, j)
        kappas.append(float(s[0] / s[-1]))
    return kappa0, kappas[0], kappas[1]


def gram_blocks(gt: GroundTruth, mode: int) -> tuple[np.ndarray, np.ndarray]:
    """Block form ``(F, D)`` with ``F = (U_1..U_K)`` (mode 1) or ``(V_1..V_K)`` (mode 2)
    and ``D = diag(n_k * Sigma_k^2)``, so that ``M_j M_j^T = F D F^T``."""
    cs = gt.center_set
    sizes = gt.sizes
    facs, diag = [], []
    for k in range(cs.K):
        f = cs.factors(k)
        facs.append(f.u if mode == 1 else f.v)
        diag.append(sizes[k] * f.sigma**2)
    return np.hstack(facs), np.diag(np.concatenate(diag))
