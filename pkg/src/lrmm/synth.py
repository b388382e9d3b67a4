"""Seeded generators for low-rank mixtures and mixture multi-layer SBMs.

Recipes:

* ``random_factors``: independent factors per cluster; ``U_k, V_k`` are the
  top singular vectors of an i.i.d. standard normal ``d1 x d2`` matrix and
  ``Sigma_k`` is given.
* ``s2_1``: shared factors, ``M_1 = U diag(1.2l, 1.1l, l) V^T`` and
  ``M_2 = U (Sigma_1 + delta/3 I) V^T``.
* ``s2_2``: independent factors, ``Sigma_1 = diag(1.2l, 1.1l, l)`` and
  ``Sigma_2 = diag(0.36, 0.33, 0.30)``.
* ``s1_1``: ``random_factors`` with ``Sigma_k = diag(1.2l, l)`` for two clusters.
* ``explicit``: caller-supplied center matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import CenterSet, GroundTruth, as_labels
from .rng import as_generator, stream
from .tensor_core import Tensor3

S2_2_WEAK_SIGMA = (0.36, 0.33, 0.30)
RECIPES = ("random_factors", "s1_1", "s2_1", "s2_2", "explicit")


def random_orthonormal(d: int, r: int, seed=0) -> np.ndarray:
    """Haar-distributed ``d x r`` matrix with orthonormal columns."""
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r}, d={d}")
    rng = as_generator(seed)
    q, rr = np.linalg.qr(rng.standard_normal((d, r)))
    return q * np.where(np.diag(rr) < 0, -1.0, 1.0)


def gaussian_singular_pair(d1: int, d2: int, r: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Top-``r`` left/right singular vectors of an i.i.d. standard normal ``d1 x d2`` matrix."""
    rng = as_generator(rng)
    u, _, vt = np.linalg.svd(rng.standard_normal((d1, d2)), full_matrices=False)
    return u[:, :r], vt[:r].T


@dataclass(frozen=True)
class LrMMSpec:
    d1: int
    d2: int
    n: int
    K: int = 2
    recipe: str = "s2_1"
    lam: float = 10.0
    delta_param: Optional[float] = None
    sigmas: Optional[Sequence[Sequence[float]]] = None  # random_factors: per-cluster singular values
    centers: Optional[np.ndarray] = None  # explicit
    labels: Optional[Sequence[int]] = None  # explicit labels; else i.i.d. equal mixing
    noise_sd: float = 1.0  # 0 means noiseless

    def __post_init__(self):
        if min(self.d1, self.d2, self.n) < 1:
            raise ValueError("dims must be positive")
        if self.recipe not in RECIPES:
            raise ValueError(f"unknown recipe {self.recipe!r}; choose from {RECIPES}")
        if self.K < 2:
            raise ValueError("K must be >= 2")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        if self.delta_param is not None and self.recipe != "s2_1":
            raise ValueError("delta_param only applies to the s2_1 recipe")
        if self.recipe == "s2_1" and self.delta_param is None:
            raise ValueError("the s2_1 recipe needs delta_param")
        if self.recipe in ("s1_1", "s2_1", "s2_2") and self.K != 2:
            raise ValueError(f"recipe {self.recipe} has K=2")
        if self.recipe == "random_factors":
            if self.sigmas is None or len(self.sigmas) != self.K:
                raise ValueError("random_factors needs one singular value list per cluster")
            for s in self.sigmas:
                s = np.asarray(s, dtype=float)
                if s.size < 1 or np.any(s <= 0) or np.any(np.diff(s) > 0):
                    raise ValueError("singular value lists must be positive and nonincreasing")
                if s.size > min(self.d1, self.d2):
                    raise ValueError("too many singular values for the matrix dims")
        if self.recipe == "explicit":
            if self.centers is None:
                raise ValueError("explicit recipe needs centers")
            c = np.asarray(self.centers)
            if c.shape != (self.K, self.d1, self.d2):
                raise ValueError(f"centers must have shape {(self.K, self.d1, self.d2)}")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("explicit labels must have length n")
        if self.recipe in ("s1_1", "s2_1", "s2_2") and self.lam <= 0:
            raise ValueError("lam must be positive")


def _diag_sigmas(spec: LrMMSpec) -> list[np.ndarray]:
    lam = spec.lam
    if spec.recipe == "s1_1":
        return [np.array([1.2 * lam, lam])] * 2
    if spec.recipe == "s2_2":
        return [np.array([1.2 * lam, 1.1 * lam, lam]), np.array(S2_2_WEAK_SIGMA)]
    return [np.asarray(s, dtype=float) for s in spec.sigmas]


def make_centers(spec: LrMMSpec, rng) -> CenterSet:
    """Population centers for ``spec`` drawn from ``rng``."""
    rng = as_generator(rng)
    d1, d2 = spec.d1, spec.d2
    if spec.recipe == "explicit":
        c = np.asarray(spec.centers, dtype=float)
        ranks = []
        for m in c:
            s = np.linalg.svd(m, compute_uv=False)
            ranks.append(int(np.sum(s > 1e-8 * s[0])) if s[0] > 0 else 0)
        # an all-zero center (allowed for the relaxed two-cluster model) is recorded as rank 1
        has_zero = 0 in ranks
        return CenterSet(c, tuple(max(r, 1) for r in ranks), check_rank=not has_zero)
    if spec.recipe == "s2_1":
        sig = np.array([1.2, 1.1, 1.0]) * spec.lam
        u, v = gaussian_singular_pair(d1, d2, 3, rng)
        m1 = (u * sig) @ v.T
        m2 = (u * (sig + spec.delta_param / 3.0)) @ v.T
        return CenterSet(np.stack([m1, m2]), (3, 3))
    sigmas = _diag_sigmas(spec)
    mats = []
    for s in sigmas:
        u, v = gaussian_singular_pair(d1, d2, s.size, rng)
        mats.append((u * s) @ v.T)
    return CenterSet(np.stack(mats), tuple(s.size for s in sigmas))


def draw_labels(n: int, K: int, rng) -> np.ndarray:
    """I.i.d. uniform labels, redrawn until every cluster is nonempty."""
    rng = as_generator(rng)
    if n < K:
        raise ValueError("need n >= K to populate every cluster")
    while True:
        lab = rng.integers(0, K, size=n)
        if np.all(np.bincount(lab, minlength=K) > 0):
            return lab.astype(np.int64)


def gen_lrmm(spec: LrMMSpec, seed: int = 0) -> tuple[Tensor3, GroundTruth]:
    """Draw ``X_i = M_{s_i} + E_i`` for ``spec``.

    Centers, labels and noise use separate streams derived from ``seed``, so
    changing e.g. ``noise_sd`` or ``lam`` leaves the factor and label draws
    unchanged.
    """
    cs = make_centers(spec, stream(seed, "centers"))
    if spec.labels is not None:
        labels = as_labels(spec.labels, spec.K)
    else:
        labels = draw_labels(spec.n, spec.K, stream(seed, "labels"))
    gt = GroundTruth(labels, cs)
    signal = cs.centers[gt.labels]
    if spec.noise_sd > 0:
        noise = stream(seed, "noise").standard_normal(signal.shape)
        data = signal + spec.noise_sd * noise
    else:
        data = signal.copy()
    return Tensor3.from_slices(data), gt


# --- mixture multi-layer stochastic block model ---------------------------------


@dataclass(frozen=True)
class MMSBMSpec:
    K: int = 3
    d: int = 50
    pbar: float = 0.15
    n: int = 200
    labels: Optional[Sequence[int]] = None
    node_blocks: str = "independent"  # "independent" | "shared" | "explicit"
    memberships: Optional[Sequence[Sequence[int]]] = None  # explicit: one node labeling per cluster
    n_blocks: Optional[int] = None  # node communities per layer; defaults to K

    def __post_init__(self):
        if self.K < 2 or self.d < 1 or self.n < 1:
            raise ValueError("need K >= 2 and positive d, n")
        if not 0 < self.pbar <= 1:
            raise ValueError(f"pbar must lie in (0, 1], got {self.pbar}")
        if self.node_blocks not in ("independent", "shared", "explicit"):
            raise ValueError("node_blocks must be independent, shared or explicit")
        if self.node_blocks == "explicit":
            if self.memberships is None or len(self.memberships) != self.K:
                raise ValueError("explicit node blocks need one membership vector per cluster")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("explicit labels must have length n")

    @property
    def blocks(self) -> int:
        return self.n_blocks or self.K


def connection_matrix(pk: float, B: int) -> np.ndarray:
    """``p I + p/2 (1 1^T - I)``."""
    return pk / 2.0 * np.ones((B, B)) + pk / 2.0 * np.eye(B)


def equal_blocks(d: int, B: int) -> np.ndarray:
    """Contiguous, as-equal-as-possible node communities."""
    return (np.arange(d) * B) // d


def mmsbm_centers(spec: MMSBMSpec, rng) -> tuple[CenterSet, list[np.ndarray]]:
    """Mean adjacency matrices ``M_k = Z_k B_k Z_k^T`` (diagonal kept as ``B_k``'s diagonal).

    ``independent`` node blocks give each cluster its own uniformly permuted
    equal-size node partition; ``shared`` uses one contiguous partition for all.
    """
    rng = as_generator(rng)
    B, d = spec.blocks, spec.d
    base = equal_blocks(d, B)
    mats, zs = [], []
    for k in range(spec.K):
        if spec.node_blocks == "explicit":
            z = as_labels(spec.memberships[k], B)
            if z.size != d:
                raise ValueError("memberships must have length d")
        elif spec.node_blocks == "shared":
            z = base
        else:
            z = rng.permutation(base)
        pk = spec.pbar * (k + 1) / spec.K
        bk = connection_matrix(pk, B)
        mats.append(bk[np.ix_(z, z)])
        zs.append(z)
    centers = np.stack(mats)
    ranks = []
    for m in centers:
        s = np.linalg.svd(m, compute_uv=False)
        ranks.append(int(np.sum(s > 1e-8 * s[0])))
    return CenterSet(centers, tuple(ranks)), zs


def sample_adjacency(mean: np.ndarray, rng) -> np.ndarray:
    """Symmetric Bernoulli adjacency with zero diagonal: the upper triangle is
    sampled entrywise and mirrored."""
    rng = as_generator(rng)
    d = mean.shape[0]
    iu = np.triu_indices(d, k=1)
    draws = (rng.random(iu[0].size) < mean[iu]).astype(np.float64)
    a = np.zeros((d, d))
    a[iu] = draws
    return a + a.T


def gen_mmsbm(spec: MMSBMSpec, seed: int = 0) -> tuple[Tensor3, GroundTruth]:
    """Draw an MMSBM data tensor; the ground truth holds the Bernoulli means."""
    cs, _ = mmsbm_centers(spec, stream(seed, "mmsbm-nodes"))
    if spec.labels is not None:
        labels = as_labels(spec.labels, spec.K)
    else:
        labels = draw_labels(spec.n, spec.K, stream(seed, "labels"))
    gt = GroundTruth(labels, cs)
    rng = stream(seed, "mmsbm-edges")
    d = spec.d
    iu = np.triu_indices(d, k=1)
    probs = cs.centers[gt.labels][:, iu[0], iu[1]]
    draws = (rng.random(probs.shape) < probs).astype(np.float64)
    data = np.zeros((spec.n, d, d))
    data[:, iu[0], iu[1]] = draws
    data += np.transpose(data, (0, 2, 1))
    return Tensor3.from_slices(data), gt
