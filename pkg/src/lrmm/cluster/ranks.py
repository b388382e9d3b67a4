"""Scree-plot estimation of the Tucker ranks, the number of clusters and per-cluster ranks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..lowrank import elbow_rank, gram_singular_values, singular_values
from ..tensor_core import Tensor3, matricize
from .init import core_rows, hosvd_factors, ts_init
from .lloyd import cluster_means


@dataclass(frozen=True)
class RankEstimate:
    r_u: int
    r_v: int
    K: int
    ranks: tuple[int, ...]
    init_labels: np.ndarray = field(repr=False)
    spectra: dict = field(repr=False, default_factory=dict)


def estimate_ranks(x: Tensor3, r_max: int = 10, k_max: int = 10, seed: int = 0) -> RankEstimate:
    """Estimate ``(r_u, r_v, K, [r_k])`` from scree elbows.

    ``r_u``/``r_v`` come from the mode-1/mode-2 unfoldings of ``x``. ``K`` comes
    from the rows ``U^T X_i V`` of the projected core, searching elbows in
    ``[1, k_max]`` and raising the result to 2. The leading gap of this
    uncentered spectrum belongs to the common mean, so an elbow at 1 means
    no cluster direction rises above the noise; the minimal clustering
    ``K = 2`` is returned then, never an elbow picked among noise values.
    Each ``r_k`` is the elbow of the average of the observations that the
    tensor spectral initialization puts in cluster ``k``.
    """
    d1, d2, n = x.dims
    if not 1 <= r_max <= min(d1, d2):
        raise ValueError(f"r_max={r_max} out of range [1, {min(d1, d2)}]")
    if not 2 <= k_max <= n:
        raise ValueError(f"k_max={k_max} out of range [2, n={n}]")
    s1 = gram_singular_values(matricize(x, 1))
    s2 = gram_singular_values(matricize(x, 2))
    r_u = elbow_rank(s1, r_max)
    r_v = elbow_rank(s2, r_max)
    u, v = hosvd_factors(x, r_u, r_v)
    s3 = singular_values(core_rows(x, u, v))
    K = max(2, elbow_rank(s3, k_max))
    labels = ts_init(x, r_u, r_v, K, seed=seed)
    means = cluster_means(x.slices, labels, K)
    mean_spectra = [singular_values(m) for m in means]
    ranks = tuple(elbow_rank(s, r_max) for s in mean_spectra)
    spectra = {"mode1": s1, "mode2": s2, "core_mode3": s3}
    for k, s in enumerate(mean_spectra):
        spectra[f"cluster{k + 1}_mean"] = s
    return RankEstimate(r_u, r_v, K, ranks, labels, spectra)
