"""Clustering of matrix-valued observations drawn from a low-rank mixture.

Low-rank Lloyd iterations, tensor spectral initialization, their relaxed
two-cluster variants, scree-based rank estimation, a detection test, and
seeded simulation generators.
"""

from .cluster import (
    estimate_ranks,
    kmeans_m3,
    kmeans_rows,
    lr_lloyd,
    rlr_lloyd,
    rts_init,
    spectral_m3,
    ts_init,
    vec_lloyd,
    warm_start,
)
from .metrics import align_labels, clustering_error, frob_loss, hamming_error
from .model import CenterSet, GroundTruth, separation_strength, signal_strength
from .synth import LrMMSpec, MMSBMSpec, gen_lrmm, gen_mmsbm
from .tensor_core import Tensor3, matricize

__version__ = "0.1.0"

__all__ = [
    "CenterSet",
    "GroundTruth",
    "LrMMSpec",
    "MMSBMSpec",
    "Tensor3",
    "align_labels",
    "clustering_error",
    "estimate_ranks",
    "frob_loss",
    "gen_lrmm",
    "gen_mmsbm",
    "hamming_error",
    "kmeans_m3",
    "kmeans_rows",
    "lr_lloyd",
    "matricize",
    "rlr_lloyd",
    "rts_init",
    "separation_strength",
    "signal_strength",
    "spectral_m3",
    "ts_init",
    "vec_lloyd",
    "warm_start",
]
