from .init import hosvd_factors, kmeans_m3, project, rts_init, spectral_m3, ts_init, warm_start
from .kmeans import KMeansResult, kmeans_rows
from .lloyd import LloydResult, LloydTrace, lr_lloyd, rlr_lloyd, vec_lloyd
from .ranks import RankEstimate, estimate_ranks

__all__ = [
    "KMeansResult",
    "LloydResult",
    "LloydTrace",
    "RankEstimate",
    "estimate_ranks",
    "hosvd_factors",
    "kmeans_m3",
    "kmeans_rows",
    "lr_lloyd",
    "project",
    "rlr_lloyd",
    "rts_init",
    "spectral_m3",
    "ts_init",
    "vec_lloyd",
    "warm_start",
]
