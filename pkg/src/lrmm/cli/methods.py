"""Named clustering pipelines: ``<lloyd>+<init>`` or a bare initializer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..cluster import (
    LloydTrace,
    kmeans_m3,
    lr_lloyd,
    rlr_lloyd,
    rts_init,
    spectral_m3,
    ts_init,
    vec_lloyd,
    warm_start,
)
from ..tensor_core import Tensor3

INITS = ("ts_init", "rts_init", "kmeans_m3", "spectral_m3", "warm", "truth", "file")
LLOYDS = ("lr_lloyd", "rlr_lloyd", "vec_lloyd")


@dataclass(frozen=True)
class MethodContext:
    K: int
    ranks: Sequence[int]
    ru: int
    rv: int
    T: int = 20
    seed: int = 0
    restarts: int = 20
    warm_error: float = 0.3
    truth: Optional[np.ndarray] = None  # needed by "warm" and "truth"
    init_labels: Optional[np.ndarray] = None  # needed by "file"


def parse_method(name: str) -> tuple[Optional[str], str]:
    """``"lr_lloyd+ts_init"`` -> ``("lr_lloyd", "ts_init")``; ``"ts_init"`` -> ``(None, "ts_init")``.

    A bare Lloyd name gets its natural initializer.
    """
    parts = name.split("+")
    if len(parts) == 1:
        (p,) = parts
        if p in LLOYDS:
            return p, {"lr_lloyd": "ts_init", "rlr_lloyd": "rts_init", "vec_lloyd": "spectral_m3"}[p]
        if p in INITS:
            return None, p
    elif len(parts) == 2 and parts[0] in LLOYDS and parts[1] in INITS:
        return parts[0], parts[1]
    raise ValueError(
        f"unknown method {name!r}: use one of {LLOYDS}, {INITS} or '<lloyd>+<init>'"
    )


def initial_labels(init: str, x: Tensor3, ctx: MethodContext) -> np.ndarray:
    if init == "ts_init":
        return ts_init(x, ctx.ru, ctx.rv, ctx.K, seed=ctx.seed, restarts=ctx.restarts)
    if init == "rts_init":
        return rts_init(x, int(ctx.ranks[0]), seed=ctx.seed, restarts=ctx.restarts)
    if init == "kmeans_m3":
        return kmeans_m3(x, ctx.K, seed=ctx.seed, restarts=ctx.restarts)
    if init == "spectral_m3":
        return spectral_m3(x, ctx.K, seed=ctx.seed, restarts=ctx.restarts)
    if init in ("warm", "truth"):
        if ctx.truth is None:
            raise ValueError(f"init {init!r} needs ground-truth labels")
        return warm_start(ctx.truth, ctx.K, ctx.warm_error) if init == "warm" else np.asarray(ctx.truth)
    if init == "file":
        if ctx.init_labels is None:
            raise ValueError("init 'file' needs initial labels")
        return np.asarray(ctx.init_labels)
    raise ValueError(f"unknown init {init!r}")


def run_method(
    name: str, x: Tensor3, ctx: MethodContext, gt=None
) -> tuple[np.ndarray, Optional[LloydTrace]]:
    """Run a named pipeline; returns the labels and the Lloyd trace (if any)."""
    lloyd, init = parse_method(name)
    if lloyd == "rlr_lloyd" and ctx.K != 2:
        raise ValueError("rlr_lloyd is a two-cluster method")
    if init == "rts_init" and ctx.K != 2:
        raise ValueError("rts_init is a two-cluster initializer")
    s0 = initial_labels(init, x, ctx)
    if lloyd is None:
        return np.asarray(s0), None
    if lloyd == "lr_lloyd":
        res = lr_lloyd(x, s0, ctx.ranks, T=ctx.T, gt=gt)
    elif lloyd == "rlr_lloyd":
        res = rlr_lloyd(x, s0, int(ctx.ranks[0]), int(ctx.ranks[1]), T=ctx.T, gt=gt)
    else:
        res = vec_lloyd(x, s0, ctx.K, T=ctx.T, gt=gt)
    return res.labels, res.trace
