"""Monte Carlo benchmark: error of each roster method over seeded trials.

Every trial draws its own dataset from a seed derived from
``(master_seed, trial)`` and all methods run on that same dataset. Trials may
run on several threads but rows are aggregated in trial order, so the CSV is
identical for any thread count.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..metrics import clustering_error
from ..model import GroundTruth, separation_strength
from ..rng import stream
from ..synth import LrMMSpec, MMSBMSpec, gen_lrmm, gen_mmsbm
from ..tensor_core import Tensor3
from .config import ExperimentConfig
from .methods import MethodContext, run_method

log = logging.getLogger(__name__)

SWEEP_FIELDS = ("lam", "delta_param", "pbar")
CSV_FIELDS = (
    "setting", "d1", "d2", "n", "K", "lam", "delta_param", "pbar", "delta",
    "method", "trials", "mean_error", "sd", "se",
)


@dataclass(frozen=True)
class BenchRow:
    setting: str
    d1: int
    d2: int
    n: int
    K: int
    lam: Optional[float]
    delta_param: Optional[float]
    pbar: Optional[float]
    delta: float  # separation strength averaged over trials
    method: str
    trials: int
    mean_error: float
    sd: float  # sample standard deviation across trials
    se: float  # sd / sqrt(trials)
    errors: tuple = ()


def thread_count(env: Optional[str] = None) -> int:
    """``LRMM_THREADS``: unset or 0 means one thread per CPU."""
    raw = os.environ.get("LRMM_THREADS", "0") if env is None else env
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"LRMM_THREADS must be an integer, got {raw!r}") from None
    if k < 0:
        raise ValueError("LRMM_THREADS must be >= 0")
    return k or (os.cpu_count() or 1)


def trial_seed(master_seed: int, trial: int) -> int:
    return int(stream(master_seed, "trial", trial).integers(0, 2**63 - 1))


def _as_list(v):
    if v is None:
        return [None]
    return list(v) if isinstance(v, (list, tuple)) else [v]


def cells(cfg: ExperimentConfig) -> list[dict]:
    """Cartesian product of the sweep fields that are relevant to the setting."""
    relevant = {
        "s1_1": ("lam",),
        "s1_2": ("pbar",),
        "s2_1": ("lam", "delta_param"),
        "s2_2": ("lam",),
        "custom": (),
    }[cfg.setting]
    values = [_as_list(getattr(cfg, f)) if f in relevant else [None] for f in SWEEP_FIELDS]
    return [dict(zip(SWEEP_FIELDS, combo)) for combo in itertools.product(*values)]


def make_dataset(cfg: ExperimentConfig, cell: dict, seed: int) -> tuple[Tensor3, GroundTruth]:
    if cfg.setting == "s1_2":
        spec = MMSBMSpec(K=cfg.K, d=cfg.d1, pbar=float(cell["pbar"]), n=cfg.n, node_blocks=cfg.node_blocks)
        return gen_mmsbm(spec, seed)
    if cfg.setting == "custom":
        spec = LrMMSpec(cfg.d1, cfg.d2, cfg.n, K=cfg.K, recipe="random_factors", sigmas=cfg.sigmas,
                        noise_sd=cfg.noise_sd)
    else:
        spec = LrMMSpec(cfg.d1, cfg.d2, cfg.n, K=cfg.K, recipe=cfg.setting, lam=float(cell["lam"]),
                        delta_param=None if cell["delta_param"] is None else float(cell["delta_param"]),
                        noise_sd=cfg.noise_sd)
    return gen_lrmm(spec, seed)


def method_context(cfg: ExperimentConfig, seed: int, truth=None) -> MethodContext:
    ru, rv = cfg.tucker_ranks()
    return MethodContext(K=cfg.K, ranks=cfg.cluster_ranks(), ru=ru, rv=rv, T=cfg.T, seed=seed,
                         restarts=cfg.restarts, warm_error=cfg.warm_error, truth=truth)


def run_trial(cfg: ExperimentConfig, cell: dict, trial: int) -> tuple[float, list[float]]:
    seed = trial_seed(cfg.master_seed, trial)
    x, gt = make_dataset(cfg, cell, seed)
    ctx = method_context(cfg, seed, truth=gt.labels)
    errs = [clustering_error(run_method(m, x, ctx)[0], gt.labels, cfg.K) for m in cfg.roster]
    return separation_strength(gt.center_set), errs


def run_bench(cfg: ExperimentConfig, threads: Optional[int] = None) -> list[BenchRow]:
    threads = thread_count() if threads is None else max(1, int(threads))
    rows = []
    for cell in cells(cfg):
        log.info("cell %s: %d trials on %d thread(s)", cell, cfg.trials, threads)
        if threads == 1:
            results = [run_trial(cfg, cell, t) for t in range(cfg.trials)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda t: run_trial(cfg, cell, t), range(cfg.trials)))
        deltas = np.array([r[0] for r in results])
        errs = np.array([r[1] for r in results])  # trials x methods
        for j, m in enumerate(cfg.roster):
            e = errs[:, j]
            sd = float(np.std(e, ddof=1)) if e.size > 1 else 0.0
            rows.append(BenchRow(
                cfg.setting, cfg.d1, cfg.d2, cfg.n, cfg.K,
                cell["lam"], cell["delta_param"], cell["pbar"], float(deltas.mean()),
                m, cfg.trials, float(e.mean()), sd, sd / np.sqrt(e.size), tuple(float(v) for v in e),
            ))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in CSV_FIELDS])
    return buf.getvalue()


def rows_to_json(rows: list[BenchRow], cfg: ExperimentConfig) -> str:
    payload = {
        "config": cfg.to_dict(),
        "rows": [{**{f: getattr(r, f) for f in CSV_FIELDS}, "errors": list(r.errors)} for r in rows],
    }
    return json.dumps(payload, indent=1)
