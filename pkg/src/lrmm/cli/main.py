"""``lrmm`` command-line interface.

Subcommands: generate, cluster, evaluate, bench, ranks, lrtest. Results go to
files and a JSON summary to stdout; logs and errors go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .. import hyptest
from ..cluster import estimate_ranks
from ..metrics import hamming_error
from ..model import separation_strength, signal_strength, tensor_signal_strength
from . import io
from .bench import cells, make_dataset, rows_to_csv, rows_to_json, run_bench
from .config import SETTINGS, load_config
from .methods import MethodContext, parse_method, run_method

log = logging.getLogger("lrmm")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str):
    vals = [float(v) for v in text.split(",") if v.strip()]
    return vals[0] if len(vals) == 1 else vals


def _config_overrides(a) -> dict:
    keys = ("setting", "d1", "d2", "n", "K", "ranks", "ru", "rv", "lam", "delta_param", "pbar",
            "trials", "T", "noise_sd", "warm_error", "restarts", "node_blocks")
    ov = {k: getattr(a, k, None) for k in keys}
    if getattr(a, "seed", None) is not None:
        ov["master_seed"] = a.seed
    if getattr(a, "method", None):
        ov["roster"] = a.method.split(",")
    return ov


def _add_config_flags(p, *, roster: bool) -> None:
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--setting", choices=SETTINGS)
    p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--ranks", type=_int_list, help="comma-separated per-cluster ranks")
    p.add_argument("--ru", type=int)
    p.add_argument("--rv", type=int)
    p.add_argument("--lam", type=_float_list, help="value or comma-separated sweep")
    p.add_argument("--delta-param", dest="delta_param", type=_float_list)
    p.add_argument("--pbar", type=_float_list)
    p.add_argument("--noise-sd", dest="noise_sd", type=float)
    p.add_argument("--node-blocks", dest="node_blocks", choices=("independent", "shared"))
    p.add_argument("--seed", type=int)
    if roster:
        p.add_argument("--trials", type=int)
        p.add_argument("--method", help="comma-separated roster, e.g. lr_lloyd+ts_init,vec_lloyd")
        p.add_argument("--T", type=int)
        p.add_argument("--warm-error", dest="warm_error", type=float)
        p.add_argument("--restarts", type=int)


# --- subcommands ---------------------------------------------------------------


def cmd_generate(a) -> int:
    cfg = load_config(a.config, _config_overrides(a))
    grid = cells(cfg)
    if len(grid) > 1:
        log.warning("config sweeps %d cells; generating the first one only", len(grid))
    cell = grid[0]
    seed = cfg.master_seed
    x, gt = make_dataset(cfg, cell, seed)
    out = Path(a.out)
    io.write_tensor(out, x, a.format)
    labels_path = Path(a.labels) if a.labels else out.with_name(out.name + ".labels.csv")
    io.write_labels(labels_path, gt.labels)
    meta = {
        "setting": cfg.setting,
        "dims": list(x.dims),
        "K": gt.K,
        "seed": seed,
        **{k: v for k, v in cell.items() if v is not None},
        "delta": separation_strength(gt.center_set),
        "lambda": signal_strength(gt.center_set),
        "Lambda_min": tensor_signal_strength(gt),
        "cluster_sizes": gt.sizes.tolist(),
        "ranks": list(gt.center_set.ranks),
        "tensor": str(out),
        "format": a.format,
        "labels": str(labels_path),
    }
    meta_path = out.with_name(out.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    _emit(meta)
    return 0


def cmd_cluster(a) -> int:
    x = io.read_tensor(a.tensor, a.format)
    truth = io.read_labels(a.truth) if a.truth else None
    init_labels = io.read_labels(a.init) if a.init else None
    method = a.method
    lloyd, init = parse_method(method)
    if init_labels is not None:
        if init != "file":
            method = f"{lloyd}+file" if lloyd else "file"
            log.info("using initial labels from %s", a.init)
        lloyd, init = parse_method(method)
    K = a.K
    if K is None:
        if a.ranks:
            K = len(a.ranks)
        elif init_labels is not None:
            K = int(init_labels.max()) + 1
        elif truth is not None:
            K = int(truth.max()) + 1
        else:
            K = 2
    ranks = a.ranks or [1] * K
    if len(ranks) != K:
        raise ValueError(f"need {K} ranks, got {len(ranks)}")
    d1, d2, n = x.dims
    ru = a.ru if a.ru is not None else min(sum(ranks), d1)
    rv = a.rv if a.rv is not None else min(sum(ranks), d2)
    for name, lab in (("truth", truth), ("init", init_labels)):
        if lab is not None and lab.size != n:
            raise ValueError(f"{name} labels have length {lab.size}, tensor has n={n}")
    ctx = MethodContext(K=K, ranks=ranks, ru=ru, rv=rv, T=a.T, seed=a.seed or 0, restarts=a.restarts,
                        warm_error=a.warm_error, truth=truth, init_labels=init_labels)
    labels, trace = run_method(method, x, ctx, truth)
    if a.out:
        io.write_labels(a.out, labels)
    summary = {"method": method, "n": n, "K": K, "ranks": list(ranks), "ru": ru, "rv": rv,
               "labels": a.out, "cluster_sizes": np.bincount(labels, minlength=K).tolist()}
    if trace is not None:
        summary["iterations"] = trace.n_iter
        summary["converged_at"] = trace.converged_at
        if trace.error_per_iter is not None:
            summary["error_per_iter"] = trace.error_per_iter
    if truth is not None:
        res = hamming_error(labels, truth, max(K, int(truth.max()) + 1))
        summary["error"] = res.rate
        summary["hamming"] = res.hamming
    _emit(summary)
    return 0


def cmd_evaluate(a) -> int:
    s_hat = io.read_labels(a.labels_a)
    s_star = io.read_labels(a.labels_b)
    if s_hat.size != s_star.size:
        raise ValueError(f"label files differ in length: {s_hat.size} vs {s_star.size}")
    K = a.K if a.K is not None else int(max(s_hat.max(), s_star.max())) + 1
    res = hamming_error(s_hat, s_star, K)
    # permutation[b] = a: true cluster b (1-based) is matched with estimated cluster a
    _emit({"n": int(s_hat.size), "K": K, "hamming": res.hamming, "rate": res.rate,
           "permutation": [int(p) + 1 for p in res.permutation]})
    return 0


def cmd_bench(a) -> int:
    cfg = load_config(a.config, _config_overrides(a))
    out = a.out or cfg.out
    rows = run_bench(cfg, threads=a.threads)
    text = rows_to_csv(rows)
    if out is None:
        sys.stdout.write(text)
        return 0
    out = Path(out)
    out.write_text(text)
    sidecar = Path(a.json or cfg.out_json or out.with_suffix(".json"))
    sidecar.write_text(rows_to_json(rows, cfg) + "\n")
    _emit({"csv": str(out), "json": str(sidecar), "rows": len(rows),
           "summary": [{"method": r.method, "lam": r.lam, "delta_param": r.delta_param, "pbar": r.pbar,
                        "mean_error": r.mean_error, "se": r.se} for r in rows]})
    return 0


def cmd_ranks(a) -> int:
    x = io.read_tensor(a.tensor, a.format)
    est = estimate_ranks(x, r_max=a.rmax, k_max=a.kmax, seed=a.seed or 0)
    report = {"r_u": est.r_u, "r_v": est.r_v, "K": est.K, "ranks": list(est.ranks)}
    if a.out:
        full = dict(report, spectra={k: v.tolist() for k, v in est.spectra.items()},
                    init_labels=[int(v) + 1 for v in est.init_labels])
        Path(a.out).write_text(json.dumps(full, indent=1) + "\n")
        report["spectra"] = a.out
    _emit(report)
    return 0


def cmd_lrtest(a) -> int:
    x = io.read_tensor(a.tensor, a.format)
    res = hyptest.reduction_test(x, epsilon=a.epsilon, seed=a.seed or 0, alpha_level=a.alpha)
    report = {"decision": res.decision, "statistic": res.statistic, "threshold": res.threshold,
              "epsilon": a.epsilon, "alpha": a.alpha, "dims": list(x.dims)}
    if a.out:
        Path(a.out).write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    _emit(report)
    return 0


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lrmm", description="Low-rank mixture clustering toolkit")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="draw one dataset and its ground truth")
    _add_config_flags(g, roster=False)
    g.add_argument("--format", choices=io.FORMATS, default="t3d1")
    g.add_argument("--out", required=True, help="tensor file (t3d1) or directory (csv)")
    g.add_argument("--labels", help="ground-truth label file (default: <out>.labels.csv)")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("cluster", help="cluster a tensor file")
    c.add_argument("tensor")
    c.add_argument("--format", choices=io.FORMATS)
    c.add_argument("--method", default="lr_lloyd+ts_init")
    c.add_argument("--K", type=int)
    c.add_argument("--ranks", type=_int_list)
    c.add_argument("--ru", type=int)
    c.add_argument("--rv", type=int)
    c.add_argument("--T", type=int, default=20)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--restarts", type=int, default=20)
    c.add_argument("--warm-error", dest="warm_error", type=float, default=0.3)
    c.add_argument("--init", help="initial label file (1-based)")
    c.add_argument("--truth", help="ground-truth label file; enables error reporting")
    c.add_argument("--out", help="output label file")
    c.set_defaults(func=cmd_cluster)

    e = sub.add_parser("evaluate", help="compare two label files")
    e.add_argument("labels_a")
    e.add_argument("labels_b")
    e.add_argument("--K", type=int)
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("bench", help="run a benchmark table")
    _add_config_flags(b, roster=True)
    b.add_argument("--out", help="CSV output (default: stdout)")
    b.add_argument("--json", help="per-trial sidecar (default: <out>.json)")
    b.add_argument("--threads", type=int, help="overrides LRMM_THREADS")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("ranks", help="estimate Tucker ranks, K and cluster ranks")
    r.add_argument("tensor")
    r.add_argument("--format", choices=io.FORMATS)
    r.add_argument("--rmax", type=int, default=10)
    r.add_argument("--kmax", type=int, default=10)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", help="JSON file with the scree sequences")
    r.set_defaults(func=cmd_ranks)

    t = sub.add_parser("lrtest", help="rank-one signal detection test")
    t.add_argument("tensor")
    t.add_argument("--format", choices=io.FORMATS)
    t.add_argument("--epsilon", type=float, default=hyptest.DEFAULT_EPSILON)
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", help="JSON report file")
    t.set_defaults(func=cmd_lrtest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except Exception as exc:  # reported, never a traceback on stdout
        log.error("%s: %s", type(exc).__name__, exc)
        log.debug("details", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
