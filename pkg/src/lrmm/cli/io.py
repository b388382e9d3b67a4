"""Tensor and label files.

T3D1 binary layout: the 4 magic bytes ``T3D1``, the dims ``(d1, d2, n)`` as
little-endian uint64, then ``d1 * d2 * n`` little-endian float64 values, one
slice after another, each slice in row-major order.

CSV layout: a directory holding ``manifest.csv`` (columns ``index,file,d1,d2``)
and one headerless CSV per slice.

Label files: one header line ``label`` followed by 1-based cluster ids.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from ..tensor_core import Tensor3

MAGIC = b"T3D1"
_HEADER = np.dtype([("magic", "S4"), ("dims", "<u8", (3,))])
FORMATS = ("t3d1", "csv")


class FormatError(ValueError):
    pass


def write_t3d1(path, x: Tensor3) -> None:
    d1, d2, n = x.dims
    header = np.zeros((), dtype=_HEADER)
    header["magic"] = MAGIC
    header["dims"] = (d1, d2, n)
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(x.slices.astype("<f8", copy=False).tobytes(order="C"))


def read_t3d1(path) -> Tensor3:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.itemsize or raw[:4] != MAGIC:
        raise FormatError(f"{path}: not a T3D1 file")
    d1, d2, n = (int(v) for v in np.frombuffer(raw, dtype="<u8", count=3, offset=4))
    body = raw[_HEADER.itemsize :]
    if len(body) != 8 * d1 * d2 * n:
        raise FormatError(f"{path}: expected {d1 * d2 * n} values for dims {(d1, d2, n)}, found {len(body) // 8}")
    data = np.frombuffer(body, dtype="<f8").reshape(n, d1, d2)
    return Tensor3.from_slices(data.astype(np.float64))


def write_csv_dir(path, x: Tensor3) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    d1, d2, n = x.dims
    width = len(str(n))
    with open(root / "manifest.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["index", "file", "d1", "d2"])
        for i in range(n):
            name = f"slice_{i + 1:0{width}d}.csv"
            np.savetxt(root / name, x.slice(i), delimiter=",", fmt="%.17g")
            w.writerow([i + 1, name, d1, d2])


def read_csv_dir(path) -> Tensor3:
    root = Path(path)
    manifest = root / "manifest.csv"
    if not manifest.is_file():
        raise FormatError(f"{root}: missing manifest.csv")
    with open(manifest, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise FormatError(f"{manifest}: no slices listed")
    rows.sort(key=lambda r: int(r["index"]))
    slices = []
    for r in rows:
        m = np.loadtxt(root / r["file"], delimiter=",", ndmin=2)
        if m.shape != (int(r["d1"]), int(r["d2"])):
            raise FormatError(f"{r['file']}: shape {m.shape} does not match manifest")
        slices.append(m)
    if len({s.shape for s in slices}) != 1:
        raise FormatError("slices have different shapes")
    return Tensor3.from_slices(np.stack(slices))


def detect_format(path) -> str:
    return "csv" if os.path.isdir(path) else "t3d1"


def write_tensor(path, x: Tensor3, fmt: str = "t3d1") -> None:
    if fmt == "t3d1":
        write_t3d1(path, x)
    elif fmt == "csv":
        write_csv_dir(path, x)
    else:
        raise ValueError(f"unknown tensor format {fmt!r}; choose from {FORMATS}")


def read_tensor(path, fmt: str | None = None) -> Tensor3:
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such tensor file: {path}")
    fmt = fmt or detect_format(path)
    if fmt == "t3d1":
        return read_t3d1(path)
    if fmt == "csv":
        return read_csv_dir(path)
    raise ValueError(f"unknown tensor format {fmt!r}; choose from {FORMATS}")


def write_labels(path, labels) -> None:
    """Write 0-based labels as 1-based ids."""
    lab = np.asarray(labels, dtype=np.int64).ravel()
    with open(path, "w", newline="") as f:
        f.write("label\n")
        f.writelines(f"{v + 1}\n" for v in lab)


def read_labels(path) -> np.ndarray:
    """Read 1-based ids, returned 0-based."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise FormatError(f"{path}: empty label file")
    body = [r for r in rows[1:] if r]
    try:
        vals = np.array([int(r[0]) for r in body], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"{path}: labels must be integers") from exc
    if vals.size == 0:
        raise FormatError(f"{path}: no labels")
    if vals.min() < 1:
        raise FormatError(f"{path}: labels must be 1-based positive ids")
    return vals - 1
