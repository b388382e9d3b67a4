"""Third-order tensors of stacked matrix observations.

A :class:`Tensor3` has dims ``(d1, d2, n)``; entry ``(i1, i2, i3)`` is row
``i1``, column ``i2`` of observation ``i3``. Storage is slice-major: an
``(n, d1, d2)`` C-contiguous array, so each observation is a contiguous block
and :func:`slice` returns a view.

Matricization index maps (0-based):

* mode 1: ``(i1, i2*n + i3)``, shape ``d1 x (d2*n)``
* mode 2: ``(i2, i1*n + i3)``, shape ``d2 x (d1*n)``
* mode 3: ``(i3, i1*d2 + i2)``, shape ``n x (d1*d2)``; row ``i`` is the
  row-major vectorization of observation ``i``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


class Tensor3:
    """Immutable ``d1 x d2 x n`` real tensor."""

    __slots__ = ("_slices",)

    def __init__(self, data):
        """Build from an array indexed ``[i1, i2, i3]`` (shape ``(d1, d2, n)``)."""
        a = np.asarray(data, dtype=np.float64)
        if a.ndim != 3:
            raise ValueError(f"expected a 3-way array, got ndim={a.ndim}")
        self._slices = _freeze(np.moveaxis(a, 2, 0))

    @classmethod
    def from_slices(cls, slices) -> "Tensor3":
        """Build from an ``(n, d1, d2)`` array of observations (no copy if possible)."""
        s = np.asarray(slices, dtype=np.float64)
        if s.ndim != 3:
            raise ValueError(f"expected an (n, d1, d2) array, got ndim={s.ndim}")
        obj = cls.__new__(cls)
        obj._slices = _freeze(s)
        return obj

    @property
    def slices(self) -> np.ndarray:
        """Read-only ``(n, d1, d2)`` view of the observations."""
        return self._slices

    @property
    def array(self) -> np.ndarray:
        """Read-only ``(d1, d2, n)`` view indexed ``[i1, i2, i3]``."""
        return np.moveaxis(self._slices, 0, 2)

    @property
    def dims(self) -> tuple[int, int, int]:
        n, d1, d2 = self._slices.shape
        return d1, d2, n

    @property
    def n(self) -> int:
        return self._slices.shape[0]

    def slice(self, i: int) -> np.ndarray:
        return slice(self, i)

    def __repr__(self) -> str:
        d1, d2, n = self.dims
        return f"Tensor3(d1={d1}, d2={d2}, n={n})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor3):
            return NotImplemented
        return self._slices.shape == other._slices.shape and bool(
            np.array_equal(self._slices, other._slices)
        )

    __hash__ = None


def _freeze(s: np.ndarray) -> np.ndarray:
    if s.size == 0 or 0 in s.shape:
        raise ValueError("tensor dims must be positive")
    s = np.ascontiguousarray(s).view()
    if not np.all(np.isfinite(s)):
        raise ValueError("tensor entries must be finite")
    s.flags.writeable = False
    return s


def _check_mode(mode: int) -> None:
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode!r}")


def matricize(t: Tensor3, mode: int) -> np.ndarray:
    """Mode-``mode`` unfolding (see module docstring for the index map)."""
    _check_mode(mode)
    s = t.slices
    n, d1, d2 = s.shape
    if mode == 1:
        return np.transpose(s, (1, 2, 0)).reshape(d1, d2 * n)
    if mode == 2:
        return np.transpose(s, (2, 1, 0)).reshape(d2, d1 * n)
    return s.reshape(n, d1 * d2).copy()


def fold(m, mode: int, dims: Sequence[int]) -> Tensor3:
    """Inverse of :func:`matricize` for a tensor of shape ``dims = (d1, d2, n)``."""
    _check_mode(mode)
    d1, d2, n = (int(v) for v in dims)
    m = np.asarray(m, dtype=np.float64)
    expected = {1: (d1, d2 * n), 2: (d2, d1 * n), 3: (n, d1 * d2)}[mode]
    if m.shape != expected:
        raise ValueError(f"mode-{mode} unfolding of {dims} must have shape {expected}, got {m.shape}")
    if mode == 1:
        s = np.transpose(m.reshape(d1, d2, n), (2, 0, 1))
    elif mode == 2:
        s = np.transpose(m.reshape(d2, d1, n), (2, 1, 0))
    else:
        s = m.reshape(n, d1, d2)
    return Tensor3.from_slices(s)


def mode_multiply(t: Tensor3, a, mode: int) -> Tensor3:
    """Marginal product ``t x_mode a``.

    Contracts the mode-``mode`` index of ``t`` with the column index of ``a``:
    ``out(.., j, ..) = sum_i a[j, i] * t(.., i, ..)``. The mode size becomes
    ``a.shape[0]``.
    """
    _check_mode(mode)
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("mode_multiply needs a matrix")
    size = t.dims[mode - 1]
    if a.shape[1] != size:
        raise ValueError(f"matrix has {a.shape[1]} columns but mode {mode} has size {size}")
    s = t.slices
    if mode == 1:
        out = np.einsum("ji,nik->njk", a, s, optimize=True)
    elif mode == 2:
        out = np.einsum("jk,nik->nij", a, s, optimize=True)
    else:
        out = np.einsum("jn,nik->jik", a, s, optimize=True)
    return Tensor3.from_slices(out)


def tucker_product(core: Tensor3, u, v, w) -> Tensor3:
    """Multi-linear product ``core x1 u x2 v x3 w``."""
    return mode_multiply(mode_multiply(mode_multiply(core, u, 1), v, 2), w, 3)


def slice(t: Tensor3, i: int) -> np.ndarray:  # noqa: A001 - mirrors the math name
    """Observation ``i`` (0-based) as a read-only ``d1 x d2`` view."""
    n = t.n
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool):
        raise TypeError("slice index must be an integer")
    if not 0 <= i < n:
        raise IndexError(f"slice index {i} out of range for n={n}")
    return t.slices[i]


def stack(ms: Sequence) -> Tensor3:
    """Stack equally shaped matrices as slices ``0..n-1``."""
    ms = list(ms)
    if not ms:
        raise ValueError("cannot stack an empty list")
    mats = [np.asarray(m, dtype=np.float64) for m in ms]
    shape = mats[0].shape
    if len(shape) != 2:
        raise ValueError("stack expects matrices")
    for k, m in enumerate(mats):
        if m.shape != shape:
            raise ValueError(f"ragged shapes: matrix {k} has shape {m.shape}, expected {shape}")
    return Tensor3.from_slices(np.stack(mats, axis=0))


def frobenius(t: Tensor3) -> float:
    return float(np.linalg.norm(t.slices.ravel()))
