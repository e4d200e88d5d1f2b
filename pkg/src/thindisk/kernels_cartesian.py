"""Closed-form Cartesian force kernels tabulated over cell offsets.

Each kernel is the integral over one source cell of the in-plane force
Green's function derivative times 1, (xbar - x_src) or (ybar - y_src); all
six have exact antiderivatives evaluated as double corner differences.  The
tables depend on the offsets (di, dj) = (i - i', j - j') only, which is what
makes the force sums convolutions.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grids import CartesianGrid

KINDS = ("x0", "xx", "xy", "y0", "yx", "yy")


def _log_plus_hypot(a, b):
    """log(a + hypot(a, b)), rewritten for a < 0 to avoid cancellation.

    For a < 0: a + hypot(a,b) = b^2/(hypot(a,b) - a).  b must be nonzero
    when a <= 0; on-grid corner abscissae are odd multiples of dx/2, so the
    degenerate b == 0 case never arises from integer cell offsets.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    h = np.hypot(a, b)
    pos = a > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(pos, np.log(np.where(pos, a, 1.0) + h),
                       2.0 * np.log(np.abs(b)) - np.log(h - np.where(pos, 0.0, a)))
    return out


def _corner_diff(fn, up, um, vp, vm):
    return fn(up, vp) - fn(um, vp) - fn(up, vm) + fn(um, vm)


def _anti_x0(u, v):
    # integral of u/(u^2+v^2)^{3/2}
    return -_log_plus_hypot(v, u)


def _anti_xx_tail(u, v):
    # integral of u^2/(u^2+v^2)^{3/2}; the v*log factor vanishes as v -> 0
    with np.errstate(invalid="ignore"):
        t = np.asarray(v, dtype=float) * _log_plus_hypot(u, v)
    return np.where(v == 0.0, 0.0, t)


def _anti_xy_tail(u, v):
    # integral of u*v/(u^2+v^2)^{3/2}
    return -np.hypot(u, v)


def eval_cartesian_kernel(kind: str, di, dj, grid: CartesianGrid) -> np.ndarray:
    """Kernel value(s) for offsets (di, dj) = (i - i', j - j').

    di, dj may be scalars or broadcastable integer arrays.  The y-family is
    the x-family with the roles of the two axes exchanged.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}")
    di = np.asarray(di)
    dj = np.asarray(dj)
    if kind.startswith("y"):
        swap = {"y0": "x0", "yx": "xy", "yy": "xx"}[kind]
        return eval_cartesian_kernel(swap, dj, di, grid)

    dx = grid.dx
    up = (0.5 - di) * dx
    um = (-0.5 - di) * dx
    vp = (0.5 - dj) * dx
    vm = (-0.5 - dj) * dx
    k0 = _corner_diff(_anti_x0, up, um, vp, vm)
    if kind == "x0":
        return k0
    if kind == "xx":
        return di * dx * k0 + _corner_diff(_anti_xx_tail, up, um, vp, vm)
    # kind == "xy"
    return dj * dx * k0 + _corner_diff(_anti_xy_tail, up, um, vp, vm)


def wrap_offsets(n: int) -> np.ndarray:
    """Offsets [0..n, -n+1..-1] in the wrap-around order of a 2n transform."""
    return np.concatenate([np.arange(n + 1), np.arange(-n + 1, 0)])


@dataclass
class KernelTables:
    """All six kernels tabulated in the 2n x 2n wrap-around layout.

    Entry [p, q] holds the kernel at offsets (di, dj) = (offs[p], offs[q])
    with offs = wrap_offsets(n); forward spectra are cached on first use so
    repeated solves on one grid pay the transforms once.
    """

    grid: CartesianGrid
    tables: dict = field(repr=False)
    _spectra: dict = field(default_factory=dict, repr=False)

    def table(self, kind: str) -> np.ndarray:
        return self.tables[kind]

    def spectrum(self, kind: str) -> np.ndarray:
        if kind not in self._spectra:
            self._spectra[kind] = np.fft.rfft2(self.tables[kind])
        return self._spectra[kind]


def tabulate_cartesian_kernels(grid: CartesianGrid, threads: int = 1) -> KernelTables:
    """Tabulate the x-family over all wrapped offsets; the y-family is its
    transpose.  Cost is O(n^2) closed-form evaluations per kind."""
    n = grid.n
    offs = wrap_offsets(n)
    di = offs[:, None]
    dj = offs[None, :]

    def rows(kind, lo, hi):
        return eval_cartesian_kernel(kind, di[lo:hi], dj, grid)

    tables: dict[str, np.ndarray] = {}
    for kind in ("x0", "xx", "xy"):
        if threads and threads > 1:
            size = 2 * n
            step = max(64, size // (4 * threads))
            chunks = [(lo, min(lo + step, size)) for lo in range(0, size, step)]
            out = np.empty((size, size))
            with ThreadPoolExecutor(max_workers=threads) as ex:
                for (lo, hi), block in zip(chunks, ex.map(lambda c: rows(kind, *c), chunks)):
                    out[lo:hi] = block
            tables[kind] = out
        else:
            tables[kind] = eval_cartesian_kernel(kind, di, dj, grid)
    tables["y0"] = np.ascontiguousarray(tables["x0"].T)
    tables["yx"] = np.ascontiguousarray(tables["xy"].T)
    tables["yy"] = np.ascontiguousarray(tables["xx"].T)
    return KernelTables(grid=grid, tables=tables)
