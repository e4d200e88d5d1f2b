"""Polar force kernels on the logarithmic grid.

Radial-force kernels combine exact radial antiderivatives (H1, H2) with a
two-node trapezoid rule in theta; the integrand's log(1 - cos) singularity
caps that rule at first order, which is the method's accuracy limit in
polar coordinates.  Azimuthal-force kernels for the density and radial-slope
terms have exact double antiderivatives; the theta-slope kind is trapezoid
based like the radial family.  Matching "hole" kernels integrate over the
small disk [0, r_edges[0]] that the logarithmic rings never reach.

All tables are dimensionless functions of the index offsets alone.  Radial
scale factors (r_i on the slope terms) are applied at force-assembly time,
see solver.py, which is also where the overall orientation sign lives.

The kind tags: "r0", "rr", "rt" build the radial force from (density,
d/dr slope, d/dtheta slope); "t0", "tr", "tt" build the azimuthal force;
"p0", "pr", "pt" are the analogous kernels for the in-plane potential.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import PolarGrid

KINDS = ("r0", "rr", "rt", "t0", "tr", "tt")
POTENTIAL_KINDS = ("p0", "pr", "pt")


class SingularEvaluationError(ValueError):
    """Antiderivative evaluated at its logarithmic singularity."""


def _log_term(t, u):
    """log(-cos u + t + F(t, u)) with the cancellation-free rewrite.

    The argument vanishes only for u = 0 (mod 2pi) with t <= 1; trapezoid
    nodes sit half a cell away from every center, so tabulation never lands
    there.
    """
    a = np.asarray(t, dtype=float) - np.cos(u)
    b = np.sin(u)
    h = np.hypot(a, b)
    pos = a > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(pos, np.log(np.where(pos, a, 1.0) + h),
                        2.0 * np.log(np.abs(b)) - np.log(h - np.where(pos, 0.0, a)))


def eval_F(t, theta) -> np.ndarray:
    """Chord factor sqrt(1 + t^2 - 2 t cos(theta)) for dimensionless radius t."""
    t = np.asarray(t, dtype=float)
    return np.hypot(t - np.cos(theta), np.sin(theta))


def _check_regular(t, theta):
    arg = -np.cos(theta) + np.asarray(t, float) + eval_F(t, theta)
    if np.any(arg <= 0):
        raise SingularEvaluationError(
            "antiderivative log argument vanishes (theta = 0 mod 2pi with t <= 1)")


def eval_H1(t, theta) -> np.ndarray:
    """Radial antiderivative of t*(1 - t*cos(theta))/F^3."""
    _check_regular(t, theta)
    c = np.cos(theta)
    return -c * _log_term(t, theta) + (2.0 * c * t - 1.0) / eval_F(t, theta)


def eval_H2(t, theta) -> np.ndarray:
    """Radial antiderivative of t^2*(1 - t*cos(theta))/F^3."""
    _check_regular(t, theta)
    c = np.cos(theta)
    F = eval_F(t, theta)
    return -((3.0 * c * c - 1.0) * _log_term(t, theta)
             + (-6.0 * t * c * c + 3.0 * c + t * t * c + t) / F)


# ---------------------------------------------------------------------------
# azimuthal-family and potential-family antiderivatives
#
# The printed closed forms circulating for the azimuthal kernels fail the
# quadrature oracle (see tests), so these are derived from scratch:
#   d2/du dt of _az0 = t^2 sin(u)/F^3
#   d2/du dt of _az1 = t^3 sin(u)/F^3
#   d/dt    of _az2 = sin(u) * (radial antiderivative of t^2/F^3)
#   d/dt    of _pot0 = t/F,   d/dt of _pot1 = t^2/F


def _h1(t, u):
    c = np.cos(u)
    return -c * _log_term(t, u) + (2.0 * c * t - 1.0) / eval_F(t, u)


def _h2(t, u):
    c = np.cos(u)
    F = eval_F(t, u)
    return -((3.0 * c * c - 1.0) * _log_term(t, u)
             + (-6.0 * t * c * c + 3.0 * c + t * t * c + t) / F)


def _az0(t, u):
    c = np.cos(u)
    return -(eval_F(t, u) + c * _log_term(t, u))


def _az1(t, u):
    c = np.cos(u)
    return -(0.5 * (t + 3.0 * c) * eval_F(t, u) + 0.5 * (3.0 * c * c - 1.0) * _log_term(t, u))


def _az2(t, u):
    c = np.cos(u)
    s = np.sin(u)
    return s * _log_term(t, u) - (t * (1.0 - 2.0 * c * c) + c) / (s * eval_F(t, u))


def _pot0(t, u):
    c = np.cos(u)
    return eval_F(t, u) + c * _log_term(t, u)


def _pot1(t, u):
    c = np.cos(u)
    return 0.5 * ((t + 3.0 * c) * eval_F(t, u) + (3.0 * c * c - 1.0) * _log_term(t, u))


def _theta_nodes(dj, dtheta):
    """Trapezoid node angles relative to the target center for offset j - j'."""
    dj = np.asarray(dj)
    return (-dj + 0.5) * dtheta, (-dj - 0.5) * dtheta


def _radial_limits(di, grid: PolarGrid):
    """Dimensionless cell limits r_{i'+-1/2}/r_i as functions of di = i - i'."""
    b = grid.ratio
    tp = 2.0 * np.power(b, np.asarray(di, dtype=float)) / (1.0 + b)
    return tp, b * tp


def _assemble(kind, tp, tm, up, um, ratio_correction, dtheta):
    """One kernel value from its radial limits and trapezoid nodes.

    ratio_correction is r_src/r_target (beta**di for ring cells, r0/r_i for
    hole cells); it multiplies the zeroth-order kernel inside the slope kinds.
    """
    def trap(f):
        return 0.5 * (f(tp, up) - f(tm, up) + f(tp, um) - f(tm, um)) * dtheta

    def trap_weighted(f):
        # node weight is (thetabar - theta_src) = +-dtheta/2
        return 0.25 * dtheta * (f(tp, up) - f(tm, up) - (f(tp, um) - f(tm, um))) * dtheta

    def corner(f):
        return f(tp, up) - f(tm, up) - (f(tp, um) - f(tm, um))

    if kind == "r0":
        return trap(_h1)
    if kind == "rr":
        return trap(_h2) - ratio_correction * trap(_h1)
    if kind == "rt":
        return trap_weighted(_h1)
    if kind == "t0":
        return corner(_az0)
    if kind == "tr":
        return corner(_az1) - ratio_correction * corner(_az0)
    if kind == "tt":
        return trap_weighted(_az2)
    if kind == "p0":
        return trap(_pot0)
    if kind == "pr":
        return trap(_pot1) - ratio_correction * trap(_pot0)
    if kind == "pt":
        return trap_weighted(_pot0)
    raise ValueError(f"unknown kernel kind {kind!r}")


def eval_polar_kernel(kind: str, di, dj, grid: PolarGrid) -> np.ndarray:
    """Ring-cell kernel at radial offset di = i - i', angular offset dj = j - j'."""
    tp, tm = _radial_limits(di, grid)
    up, um = _theta_nodes(dj, grid.dtheta)
    corr = np.power(grid.ratio, np.asarray(di, dtype=float))
    return _assemble(kind, tp, tm, up, um, corr, grid.dtheta)


def eval_hole_kernel(kind: str, i, dj, grid: PolarGrid) -> np.ndarray:
    """Hole-cell kernel for absolute target ring i >= 1 and offset dj.

    Radial limits run from 0 to r_edges[0]/r_i; the slope kinds measure the
    radial excursion from the hole's representative radius.
    """
    i = np.asarray(i)
    if np.any(i < 1):
        raise ValueError("hole kernels are defined for target rings i >= 1")
    b = grid.ratio
    th = 2.0 * np.power(b, np.asarray(i, dtype=float)) / (1.0 + b)
    up, um = _theta_nodes(dj, grid.dtheta)
    r_i = grid.ratio ** (grid.n - np.asarray(i, dtype=float)) * grid.outer_radius * (1.0 + b) / 2.0
    corr = grid.hole_radius_mid / r_i
    return _assemble(kind, th, np.zeros_like(th), up, um, corr, grid.dtheta)


@dataclass
class PolarKernelTables:
    """Ring tables in wrap layout (2n, n) plus hole tables (n, n).

    Ring entry [p, q] is the kernel at di = wrap_offsets(n)[p] (radial zero
    padding) and dj = q taken modulo n (the azimuthal axis is genuinely
    periodic).  Hole entry [i-1, q] is for absolute target ring i.
    """

    grid: PolarGrid
    tables: dict = field(repr=False)
    hole_tables: dict = field(repr=False)
    _spectra: dict = field(default_factory=dict, repr=False)
    _hole_spectra: dict = field(default_factory=dict, repr=False)

    def table(self, kind: str) -> np.ndarray:
        return self.tables[kind]

    def hole_table(self, kind: str) -> np.ndarray:
        return self.hole_tables[kind]

    def spectrum(self, kind: str) -> np.ndarray:
        if kind not in self._spectra:
            self._spectra[kind] = np.fft.rfft2(self.tables[kind])
        return self._spectra[kind]

    def hole_spectrum(self, kind: str) -> np.ndarray:
        if kind not in self._hole_spectra:
            self._hole_spectra[kind] = np.fft.rfft(self.hole_tables[kind], axis=1)
        return self._hole_spectra[kind]


def _wrap_radial(n: int) -> np.ndarray:
    return np.concatenate([np.arange(n + 1), np.arange(-n + 1, 0)])


def tabulate_polar_kernels(grid: PolarGrid, kinds=KINDS, threads: int = 1) -> PolarKernelTables:
    """Tabulate the requested kinds over all offsets, O(n^2) per kind.

    ``kinds`` may include the potential family; force and potential tables
    share the layout and the solver picks what it needs.
    """
    n = grid.n
    di = _wrap_radial(n)[:, None]
    dj = np.arange(n)[None, :]
    iabs = np.arange(1, n + 1)[:, None]

    def chunked(fn, rows):
        if not threads or threads <= 1 or rows.shape[0] < 128:
            return fn(rows)
        from concurrent.futures import ThreadPoolExecutor
        size = rows.shape[0]
        step = max(64, size // (4 * threads))
        spans = [(lo, min(lo + step, size)) for lo in range(0, size, step)]
        out = np.empty((size, n))
        with ThreadPoolExecutor(max_workers=threads) as ex:
            for (lo, hi), block in zip(spans, ex.map(lambda s: fn(rows[s[0]:s[1]]), spans)):
                out[lo:hi] = block
        return out

    tables = {}
    hole_tables = {}
    for kind in kinds:
        if kind not in KINDS and kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown kernel kind {kind!r}")
        tables[kind] = chunked(lambda r, k=kind: eval_polar_kernel(k, r, dj, grid), di)
        hole_tables[kind] = chunked(lambda r, k=kind: eval_hole_kernel(k, r, dj, grid), iabs)
    return PolarKernelTables(grid=grid, tables=tables, hole_tables=hole_tables)
