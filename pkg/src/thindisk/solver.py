"""Force-field assembly from kernel tables and density fields.

The default sign convention, "attractive", orients every component so that
force points toward mass; that is the convention of the analytic disk
models in models.py, so numerical and analytic fields compare directly.
"repulsive" negates every component exactly.  Note the two polar kernel
families come out of their defining integrals with opposite orientations
(the radial family is outward-positive, the azimuthal family
forward-positive); the radial flip happens here, not in the tables.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .convolve import fft_convolve, ring_convolve
from .grids import CartesianGrid, PolarGrid
from .kernels_cartesian import KernelTables
from .kernels_polar import POTENTIAL_KINDS, PolarKernelTables, tabulate_polar_kernels
from .models import DensityField

SIGN_CONVENTIONS = ("attractive", "repulsive")


@dataclass(frozen=True)
class ForceField:
    """Per-cell force components on one grid.

    ``comp_u``/``comp_v`` are (Fx, Fy) on Cartesian grids and (Fr, Ftheta)
    on polar grids, shape (n, n) with the same axis order as DensityField.
    """

    grid: CartesianGrid | PolarGrid
    comp_u: np.ndarray
    comp_v: np.ndarray
    sign_convention: str = "attractive"
    slope_source: str = "analytic"

    def __post_init__(self):
        if self.sign_convention not in SIGN_CONVENTIONS:
            raise ValueError(f"unknown sign convention {self.sign_convention!r}")

    @property
    def coords(self) -> str:
        return self.grid.coords

    def flipped(self) -> "ForceField":
        """Same field under the opposite sign convention (exact negation)."""
        other = "repulsive" if self.sign_convention == "attractive" else "attractive"
        return replace(self, comp_u=-self.comp_u, comp_v=-self.comp_v,
                       sign_convention=other)

    def radial(self) -> np.ndarray:
        """Radial projection (x*Fx + y*Fy)/R on Cartesian grids; comp_u on polar."""
        if self.coords == "polar":
            return self.comp_u
        X, Y = self.grid.center_mesh()
        R = np.hypot(X, Y)
        return (X * self.comp_u + Y * self.comp_v) / R


def _require_same_grid(field: DensityField, tables) -> None:
    if field.grid is not tables.grid and field.grid != tables.grid:
        raise ValueError("density field and kernel tables were built on different grids")


def solve_cartesian(field: DensityField, tables: KernelTables,
                    sign_convention: str = "attractive") -> ForceField:
    """Both force components as three kernel convolutions each."""
    _require_same_grid(field, tables)

    def conv(kind, data):
        return fft_convolve(tables.table(kind), data,
                            kernel_spectrum=tables.spectrum(kind))

    fx = conv("x0", field.values) + conv("xx", field.slope_u) + conv("xy", field.slope_v)
    fy = conv("y0", field.values) + conv("yx", field.slope_u) + conv("yy", field.slope_v)
    out = ForceField(field.grid, fx, fy, slope_source=field.slope_source)
    return out if sign_convention == "attractive" else out.flipped()


def solve_polar(field: DensityField, tables: PolarKernelTables,
                sign_convention: str = "attractive") -> ForceField:
    """Radial and azimuthal forces with ring and hole-cell contributions.

    The radial-slope terms carry an external r_i factor; the azimuthal force
    needs no 1/r_i prefactor because it cancels against the kernel's own
    scale, leaving pure offset convolutions.
    """
    _require_same_grid(field, tables)
    grid: PolarGrid = field.grid
    r = grid.r_centers[:, None]

    def conv(kind, data):
        return fft_convolve(tables.table(kind), data, pad_axes=(0,),
                            kernel_spectrum=tables.spectrum(kind))

    def hole(kind, ring):
        return ring_convolve(tables.hole_table(kind), ring,
                             kernel_spectrum=tables.hole_spectrum(kind))

    fr = (conv("r0", field.values) + r * conv("rr", field.slope_u)
          + conv("rt", field.slope_v)
          + hole("r0", field.hole_values) + r * hole("rr", field.hole_slope_u)
          + hole("rt", field.hole_slope_v))
    ft = (conv("t0", field.values) + r * conv("tr", field.slope_u)
          + conv("tt", field.slope_v)
          + hole("t0", field.hole_values) + r * hole("tr", field.hole_slope_u)
          + hole("tt", field.hole_slope_v))
    # radial family orientation: its integrand is outward-positive
    out = ForceField(grid, -fr, ft, slope_source=field.slope_source)
    return out if sign_convention == "attractive" else out.flipped()


def solve_polar_direct(field: DensityField, tables: PolarKernelTables) -> ForceField:
    """Direct-summation twin of solve_polar (oracle; attractive convention)."""
    from .convolve import direct_convolve, ring_convolve_direct
    _require_same_grid(field, tables)
    grid: PolarGrid = field.grid
    r = grid.r_centers[:, None]

    def conv(kind, data):
        return direct_convolve(tables.table(kind), data, pad_axes=(0,))

    def hole(kind, ring):
        return ring_convolve_direct(tables.hole_table(kind), ring)

    fr = (conv("r0", field.values) + r * conv("rr", field.slope_u)
          + conv("rt", field.slope_v)
          + hole("r0", field.hole_values) + r * hole("rr", field.hole_slope_u)
          + hole("rt", field.hole_slope_v))
    ft = (conv("t0", field.values) + r * conv("tr", field.slope_u)
          + conv("tt", field.slope_v)
          + hole("t0", field.hole_values) + r * hole("tr", field.hole_slope_u)
          + hole("tt", field.hole_slope_v))
    return ForceField(grid, -fr, ft, slope_source=field.slope_source)


def solve_cartesian_direct(field: DensityField, tables: KernelTables) -> ForceField:
    """Direct-summation twin of solve_cartesian (oracle and benchmark path)."""
    from .convolve import direct_convolve
    _require_same_grid(field, tables)

    def conv(kind, data):
        return direct_convolve(tables.table(kind), data)

    fx = conv("x0", field.values) + conv("xx", field.slope_u) + conv("xy", field.slope_v)
    fy = conv("y0", field.values) + conv("yx", field.slope_u) + conv("yy", field.slope_v)
    return ForceField(field.grid, fx, fy, slope_source=field.slope_source)


def polar_potential(field: DensityField, tables: PolarKernelTables | None = None) -> np.ndarray:
    """In-plane potential at polar cell centers from the same kernel method.

    Uses the potential-kernel family (exact radial antiderivatives,
    two-node trapezoid in theta) with density and slope terms plus the hole
    ring; returns shape (n, n).  Tables are tabulated on demand when not
    supplied with the potential kinds included.
    """
    grid = field.grid
    if grid.coords != "polar":
        raise ValueError("polar_potential needs a polar density field")
    if tables is None or any(k not in tables.tables for k in POTENTIAL_KINDS):
        tables = tabulate_polar_kernels(grid, kinds=POTENTIAL_KINDS)
    r = grid.r_centers[:, None]

    def conv(kind, data):
        return fft_convolve(tables.table(kind), data, pad_axes=(0,),
                            kernel_spectrum=tables.spectrum(kind))

    def hole(kind, ring):
        return ring_convolve(tables.hole_table(kind), ring,
                             kernel_spectrum=tables.hole_spectrum(kind))

    acc = (conv("p0", field.values) + r * conv("pr", field.slope_u)
           + conv("pt", field.slope_v)
           + hole("p0", field.hole_values) + r * hole("pr", field.hole_slope_u)
           + hole("pt", field.hole_slope_v))
    return -r * acc
