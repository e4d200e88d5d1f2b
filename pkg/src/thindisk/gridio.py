"""Plain-text field files, report CSVs and the binary kernel cache.

Field files are a versioned text contract:

    thindisk v1
    cart N M            (or: polar N M beta0)
    <N rows of N comma-separated values>
    [slopes]            (optional sentinel, then two more N x N blocks)

Rows iterate the second grid index (y or theta); values within a row
iterate the first (x or r).  Numbers carry 17 significant digits so a
write/read round trip is bit exact.  Force files use the same header with
two back-to-back component blocks and no sentinel.
"""
from __future__ import annotations

import numpy as np

from .grids import CartesianGrid, PolarGrid, build_cartesian_grid, build_polar_grid
from .models import DensityField
from .solver import ForceField

MAGIC = "thindisk v1"


class FileFormatError(ValueError):
    """Unreadable or inconsistent field/report file."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _grid_header(grid) -> str:
    if grid.coords == "cartesian":
        return f"cart {grid.n} {_fmt(grid.half_width)}"
    return f"polar {grid.n} {_fmt(grid.outer_radius)} {_fmt(grid.beta0)}"


def _block_lines(a: np.ndarray):
    # rows iterate axis 1 (y/theta), values within a row iterate axis 0
    for j in range(a.shape[1]):
        yield ",".join(_fmt(v) for v in a[:, j])


def _parse_header(lines) -> tuple:
    if not lines or lines[0].strip() != MAGIC:
        raise FileFormatError(f"missing '{MAGIC}' header line")
    parts = lines[1].split()
    try:
        if parts[0] == "cart" and len(parts) == 3:
            grid = build_cartesian_grid(float(parts[2]), int(parts[1]))
        elif parts[0] == "polar" and len(parts) == 4:
            grid = build_polar_grid(float(parts[2]), int(parts[1]), float(parts[3]))
        else:
            raise FileFormatError(f"bad grid line {lines[1]!r}")
    except (ValueError, IndexError) as exc:
        if isinstance(exc, FileFormatError):
            raise
        raise FileFormatError(f"bad grid line {lines[1]!r}: {exc}") from exc
    return grid, lines[2:]


def _read_block(lines, n, what) -> tuple:
    if len(lines) < n:
        raise FileFormatError(f"truncated file: expected {n} rows of {what}")
    out = np.empty((n, n))
    for j in range(n):
        vals = lines[j].split(",")
        if len(vals) != n:
            raise FileFormatError(f"row {j} of {what} has {len(vals)} values, expected {n}")
        out[:, j] = [float(v) for v in vals]
    return out, lines[n:]


def write_density(path, field: DensityField, include_slopes: bool = True) -> None:
    lines = [MAGIC, _grid_header(field.grid)]
    lines.extend(_block_lines(field.values))
    if include_slopes:
        lines.append("slopes")
        lines.extend(_block_lines(field.slope_u))
        lines.extend(_block_lines(field.slope_v))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_density(path) -> DensityField:
    """Read a density file.

    Polar files carry no hole-ring block; the ring is rebuilt from the
    innermost available ring (nearest-cell extrapolation), which is harmless
    because the hole's area is a vanishing fraction of the disk.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    grid, rest = _parse_header(lines)
    n = grid.n
    values, rest = _read_block(rest, n, "density")
    if rest and rest[0].strip() == "slopes":
        slope_u, rest = _read_block(rest[1:], n, "x-slopes")
        slope_v, rest = _read_block(rest, n, "y-slopes")
        source = "analytic"
    elif n >= 3:
        from .models import central_difference_slopes
        c1 = grid.x_centers if grid.coords == "cartesian" else grid.r_centers
        c2 = grid.y_centers if grid.coords == "cartesian" else grid.theta_centers
        slope_u, slope_v = central_difference_slopes(values, c1, c2)
        source = "central-difference"
    else:
        slope_u = np.zeros_like(values)
        slope_v = np.zeros_like(values)
        source = "central-difference"
    kw = {}
    if grid.coords == "polar":
        kw = dict(hole_values=values[0].copy(), hole_slope_u=slope_u[0].copy(),
                  hole_slope_v=slope_v[0].copy())
    return DensityField(grid, values, slope_u, slope_v, slope_source=source, **kw)


def write_force(path, force: ForceField) -> None:
    lines = [MAGIC, _grid_header(force.grid)]
    lines.extend(_block_lines(force.comp_u))
    lines.extend(_block_lines(force.comp_v))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_force(path) -> ForceField:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    grid, rest = _parse_header(lines)
    comp_u, rest = _read_block(rest, grid.n, "first component")
    comp_v, rest = _read_block(rest, grid.n, "second component")
    return ForceField(grid, comp_u, comp_v)


def write_report(path, report) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_csv())


def read_report(path):
    from .analysis import ConvergenceReport
    with open(path, encoding="utf-8") as fh:
        return ConvergenceReport.from_csv(fh.read())


# --- kernel table cache ----------------------------------------------------

_CACHE_VERSION = 1


def save_kernel_tables(path, tables) -> None:
    """Binary dump of a kernel-table set for reuse across runs."""
    grid = tables.grid
    payload = {
        "version": np.array(_CACHE_VERSION),
        "coords": np.array(grid.coords),
        "n": np.array(grid.n),
    }
    if grid.coords == "cartesian":
        payload["extent"] = np.array(grid.half_width)
    else:
        payload["extent"] = np.array(grid.outer_radius)
        payload["beta0"] = np.array(grid.beta0)
    for kind, arr in tables.tables.items():
        payload[f"table_{kind}"] = arr
    for kind, arr in getattr(tables, "hole_tables", {}).items():
        payload[f"hole_{kind}"] = arr
    np.savez_compressed(path, **payload)


def load_kernel_tables(path, grid):
    """Load a cache back; the stored grid signature must match ``grid``."""
    from .kernels_cartesian import KernelTables
    from .kernels_polar import PolarKernelTables

    with np.load(path) as data:
        if int(data["version"]) != _CACHE_VERSION:
            raise FileFormatError(f"kernel cache version {int(data['version'])} unsupported")
        coords = str(data["coords"])
        extent = float(data["extent"])
        n = int(data["n"])
        if coords != grid.coords or n != grid.n:
            raise FileFormatError("kernel cache was built for a different grid")
        if coords == "cartesian" and extent != grid.half_width:
            raise FileFormatError("kernel cache was built for a different domain size")
        if coords == "polar" and (extent != grid.outer_radius
                                  or float(data["beta0"]) != grid.beta0):
            raise FileFormatError("kernel cache was built for a different domain")
        tables = {k[6:]: data[k] for k in data.files if k.startswith("table_")}
        holes = {k[5:]: data[k] for k in data.files if k.startswith("hole_")}
    if coords == "cartesian":
        return KernelTables(grid=grid, tables=tables)
    return PolarKernelTables(grid=grid, tables=tables, hole_tables=holes)
