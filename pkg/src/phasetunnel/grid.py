"""Phase-space grids, fields and quadrature for 1-D quantum systems.

The position grid is uniform with the endpoint excluded, x_i = x_min + i*dx;
the momentum grid spans the conjugate band [-pi*hbar/dx, +pi*hbar/dx) with
n_p cells, so dp = 2*pi*hbar/(n_x*dx) when n_p = n_x.  With n_p = 2*n_x the
momentum axis resolves the half-step correlation lags of the Wigner
transform, which makes the overlap identity exact for states with coherence
across the whole box; n_p = n_x stores the alias-folded field.  All
phase-space quadrature is plain Riemann summation on that lattice.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "GridSpec",
    "PhaseField",
    "make_grid",
    "integrate_2d",
    "inner_product",
]


@dataclass(frozen=True)
class GridSpec:
    """Shared discretization for every field in one analysis run."""

    x_min: float
    x_max: float
    n_x: int
    n_p: int
    hbar: float
    mass: float

    @cached_property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @cached_property
    def dp(self) -> float:
        return 2.0 * np.pi * self.hbar / (self.n_p * self.dx)

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_x)

    @cached_property
    def p(self) -> np.ndarray:
        return self.dp * (np.arange(self.n_p) - self.n_p // 2)

    @cached_property
    def cell_area(self) -> float:
        return self.dx * self.dp

    def meshes(self):
        """Position and momentum meshes with indexing (x_i, p_j)."""
        return np.meshgrid(self.x, self.p, indexing="ij")


@dataclass
class PhaseField:
    """Real scalar field sampled at the grid's cell centers.

    values[i, j] is the field at (x_i, p_j).  Constructors are expected to
    hand over finite values; the check here is the last line of defense.
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_x, self.grid.n_p):
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"({self.grid.n_x}, {self.grid.n_p})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")


def make_grid(x_min: float, x_max: float, n_x: int, hbar: float = 1.0,
              mass: float = 1.0, n_p: int = None) -> GridSpec:
    """Build the shared grid.

    n_p defaults to n_x (momentum grid = FFT conjugate of the position
    grid); n_p = 2*n_x doubles the momentum resolution over the same band,
    the natural home of the Wigner transform's half-step lags.
    """
    if not x_max > x_min:
        raise ValueError(f"empty range: x_min={x_min!r}, x_max={x_max!r}")
    if n_x < 64 or (n_x & (n_x - 1)) != 0:
        raise ValueError(f"n_x must be a power of two >= 64, got {n_x}")
    if hbar <= 0 or mass <= 0:
        raise ValueError("hbar and mass must be positive")
    if n_p is None:
        n_p = n_x
    if n_p not in (n_x, 2 * n_x):
        raise ValueError(f"n_p must be n_x or 2*n_x, got {n_p}")
    return GridSpec(x_min=float(x_min), x_max=float(x_max), n_x=n_x, n_p=n_p,
                    hbar=float(hbar), mass=float(mass))


def integrate_2d(f: PhaseField) -> float:
    """Riemann integral of the field over the whole grid."""
    return float(f.values.sum() * f.grid.cell_area)


def inner_product(a: PhaseField, b: PhaseField) -> float:
    """L2 pairing integral(a*b dx dp) of two fields on the same grid."""
    if a.grid is not b.grid and a.grid != b.grid:
        raise ValueError("fields live on different grids")
    return float((a.values * b.values).sum() * a.grid.cell_area)
