"""Classical phase-space ensembles and the no-tunnelling certificate.

Classical distributions get their own type even though the storage matches
a quantum field: the separation keeps classical states out of quantum
effect pairings and vice versa.  The certificate is the negative control
for the whole pipeline; the underlying set inclusion {V > E*} in {H > E*}
holds cell by cell on the grid, so any failure indicates an implementation
bug rather than physics.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from .grid import GridSpec, PhaseField, inner_product
from .spectral import Potential

__all__ = [
    "ClassicalState",
    "classical_gaussian",
    "classical_microcanonical",
    "classical_no_tunnel_certificate",
    "CertificateResult",
]


@dataclass
class ClassicalState:
    """Normalized non-negative phase-space distribution."""

    field: PhaseField

    def __post_init__(self):
        v = self.field.values
        if np.any(v < 0):
            raise ValueError(
                f"classical distribution has negative values (min {v.min():.3e})")
        total = v.sum() * self.field.grid.cell_area
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"classical distribution integrates to {total!r}, not 1")

    @property
    def grid(self) -> GridSpec:
        return self.field.grid


def classical_gaussian(grid: GridSpec, mu, cov) -> ClassicalState:
    """Bivariate Gaussian ensemble with mean mu = (x, p) and 2x2 covariance."""
    mu = np.asarray(mu, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2) or abs(cov[0, 1] - cov[1, 0]) > 1e-12 * abs(cov).max():
        raise ValueError("covariance must be a symmetric 2x2 matrix")
    det = np.linalg.det(cov)
    if det <= 0 or cov[0, 0] <= 0:
        raise ValueError("covariance must be positive definite")
    inv = np.linalg.inv(cov)
    X, P = grid.meshes()
    dx_, dp_ = X - mu[0], P - mu[1]
    quad = inv[0, 0] * dx_**2 + 2.0 * inv[0, 1] * dx_ * dp_ + inv[1, 1] * dp_**2
    values = np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(det))
    return ClassicalState(PhaseField(grid, values))


def classical_microcanonical(grid: GridSpec, potential: Potential, energy: float,
                             width: float = None) -> ClassicalState:
    """Gaussian-smoothed energy shell around H(x,p) = energy.

    With width -> 0 the position marginal diverges at the turning points
    (the usual caustic); the default width is five times the largest
    one-cell energy change near the shell, which keeps the shell resolved.
    """
    v = potential.values(grid)
    h = v[:, None] + (grid.p**2 / (2.0 * grid.mass))[None, :]
    if width is None:
        dv = np.gradient(v, grid.dx)
        local = np.maximum(np.abs(dv)[:, None] * grid.dx,
                           np.abs(grid.p)[None, :] * grid.dp / grid.mass)
        # only cells whose own one-cell energy change crosses the level set
        straddle = np.abs(h - energy) <= local
        width = 5.0 * float(local[straddle].max()) if straddle.any() else 0.0
    if width <= 0:
        raise ValueError("shell width must be positive")
    values = np.exp(-0.5 * ((h - energy) / width) ** 2)
    total = values.sum() * grid.cell_area
    if total < 1e-12:
        raise ValueError(
            f"energy shell E={energy!r} does not intersect the grid")
    return ClassicalState(PhaseField(grid, values / total))


@dataclass
class CertificateResult:
    passed: bool
    worst_functional: float      # largest functional over the E* grid
    worst_rate_op_min: float     # smallest rate-operator value seen
    e_star_grid: np.ndarray = dc_field(repr=False)


def classical_no_tunnel_certificate(state: ClassicalState, potential: Potential,
                                    e_star_grid) -> CertificateResult:
    """Checks the classical impossibility statement over an E* grid.

    For every E* the classical rate operator must be non-negative pointwise
    and the functional non-positive (up to 1e-9 of summation slack).
    """
    from .effects import classical_energy_effect, position_effect
    from .tunnelling import tunnelling_functional

    grid = state.grid
    e_star_grid = np.sort(np.asarray(e_star_grid, dtype=float))
    if e_star_grid.size == 0:
        raise ValueError("empty E* grid")
    worst_fn = -np.inf
    worst_min = np.inf
    for e_star in e_star_grid:
        energy = classical_energy_effect(grid, potential, e_star)
        region = position_effect(grid, potential, e_star, flavor="classical")
        rate_min = float((energy.field.values - region.field.values).min())
        fn = tunnelling_functional(state, potential, e_star)
        worst_fn = max(worst_fn, fn)
        worst_min = min(worst_min, rate_min)
    passed = (worst_fn <= 1e-9) and (worst_min >= 0.0)
    return CertificateResult(passed, worst_fn, worst_min, e_star_grid)
