"""Potentials, discrete Hamiltonians and spectral probabilities.

The Hamiltonian is the standard 3-point stencil on the position grid with
Dirichlet walls at the grid edges; its eigenbasis stands in for the
continuum spectrum.  All energy comparisons are strict: P(E > E*) never
counts a level at exactly E*.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .grid import GridSpec
from .states import MixedState, WaveFunction

__all__ = [
    "Potential",
    "RectangularBarrier",
    "HarmonicPotential",
    "TabulatedPotential",
    "free_potential",
    "Spectrum",
    "discretize_hamiltonian",
    "eigendecompose",
    "energy_cdf",
    "free_momentum_energy_cdf",
    "position_region_prob",
]


class Potential:
    """Base for the closed set of potential kinds."""

    kind = "abstract"

    def values(self, grid: GridSpec) -> np.ndarray:
        raise NotImplementedError

    def sup_v(self, grid: GridSpec) -> float:
        """Largest potential value on the grid."""
        return float(self.values(grid).max())

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class RectangularBarrier(Potential):
    """V(x) = v0 on 0 <= x < length, zero elsewhere."""

    v0: float
    length: float
    kind = "rectangular_barrier"

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("barrier length must be positive")

    def values(self, grid: GridSpec) -> np.ndarray:
        x = grid.x
        return np.where((x >= 0.0) & (x < self.length), self.v0, 0.0)

    def sup_v(self, grid: GridSpec) -> float:
        return max(self.v0, 0.0)

    def describe(self) -> dict:
        return {"kind": self.kind, "v0": self.v0, "length": self.length}


@dataclass(frozen=True)
class HarmonicPotential(Potential):
    """V(x) = m omega^2 x^2 / 2 with the grid's mass."""

    omega: float
    kind = "harmonic"

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    def values(self, grid: GridSpec) -> np.ndarray:
        return 0.5 * grid.mass * self.omega**2 * grid.x**2

    def describe(self) -> dict:
        return {"kind": self.kind, "omega": self.omega}


@dataclass(frozen=True)
class TabulatedPotential(Potential):
    """Arbitrary potential sampled at the grid's cell centers."""

    table: tuple
    kind = "custom"

    def values(self, grid: GridSpec) -> np.ndarray:
        v = np.asarray(self.table, dtype=float)
        if v.shape != (grid.n_x,):
            raise ValueError(
                f"table length {v.shape[0]} does not match grid n_x={grid.n_x}")
        if not np.all(np.isfinite(v)):
            raise ValueError("potential table contains non-finite values")
        return v

    def describe(self) -> dict:
        # content digest, not just the length: describe() feeds cache keys
        raw = np.asarray(self.table, dtype=float).tobytes()
        return {"kind": self.kind, "n_samples": len(self.table),
                "digest": hashlib.sha256(raw).hexdigest()[:16]}


@dataclass(frozen=True)
class FreePotential(Potential):
    """V(x) = 0 everywhere."""

    kind = "free"

    def values(self, grid: GridSpec) -> np.ndarray:
        return np.zeros(grid.n_x)

    def sup_v(self, grid: GridSpec) -> float:
        return 0.0

    def describe(self) -> dict:
        return {"kind": self.kind}


def free_potential(grid: GridSpec = None) -> FreePotential:
    return FreePotential()


@dataclass
class TridiagonalHamiltonian:
    grid: GridSpec
    diagonal: np.ndarray = field(repr=False)
    off_diagonal: np.ndarray = field(repr=False)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        out = self.diagonal * vec
        out[:-1] += self.off_diagonal * vec[1:]
        out[1:] += self.off_diagonal * vec[:-1]
        return out

    def scale(self) -> float:
        """Infinity-norm bound used to normalize residuals."""
        return float(np.abs(self.diagonal).max() + 2 * np.abs(self.off_diagonal).max())


@dataclass
class Spectrum:
    """Eigenpairs of a discrete Hamiltonian, energies ascending.

    vectors[:, n] is the n-th eigenstate with continuum normalization,
    sum |v|^2 dx = 1, so projection coefficients are <v_n|psi> dx sums.

    A momentum-diagonal spectrum (the free particle) has no stored
    vectors: its "levels" are the momentum cells of the grid with
    E = p^2/2m, and squared coefficients are the cell masses of the
    momentum density.
    """

    grid: GridSpec
    energies: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)
    truncated: bool = False
    momentum_diagonal: bool = False
    cell_order: np.ndarray = field(default=None, repr=False)

    def eigenstate(self, n: int) -> WaveFunction:
        if self.momentum_diagonal:
            raise ValueError(
                "momentum-diagonal spectra carry cell weights, not eigenvectors")
        return WaveFunction(self.grid, self.vectors[:, n].astype(complex))

    def coefficients(self, psi: WaveFunction) -> np.ndarray:
        """Projection amplitudes of a pure state onto the eigenbasis.

        For momentum-diagonal spectra these are sqrt(dp)-weighted momentum
        amplitudes at the cell centers, ordered like .energies, so the
        squared magnitudes are cell probabilities in both cases.
        """
        if self.momentum_diagonal:
            amp = momentum_amplitudes(psi) * np.sqrt(self.grid.dp)
            return amp[self.cell_order]
        return (self.vectors.conj().T @ psi.values) * self.grid.dx

    def captured_norm(self, psi: WaveFunction) -> float:
        c = self.coefficients(psi)
        return float((np.abs(c) ** 2).sum())


def discretize_hamiltonian(grid: GridSpec, potential: Potential) -> TridiagonalHamiltonian:
    """3-point-stencil Hamiltonian with Dirichlet walls at the grid edges."""
    t = grid.hbar**2 / (2.0 * grid.mass * grid.dx**2)
    diag = 2.0 * t + potential.values(grid)
    off = np.full(grid.n_x - 1, -t)
    return TridiagonalHamiltonian(grid, diag, off)


def eigendecompose(h: TridiagonalHamiltonian, k: int = None) -> Spectrum:
    """Full (default) or k-lowest eigendecomposition.

    Eigenvectors come back orthonormal in the Euclidean sense and are
    rescaled to continuum normalization.
    """
    n = h.grid.n_x
    if k is None or k >= n:
        energies, vectors = eigh_tridiagonal(h.diagonal, h.off_diagonal)
        truncated = False
    else:
        if k < 1:
            raise ValueError("k must be at least 1")
        energies, vectors = eigh_tridiagonal(
            h.diagonal, h.off_diagonal, select="i", select_range=(0, k - 1))
        truncated = True
    vectors = vectors / np.sqrt(h.grid.dx)
    return Spectrum(h.grid, energies, vectors, truncated)


def _component_weights(state) -> list:
    if isinstance(state, WaveFunction):
        return [(1.0, state)]
    if isinstance(state, MixedState):
        return state.components
    raise TypeError(f"expected WaveFunction or MixedState, got {type(state).__name__}")


def momentum_amplitudes(psi: WaveFunction) -> np.ndarray:
    """Momentum-space amplitudes at the grid's p cells.

    psi_tilde(p_j) = (2 pi hbar)^(-1/2) * sum_i psi(x_i) exp(-i p_j x_i) dx,
    evaluated with one FFT; with n_p = 2*n_x the extra cells sample the same
    transform at the half-step momenta.
    """
    grid = psi.grid
    signed = psi.values * np.where(np.arange(grid.n_x) % 2 == 0, 1.0, -1.0)
    ft = np.fft.fft(signed, n=grid.n_p)
    phase = np.exp(-1j * grid.p * grid.x_min / grid.hbar)
    return grid.dx / np.sqrt(2.0 * np.pi * grid.hbar) * phase * ft


def free_spectrum(grid: GridSpec) -> Spectrum:
    """Momentum-diagonal spectrum with continuum dispersion E = p^2/2m.

    For zero potential the momentum cells are the exact energy resolution of
    the grid, which makes momentum-band and energy statements coincide cell
    for cell.  A Dirichlet box spectrum would instead impose its level
    staircase on what is physically a continuum bijection.
    """
    energies = grid.p**2 / (2.0 * grid.mass)
    order = np.argsort(energies, kind="stable")
    return Spectrum(grid, energies[order], vectors=None, truncated=False,
                    momentum_diagonal=True, cell_order=order)


def energy_cdf(state, spectrum: Spectrum, e_star: float,
               captured_budget: float = 1e-6) -> float:
    """P(E > E*), strictly above, from spectral projection coefficients.

    Raises when a truncated spectrum fails to capture the state to within
    captured_budget, or cannot resolve the threshold at all.
    """
    if spectrum.truncated and e_star >= spectrum.energies[-1]:
        raise ValueError(
            f"E*={e_star!r} is beyond the truncated spectrum (top {spectrum.energies[-1]!r})")
    total = 0.0
    for weight, psi in _component_weights(state):
        c2 = np.abs(spectrum.coefficients(psi)) ** 2
        captured = c2.sum()
        if captured < 1.0 - captured_budget:
            raise ValueError(
                f"spectrum captures only {captured:.9f} of the state norm "
                f"(budget 1 - {captured_budget:g})")
        total += weight * c2[spectrum.energies > e_star].sum()
    return float(total)


def free_momentum_energy_cdf(p0: float, sigma_x: float, e_star: float,
                             mass: float, hbar: float) -> float:
    """P(E > E*) of a free Gaussian packet, in closed form.

    The packet's momentum marginal is Gaussian with sigma_p = hbar/(2 sigma_x);
    integrating it outside |p| <= sqrt(2 m E*) gives the complementary-erf pair
    below.  For E* <= 0 every momentum qualifies.
    """
    from scipy.special import erf

    if sigma_x <= 0:
        raise ValueError("sigma_x must be positive")
    if mass <= 0 or hbar <= 0:
        raise ValueError("mass and hbar must be positive")
    if e_star <= 0:
        return 1.0
    q = np.sqrt(2.0 * mass * e_star)
    s = np.sqrt(2.0) * sigma_x / hbar
    return float(1.0 - 0.5 * (erf(s * (q - p0)) + erf(s * (q + p0))))


def position_region_prob(state, potential: Potential, e_star: float) -> float:
    """Probability assigned to the classically forbidden region {x : V(x) > E*}."""
    grid = _component_weights(state)[0][1].grid
    mask = potential.values(grid) > e_star
    total = 0.0
    for weight, psi in _component_weights(state):
        total += weight * float((np.abs(psi.values[mask]) ** 2).sum() * grid.dx)
    return total
