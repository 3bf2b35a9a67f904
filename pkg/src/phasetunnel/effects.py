"""Phase-space effect fields and the tunnelling rate operator.

Every measurement effect is represented by a field paired with states via
integral(effect * W dx dp).  Position-region effects are sharp indicators
and coincide between the classical and quantum descriptions; energy effects
differ: the classical one is the indicator of H(x,p) > E*, the quantum one
is 2*pi*hbar times the summed Wigner fields of the eigenstates above E*.

Region membership is decided at cell centers with the strict inequality;
the boundary itself carries no cells.
"""

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, PhaseField
from .states import wigner_of_pure
from .spectral import Potential, Spectrum

__all__ = [
    "Effect",
    "position_effect",
    "quantum_energy_effect",
    "energy_below_effect",
    "classical_energy_effect",
    "tunnelling_rate_operator",
    "momentum_band_effect",
    "EnergyEffectAssembler",
]


@dataclass
class Effect:
    """A measurement effect in its phase-space representation."""

    field: PhaseField
    label: str
    flavor: str  # "quantum" | "classical"
    e_star: float

    def __post_init__(self):
        if self.flavor not in ("quantum", "classical"):
            raise ValueError(f"unknown flavor {self.flavor!r}")


def position_effect(grid: GridSpec, potential: Potential, e_star: float,
                    flavor: str = "quantum") -> Effect:
    """Indicator of the classically forbidden region {x : V(x) > E*}.

    Constant along p and identical in both flavors; the flavor tag only
    records which comparison the effect participates in.
    """
    column = (potential.values(grid) > e_star).astype(float)
    values = np.repeat(column[:, None], grid.n_p, axis=1)
    return Effect(PhaseField(grid, values), "position_region", flavor, e_star)


def classical_energy_effect(grid: GridSpec, potential: Potential, e_star: float) -> Effect:
    """Indicator of H(x,p) = p^2/2m + V(x) > E* on the grid."""
    v = potential.values(grid)
    h = v[:, None] + (grid.p**2 / (2.0 * grid.mass))[None, :]
    return Effect(PhaseField(grid, (h > e_star).astype(float)),
                  "energy_above", "classical", e_star)


class EnergyEffectAssembler:
    """Builds quantum energy effects from one spectrum, caching eigenstate
    Wigner fields (up to a memory cap) so an E* scan pays for each
    transform once.

    For a momentum-diagonal spectrum the effects are sharp momentum
    indicators; no eigenstate transforms are involved.
    """

    _CACHE_BYTES = 256 * 2**20

    def __init__(self, grid: GridSpec, spectrum: Spectrum):
        if spectrum.grid != grid:
            raise ValueError("spectrum was computed on a different grid")
        self.grid = grid
        self.spectrum = spectrum
        self._wigner_cache = {}
        self._cache_slots = max(
            1, self._CACHE_BYTES // (8 * grid.n_x * grid.n_p))

    def eigenstate_wigner(self, n: int) -> np.ndarray:
        w = self._wigner_cache.get(n)
        if w is None:
            w = wigner_of_pure(self.spectrum.eigenstate(n)).values
            if len(self._wigner_cache) >= self._cache_slots:
                self._wigner_cache.pop(next(iter(self._wigner_cache)))
            self._wigner_cache[n] = w
        return w

    def split(self, e_star: float):
        above = np.nonzero(self.spectrum.energies > e_star)[0]
        below = np.nonzero(self.spectrum.energies <= e_star)[0]
        return above, below

    def _cell_indicator(self, keep: np.ndarray, label: str, e_star: float) -> Effect:
        row = keep.astype(float)
        values = np.repeat(row[None, :], self.grid.n_x, axis=0)
        return Effect(PhaseField(self.grid, values), label, "quantum", e_star)

    def assemble(self, e_star: float) -> Effect:
        """Quantum effect for the outcome E > E*, strictly above.

        2*pi*hbar times the summed eigenstate Wigner fields above E*, using
        whichever side of E* has fewer captured eigenstates; the
        complementary form subtracts the below-side sum from the identity's
        flat field.
        """
        if self.spectrum.momentum_diagonal:
            kinetic = self.grid.p**2 / (2.0 * self.grid.mass)
            return self._cell_indicator(kinetic > e_star, "energy_above", e_star)
        above, below = self.split(e_star)
        if self.spectrum.truncated and len(above) == 0:
            raise ValueError(
                f"E*={e_star!r} is beyond the truncated spectrum; the effect "
                "cannot be told apart from zero")
        two_pi_hbar = 2.0 * np.pi * self.grid.hbar
        acc = np.zeros((self.grid.n_x, self.grid.n_p))
        if len(above) <= len(below):
            for n in above:
                acc += self.eigenstate_wigner(n)
            values = two_pi_hbar * acc
        else:
            for n in below:
                acc += self.eigenstate_wigner(n)
            values = 1.0 - two_pi_hbar * acc
        return Effect(PhaseField(self.grid, values), "energy_above", "quantum", e_star)

    def assemble_below(self, e_star: float) -> Effect:
        """Quantum effect for the outcome E < E*, strictly below.

        Not the complement of assemble(): both comparisons are strict, so a
        state sitting exactly at E* belongs to neither effect.
        """
        if self.spectrum.momentum_diagonal:
            kinetic = self.grid.p**2 / (2.0 * self.grid.mass)
            return self._cell_indicator(kinetic < e_star, "energy_below", e_star)
        below = np.nonzero(self.spectrum.energies < e_star)[0]
        above = np.nonzero(self.spectrum.energies >= e_star)[0]
        two_pi_hbar = 2.0 * np.pi * self.grid.hbar
        acc = np.zeros((self.grid.n_x, self.grid.n_p))
        if len(below) <= len(above) or self.spectrum.truncated:
            for n in below:
                acc += self.eigenstate_wigner(n)
            values = two_pi_hbar * acc
        else:
            for n in above:
                acc += self.eigenstate_wigner(n)
            values = 1.0 - two_pi_hbar * acc
        return Effect(PhaseField(self.grid, values), "energy_below", "quantum", e_star)


def quantum_energy_effect(grid: GridSpec, spectrum: Spectrum, e_star: float) -> Effect:
    """Quantum effect for the outcome E > E*, strictly above."""
    return EnergyEffectAssembler(grid, spectrum).assemble(e_star)


def energy_below_effect(grid: GridSpec, spectrum: Spectrum, e_star: float) -> Effect:
    """Quantum effect for the outcome E < E*, strictly below."""
    return EnergyEffectAssembler(grid, spectrum).assemble_below(e_star)


def tunnelling_rate_operator(grid: GridSpec, potential: Potential, e_star: float,
                             flavor: str = "quantum", spectrum: Spectrum = None) -> Effect:
    """Phase-space field of the effect difference E_{E > E*} - E_{x : V(x) > E*}.

    States with positive probability mass where this field is negative are
    the tunnelling candidates; classically the field is non-negative
    everywhere because {x : V(x) > E*} is contained in {H > E*}.
    """
    if flavor == "quantum":
        if spectrum is None:
            raise ValueError("quantum flavor needs a spectrum")
        energy = quantum_energy_effect(grid, spectrum, e_star)
    elif flavor == "classical":
        energy = classical_energy_effect(grid, potential, e_star)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    region = position_effect(grid, potential, e_star, flavor)
    values = energy.field.values - region.field.values
    return Effect(PhaseField(grid, values), "tunnelling_rate", flavor, e_star)


def momentum_band_effect(grid: GridSpec, potential: Potential, e_star: float,
                         flavor: str = "quantum") -> Effect:
    """Indicator of |p| < sqrt(2m(E* - sup V)), the momenta a classical
    particle of energy below E* can reach anywhere; empty when E* <= sup V."""
    sup_v = potential.sup_v(grid)
    if e_star > sup_v:
        bound = np.sqrt(2.0 * grid.mass * (e_star - sup_v))
        row = (np.abs(grid.p) < bound).astype(float)
    else:
        row = np.zeros(grid.n_p)
    values = np.repeat(row[None, :], grid.n_x, axis=0)
    return Effect(PhaseField(grid, values), "momentum_band", flavor, e_star)
