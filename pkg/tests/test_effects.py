import numpy as np
import pytest
from hypothesis import given, strategies as st

from phasetunnel.effects import (
    Effect,
    EnergyEffectAssembler,
    classical_energy_effect,
    energy_below_effect,
    momentum_band_effect,
    position_effect,
    quantum_energy_effect,
    tunnelling_rate_operator,
)
from phasetunnel.grid import inner_product, make_grid
from phasetunnel.spectral import (
    HarmonicPotential,
    RectangularBarrier,
    discretize_hamiltonian,
    eigendecompose,
    free_spectrum,
)
from phasetunnel.states import gaussian_packet, ho_eigenstate, wigner_of_pure


@pytest.fixture
def harmonic_spec(grid128):
    return eigendecompose(discretize_hamiltonian(grid128, HarmonicPotential(1.0)))


def test_position_effect_is_a_sharp_cell_indicator(grid128):
    pot = HarmonicPotential(1.0)
    eff = position_effect(grid128, pot, 0.5)
    expected = (0.5 * grid128.x**2 > 0.5).astype(float)
    assert np.array_equal(eff.field.values[:, 0], expected)
    # constant along p
    assert np.all(eff.field.values == eff.field.values[:, :1])
    assert eff.label == "position_region"


def test_effect_flavor_is_validated(grid128):
    with pytest.raises(ValueError, match="flavor"):
        position_effect(grid128, HarmonicPotential(1.0), 0.5, flavor="thermal")


def test_classical_energy_effect_indicator(grid128):
    pot = RectangularBarrier(2.0, 1.0)
    eff = classical_energy_effect(grid128, pot, 1.2)
    h = pot.values(grid128)[:, None] + (grid128.p**2 / 2.0)[None, :]
    assert np.array_equal(eff.field.values, (h > 1.2).astype(float))


def test_classical_rate_operator_is_pointwise_nonnegative(grid128):
    # {x : V > E*} is inside {H > E*}: the indicator difference cannot dip
    for pot in (RectangularBarrier(2.0, 1.0), HarmonicPotential(1.3)):
        for e_star in (0.1, 0.7, 1.9):
            rate = tunnelling_rate_operator(grid128, pot, e_star, flavor="classical")
            assert rate.field.values.min() >= 0.0


def test_quantum_energy_effect_pairs_with_eigenstates(grid128, harmonic_spec):
    # <E_{E>E*}, W_n> must be the step function theta(E_n - E*)
    eff = quantum_energy_effect(grid128, harmonic_spec, 2.0)
    for n in (0, 1, 4):
        w_n = wigner_of_pure(harmonic_spec.eigenstate(n))
        prob = inner_product(eff.field, w_n)
        expected = 1.0 if harmonic_spec.energies[n] > 2.0 else 0.0
        assert prob == pytest.approx(expected, abs=1e-8)


def test_above_and_below_effects_sum_to_identity(grid128, harmonic_spec):
    # away from any eigenvalue the two strict effects partition the identity
    e_star = 2.0
    above = quantum_energy_effect(grid128, harmonic_spec, e_star)
    below = energy_below_effect(grid128, harmonic_spec, e_star)
    total = above.field.values + below.field.values
    assert np.max(np.abs(total - 1.0)) < 1e-7


def test_complement_route_reproduces_coefficient_probabilities(
        grid128, harmonic_spec):
    # with most levels above the threshold the assembler complements through
    # the few low levels; pairing must equal the coefficient-space tail sum
    psi = gaussian_packet(grid128, -1.0, 0.8, 1.1)
    w = wigner_of_pure(psi)
    c2 = np.abs(harmonic_spec.coefficients(psi)) ** 2
    for e_star in (0.7, 2.2, 3.7):
        eff = quantum_energy_effect(grid128, harmonic_spec, e_star)
        want = c2[harmonic_spec.energies > e_star].sum()
        assert inner_product(eff.field, w) == pytest.approx(want, abs=1e-9)


def test_above_route_reproduces_coefficient_probabilities(grid128):
    # a truncated ladder keeps only smooth low states, so the direct
    # above-side sum is exercised without the ragged top of the spectrum
    spec = eigendecompose(
        discretize_hamiltonian(grid128, HarmonicPotential(1.0)), k=12)
    psi = gaussian_packet(grid128, 0.5, -0.6, 0.9)
    w = wigner_of_pure(psi)
    c2 = np.abs(spec.coefficients(psi)) ** 2
    e_star = 8.2  # three captured levels above: the fewer side
    eff = quantum_energy_effect(grid128, spec, e_star)
    want = c2[spec.energies > e_star].sum()
    assert inner_product(eff.field, w) == pytest.approx(want, abs=1e-9)


def test_truncated_spectrum_cannot_assemble_past_its_top(grid128):
    spec = eigendecompose(discretize_hamiltonian(grid128, HarmonicPotential(1.0)), k=6)
    asm = EnergyEffectAssembler(grid128, spec)
    asm.assemble(2.0)  # fine, levels remain above
    with pytest.raises(ValueError, match="beyond the truncated spectrum"):
        asm.assemble(50.0)


def test_assembler_rejects_foreign_grids(grid128):
    other = make_grid(-10.0, 10.0, 128, n_p=128)
    spec = eigendecompose(discretize_hamiltonian(other, HarmonicPotential(1.0)))
    with pytest.raises(ValueError, match="different grid"):
        EnergyEffectAssembler(grid128, spec)


def test_assembler_cache_reuses_transforms(grid128, harmonic_spec):
    asm = EnergyEffectAssembler(grid128, harmonic_spec)
    first = asm.eigenstate_wigner(0)
    again = asm.eigenstate_wigner(0)
    assert first is again  # cache hit returns the stored array


def test_momentum_diagonal_assembler_uses_cell_indicators(grid128):
    spec = free_spectrum(grid128)
    asm = EnergyEffectAssembler(grid128, spec)
    eff = asm.assemble(0.8)
    kinetic = grid128.p**2 / 2.0
    assert np.array_equal(eff.field.values[0], (kinetic > 0.8).astype(float))
    below = asm.assemble_below(0.8)
    assert np.array_equal(below.field.values[0], (kinetic < 0.8).astype(float))


def test_band_effect_bound(grid128):
    pot = RectangularBarrier(1.5, 1.0)
    eff = momentum_band_effect(grid128, pot, 2.3)
    bound = np.sqrt(2.0 * (2.3 - 1.5))
    assert np.array_equal(eff.field.values[0], (np.abs(grid128.p) < bound).astype(float))


def test_band_effect_empty_at_or_below_sup_v(grid128):
    pot = RectangularBarrier(1.5, 1.0)
    assert momentum_band_effect(grid128, pot, 1.5).field.values.max() == 0.0
    assert momentum_band_effect(grid128, pot, 0.3).field.values.max() == 0.0


def test_quantum_rate_operator_dips_negative_at_threshold(grid128, harmonic_spec):
    rate = tunnelling_rate_operator(grid128, HarmonicPotential(1.0), 0.5,
                                    spectrum=harmonic_spec)
    assert rate.field.values.min() < 0.0
    assert rate.label == "tunnelling_rate"


def test_quantum_rate_operator_requires_spectrum(grid128):
    with pytest.raises(ValueError, match="spectrum"):
        tunnelling_rate_operator(grid128, HarmonicPotential(1.0), 0.5)


def test_effect_probabilities_stay_in_unit_interval(grid128, harmonic_spec):
    # effects paired with proper states are probabilities
    w = wigner_of_pure(gaussian_packet(grid128, 0.5, 0.4, 1.0))
    for e_star in (0.3, 1.1, 2.7):
        for eff in (quantum_energy_effect(grid128, harmonic_spec, e_star),
                    position_effect(grid128, HarmonicPotential(1.0), e_star),
                    classical_energy_effect(grid128, HarmonicPotential(1.0), e_star)):
            prob = inner_product(eff.field, w)
            assert -1e-8 <= prob <= 1.0 + 1e-8


@given(
    v0=st.floats(min_value=0.2, max_value=4.0),
    length=st.floats(min_value=0.3, max_value=3.0),
    e_star=st.floats(min_value=0.0, max_value=5.0),
)
def test_classical_rate_nonnegativity_is_parameter_free(v0, length, e_star):
    grid = make_grid(-8.0, 8.0, 64, n_p=128)
    rate = tunnelling_rate_operator(grid, RectangularBarrier(v0, length),
                                    e_star, flavor="classical")
    assert rate.field.values.min() >= 0.0
