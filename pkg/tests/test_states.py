import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import eval_laguerre

from phasetunnel.grid import integrate_2d, make_grid
from phasetunnel.spectral import momentum_amplitudes
from phasetunnel.states import (
    MixedState,
    WaveFunction,
    cross_wigner,
    gaussian_packet,
    ho_eigenstate,
    negativity_diagnostics,
    purity,
    wigner_of_mixture,
    wigner_of_pure,
)

# ---------------------------------------------------------------- oracles


def gaussian_wigner_exact(grid, x0, p0, sigma_x):
    """Closed form: minimum-uncertainty packets have Gaussian Wigner fields."""
    xs, ps = grid.meshes()
    hbar = grid.hbar
    return (1.0 / (np.pi * hbar)) * np.exp(
        -((xs - x0) ** 2) / (2.0 * sigma_x**2)
        - 2.0 * sigma_x**2 * (ps - p0) ** 2 / hbar**2
    )


def ho_wigner_exact(grid, n):
    """Laguerre closed form for oscillator eigenstates at m = omega = hbar = 1."""
    xs, ps = grid.meshes()
    r2 = xs**2 + ps**2
    return ((-1.0) ** n / np.pi) * np.exp(-r2) * eval_laguerre(n, 2.0 * r2)


def wigner_quadrature(psi_fn, x, p, s_half=9.0, n_s=6001):
    """Direct correlation-integral quadrature for an analytic wave function.

    Trapezoid over the lag variable; independent of any FFT bookkeeping.
    """
    s = np.linspace(-s_half, s_half, n_s)
    vals = np.conj(psi_fn(x + s)) * psi_fn(x - s) * np.exp(2j * p * s)
    return float(np.trapezoid(vals, s).real / np.pi)


def ho_psi_fn(n):
    from math import factorial

    from numpy.polynomial.hermite import hermval

    coeff = 1.0 / np.sqrt(2.0**n * factorial(n) * np.sqrt(np.pi))
    c = np.zeros(n + 1)
    c[n] = 1.0
    return lambda x: coeff * hermval(x, c) * np.exp(-0.5 * x**2)


# ---------------------------------------------------------------- tests


def test_gaussian_wigner_matches_closed_form(grid256):
    psi = gaussian_packet(grid256, -1.5, 0.8, 1.1)
    w = wigner_of_pure(psi)
    exact = gaussian_wigner_exact(grid256, -1.5, 0.8, 1.1)
    assert np.max(np.abs(w.values - exact)) < 1e-9


def test_ho_wigner_matches_laguerre_form(grid128):
    for n in (0, 1, 3):
        w = wigner_of_pure(ho_eigenstate(grid128, n, 1.0))
        assert np.max(np.abs(w.values - ho_wigner_exact(grid128, n))) < 1e-8


def test_superposition_matches_direct_quadrature(grid128):
    # interference structure probes the sign and scaling of the lag transform
    psi0, psi1 = ho_psi_fn(0), ho_psi_fn(1)
    values = (psi0(grid128.x) + psi1(grid128.x)) / np.sqrt(2.0)
    psi = WaveFunction(grid128, values.astype(complex))
    w = wigner_of_pure(psi)
    idx = [(64, 128), (64, 150), (70, 128), (90, 140), (100, 80)]
    for i, j in idx:
        direct = wigner_quadrature(
            lambda x: (psi0(x) + psi1(x)) / np.sqrt(2.0),
            grid128.x[i], grid128.p[j])
        assert w.values[i, j] == pytest.approx(direct, abs=1e-8)


def test_wigner_normalizes_to_one(grid256):
    w = wigner_of_pure(gaussian_packet(grid256, 0.5, -1.0, 0.9))
    assert integrate_2d(w) == pytest.approx(1.0, abs=1e-9)


def test_position_marginal_recovers_density(grid256):
    psi = gaussian_packet(grid256, 1.0, 0.5, 0.8)
    w = wigner_of_pure(psi)
    marginal = w.values.sum(axis=1) * grid256.dp
    assert np.max(np.abs(marginal - np.abs(psi.values) ** 2)) < 1e-10


def test_momentum_marginal_recovers_density(grid256):
    psi = gaussian_packet(grid256, 1.0, 0.5, 0.8)
    w = wigner_of_pure(psi)
    marginal = w.values.sum(axis=0) * grid256.dx
    density = np.abs(momentum_amplitudes(psi)) ** 2
    assert np.max(np.abs(marginal - density)) < 1e-10


def test_purity_of_pure_states_is_one(grid256):
    for psi in (gaussian_packet(grid256, 0.0, 1.2, 1.0),
                ho_eigenstate(grid256, 2, 1.0)):
        assert purity(wigner_of_pure(psi)) == pytest.approx(1.0, abs=1e-9)


def test_overlap_identity(grid128):
    # 2 pi hbar * int W_a W_b = |<a|b>|^2
    a = gaussian_packet(grid128, -0.7, 0.4, 1.0)
    b = gaussian_packet(grid128, 0.9, -0.3, 1.3)
    w_a, w_b = wigner_of_pure(a), wigner_of_pure(b)
    lhs = 2.0 * np.pi * grid128.hbar * float(
        (w_a.values * w_b.values).sum() * grid128.cell_area)
    braket = np.vdot(a.values, b.values) * grid128.dx
    assert lhs == pytest.approx(abs(braket) ** 2, abs=1e-10)


def test_cross_wigner_hermiticity(grid128):
    a = ho_eigenstate(grid128, 0, 1.0)
    b = ho_eigenstate(grid128, 2, 1.0)
    f_ab = cross_wigner(a, b)
    f_ba = cross_wigner(b, a)
    assert np.max(np.abs(f_ab - f_ba.conj())) < 1e-12
    diag = cross_wigner(a, a)
    assert np.max(np.abs(diag.imag)) < 1e-12


def test_mixture_wigner_is_convex_combination(grid128):
    a = ho_eigenstate(grid128, 0, 1.0)
    b = ho_eigenstate(grid128, 1, 1.0)
    mix = MixedState([(0.25, a), (0.75, b)])
    w = wigner_of_mixture(mix)
    manual = 0.25 * wigner_of_pure(a).values + 0.75 * wigner_of_pure(b).values
    assert np.max(np.abs(w.values - manual)) < 1e-14


def test_orthogonal_mixture_purity(grid128):
    mix = MixedState([(0.5, ho_eigenstate(grid128, 0, 1.0)),
                      (0.5, ho_eigenstate(grid128, 1, 1.0))])
    assert purity(wigner_of_mixture(mix)) == pytest.approx(0.5, abs=1e-9)


def test_mixture_weights_must_sum_to_one(grid128):
    a = ho_eigenstate(grid128, 0, 1.0)
    with pytest.raises(ValueError):
        MixedState([(0.6, a), (0.6, a)])


def test_negativity_of_first_excited_state(grid256):
    # min is -1/pi at the origin; negative volume is 2 exp(-1/2) - 1
    w = wigner_of_pure(ho_eigenstate(grid256, 1, 1.0))
    w_min, volume = negativity_diagnostics(w)
    assert w_min == pytest.approx(-1.0 / np.pi, rel=1e-6)
    assert volume == pytest.approx(2.0 * np.exp(-0.5) - 1.0, rel=1e-3)


def test_gaussian_negativity_is_numerical_noise(grid256):
    w = wigner_of_pure(gaussian_packet(grid256, 0.3, -0.2, 1.2))
    w_min, volume = negativity_diagnostics(w)
    assert w_min > -1e-10
    assert volume < 1e-9


def test_packet_too_close_to_wall_is_rejected(grid64):
    with pytest.raises(ValueError, match="outside"):
        gaussian_packet(grid64, -7.5, 0.0, 1.0)


def test_packet_beyond_nyquist_is_rejected(grid64):
    p_edge = np.pi * grid64.hbar / grid64.dx
    with pytest.raises(ValueError, match="Nyquist"):
        gaussian_packet(grid64, 0.0, p_edge, 1.0)


def test_uncontained_eigenstate_is_rejected(grid64):
    with pytest.raises(ValueError, match="contained"):
        ho_eigenstate(grid64, 80, 1.0)


def test_ho_eigenstates_are_orthonormal(grid128):
    states = [ho_eigenstate(grid128, n, 1.0) for n in range(6)]
    for i, a in enumerate(states):
        for j, b in enumerate(states):
            overlap = np.vdot(a.values, b.values) * grid128.dx
            assert abs(overlap - (1.0 if i == j else 0.0)) < 1e-10


@given(
    x0=st.floats(min_value=-2.0, max_value=2.0),
    p0=st.floats(min_value=-2.0, max_value=2.0),
    sigma=st.floats(min_value=0.5, max_value=1.6),
)
def test_random_gaussians_stay_positive_and_pure(x0, p0, sigma):
    grid = make_grid(-12.0, 12.0, 128, n_p=256)
    w = wigner_of_pure(gaussian_packet(grid, x0, p0, sigma))
    assert purity(w) == pytest.approx(1.0, abs=1e-6)
    assert w.values.min() > -1e-7
    assert integrate_2d(w) == pytest.approx(1.0, abs=1e-6)
