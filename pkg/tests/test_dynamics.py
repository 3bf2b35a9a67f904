import numpy as np
import pytest

from phasetunnel.dynamics import (
    BoundaryLeakError,
    crank_nicolson_evolve,
    energy_cdf_drift,
    split_step_evolve,
    track_barrier_probabilities,
    validate_step_size,
)
from phasetunnel.grid import make_grid
from phasetunnel.spectral import (
    FreePotential,
    HarmonicPotential,
    RectangularBarrier,
    discretize_hamiltonian,
    eigendecompose,
)
from phasetunnel.states import gaussian_packet


@pytest.fixture(scope="module")
def box():
    return make_grid(-12.0, 12.0, 256, n_p=512)


@pytest.fixture(scope="module")
def barrier_run(box):
    psi = gaussian_packet(box, -4.0, 1.2, 1.0)
    bar = RectangularBarrier(2.0, 1.0)
    spec = eigendecompose(discretize_hamiltonian(box, bar))
    run = crank_nicolson_evolve(psi, bar, 1e-3, 1500, stride=300)
    return box, bar, spec, run


def test_free_packet_matches_dispersing_closed_form(box):
    # V = 0 and the fft kinetic make the march exact up to tail wrap,
    # so the density must track the spreading-Gaussian solution
    psi = gaussian_packet(box, -2.0, 1.0, 1.0)
    run = split_step_evolve(psi, FreePotential(), 1e-3, 2000, stride=1000)
    t = run.times[-1]
    s2 = 1.0 + (t / 2.0) ** 2
    mu = -2.0 + t
    closed = np.exp(-(box.x - mu) ** 2 / (2.0 * s2)) / np.sqrt(2.0 * np.pi * s2)
    dens = np.abs(run.frames[-1].values) ** 2
    assert np.abs(dens - closed).max() < 1e-10
    assert np.abs(run.norms - 1.0).max() < 1e-10
    assert run.propagator == "strang_fft"
    assert len(run) == 3  # t = 0, 1, 2


def test_dst_and_crank_nicolson_agree(barrier_run):
    box, bar, _, run_cn = barrier_run
    psi = gaussian_packet(box, -4.0, 1.2, 1.0)
    run_dst = split_step_evolve(psi, bar, 1e-3, 1500, stride=1500,
                                kinetic="dst")
    gap = run_dst.frames[-1].values - run_cn.frames[-1].values
    assert np.sqrt((np.abs(gap) ** 2).sum() * box.dx) < 1e-4
    assert run_dst.propagator == "strang_dst"
    assert run_cn.propagator == "crank_nicolson"


def test_step_halving_error_is_third_order_per_step(box):
    psi = gaussian_packet(box, -4.0, 1.2, 1.0)
    pot = HarmonicPotential(1.0)
    e_coarse = validate_step_size(psi, pot, 2e-3)
    e_fine = validate_step_size(psi, pot, 1e-3)
    assert 6.5 < e_coarse / e_fine < 9.5


def test_boundary_leak_raises(box):
    psi = gaussian_packet(box, 5.0, 2.5, 1.0)
    with pytest.raises(BoundaryLeakError, match="outer"):
        split_step_evolve(psi, FreePotential(), 1e-3, 3000, stride=500)


def test_propagator_argument_validation(box):
    psi = gaussian_packet(box, 0.0, 0.0, 1.0)
    pot = FreePotential()
    with pytest.raises(ValueError, match="dt must be positive"):
        split_step_evolve(psi, pot, 0.0, 10)
    with pytest.raises(ValueError, match="must be positive"):
        split_step_evolve(psi, pot, 1e-3, 0)
    with pytest.raises(ValueError, match="kinetic basis"):
        split_step_evolve(psi, pot, 1e-3, 10, kinetic="chebyshev")
    with pytest.raises(ValueError, match="dt must be positive"):
        crank_nicolson_evolve(psi, pot, -1e-3, 10)


def test_tracked_series_matches_direct_quadrature(barrier_run):
    box, _, spec, run = barrier_run
    series = track_barrier_probabilities(run, spec, 2.0, 1.0)
    assert len(series) == len(run)
    inside = (box.x >= 0.0) & (box.x < 1.0)
    above = spec.energies > 2.0
    for (t, p_in, p_above, norm), flag in zip(series, series.mask):
        k = int(np.searchsorted(run.times, t))
        frame = run.frames[k]
        want_in = float((np.abs(frame.values[inside]) ** 2).sum() * box.dx)
        want_above = float(
            (np.abs(spec.coefficients(frame)) ** 2)[above].sum())
        assert p_in == pytest.approx(want_in, abs=1e-12)
        assert p_above == pytest.approx(want_above, abs=1e-12)
        assert flag == (p_in > p_above + series.tau_det)
    assert run.series is series.rows


def test_tracking_requires_the_same_grid_object(barrier_run):
    box, bar, _, run = barrier_run
    clone = make_grid(-12.0, 12.0, 256, n_p=512)
    spec_clone = eigendecompose(discretize_hamiltonian(clone, bar))
    with pytest.raises(ValueError, match="different grids"):
        track_barrier_probabilities(run, spec_clone, 2.0, 1.0)
    with pytest.raises(ValueError, match="length must be positive"):
        track_barrier_probabilities(
            run, eigendecompose(discretize_hamiltonian(box, bar)), 2.0, 0.0)


def test_energy_cdf_is_static_under_crank_nicolson(barrier_run):
    # the Cayley step is diagonal in the eigenbasis of the same
    # discretized H, so spectral weights cannot move at any dt
    _, _, spec, run = barrier_run
    drift = energy_cdf_drift(run, spec, np.linspace(0.2, 3.0, 8))
    assert drift < 1e-10
    with pytest.raises(ValueError, match="empty E\\* grid"):
        energy_cdf_drift(run, spec, [])


def test_energy_cdf_drift_small_under_strang(box):
    psi = gaussian_packet(box, -4.0, 1.2, 1.0)
    bar = RectangularBarrier(2.0, 1.0)
    spec = eigendecompose(discretize_hamiltonian(box, bar))
    run = split_step_evolve(psi, bar, 1e-3, 1500, stride=750, kinetic="dst")
    assert energy_cdf_drift(run, spec, np.linspace(0.2, 3.0, 8)) < 1e-6
