"""Acceptance battery: one test per shipped behaviour guarantee.

Run with `pytest tests/test_acceptance.py -v -s` to get one PASS/FAIL line
per criterion.  Criteria 1, 3, 4 and 10 drive the bundled scenario files
through the CLI; the rest call the library against independent oracles.
The whole battery is a few minutes of wall time, dominated by criterion 4.
"""
import json
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

from phasetunnel import cli
from phasetunnel.effects import (EnergyEffectAssembler, position_effect,
                                 quantum_energy_effect,
                                 tunnelling_rate_operator)
from phasetunnel.grid import inner_product, make_grid
from phasetunnel.postquantum import (GaussianMoments, density_eigenvalues,
                                     eigenbasis_overlap, gaussian_purity,
                                     gaussian_wigner,
                                     reconstruct_density_matrix)
from phasetunnel.spectral import (HarmonicPotential, RectangularBarrier,
                                  discretize_hamiltonian, eigendecompose,
                                  free_momentum_energy_cdf,
                                  position_region_prob)
from phasetunnel.states import (MixedState, gaussian_packet, ho_eigenstate,
                                purity, wigner_of_mixture, wigner_of_pure)
from phasetunnel.tunnelling import (barrier_eigenstate_check, scan_tunnelling,
                                    tunnelling_functional)

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
SEED = 1234


def _verdict(n: int, label: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"criterion {n:2d} [{tag}] {label}{suffix}")
    assert ok, f"criterion {n} failed: {label}{suffix}"


def test_01_harmonic_ground_state_tunnels(tmp_path):
    started = time.monotonic()
    rc = cli.main(["tunnel-scan", str(SCENARIOS / "harmonic_ground.toml"),
                   "--out", str(tmp_path)])
    elapsed = time.monotonic() - started
    report = json.loads((tmp_path / "harmonic_ground_report.json").read_text())
    rows = np.loadtxt(tmp_path / "harmonic_ground_scan.csv",
                      delimiter=",", skiprows=1)
    cell = float(np.diff(rows[:, 0]).max())
    at_half = float(rows[np.isclose(rows[:, 0], 0.5), 1][0])
    # stated oracle: quadrature of the ground-state density beyond the
    # classical turning points |x| = sqrt(hbar / m omega) = 1
    tail, _ = quad(lambda x: np.exp(-x * x) / np.sqrt(np.pi), 1.0, np.inf)
    oracle = 2.0 * tail
    ok = (rc == 0 and report["verdict"] is True
          and abs(report["witness_e_star"] - 0.5) <= cell + 1e-12
          and abs(at_half - oracle) < 1e-3
          and abs(at_half - 0.15730) < 1e-3
          and elapsed < 30.0)
    _verdict(1, "harmonic ground state tunnels at E* = hbar*omega/2", ok,
             f"functional(0.5)={at_half:.5f} oracle={oracle:.5f} "
             f"witness={report['witness_e_star']} {elapsed:.1f}s")


def test_02_rate_operator_closed_form():
    grid = make_grid(-1024.0 / 85.0, 1024.0 / 85.0, 1024, n_p=2048)
    potential = HarmonicPotential(1.0)
    spectrum = eigendecompose(discretize_hamiltonian(grid, potential), k=64)
    rate = tunnelling_rate_operator(grid, potential, 0.5, "quantum", spectrum)
    # at E* = hbar*omega/2 only the ground level lies at or below the
    # threshold, so E_{E > E*} = 1 - 2*pi*hbar*W_0 and the operator is
    # -g outside the turning points and 1 - g inside, g = 2 exp(-x^2 - p^2)
    g = 2.0 * np.exp(-(grid.x[:, None] ** 2) - (grid.p[None, :] ** 2))
    closed = np.where((0.5 * grid.x ** 2 > 0.5)[:, None], -g, 1.0 - g)
    rng = np.random.default_rng(SEED)
    ii = rng.integers(0, grid.n_x, size=1000)
    jj = rng.integers(0, grid.n_p, size=1000)
    worst = float(np.abs(rate.field.values[ii, jj] - closed[ii, jj]).max())
    rate_min = float(rate.field.values.min())
    ok = worst < 1e-3 and rate_min < 0.0
    _verdict(2, "rate operator matches its closed form at E* = hbar*omega/2",
             ok, f"max|diff|={worst:.2e} at 1000 points, min={rate_min:.3f}")


def test_03_classical_states_never_tunnel(tmp_path):
    rc = cli.main(["classical-check",
                   str(SCENARIOS / "classical_battery.toml"),
                   "--out", str(tmp_path)])
    report = json.loads(
        (tmp_path / "classical_battery_report.json").read_text())
    ok = (rc == 0 and report["passed"] is True
          and len(report["draws"]) == 100
          and report["worst_functional"] <= 1e-9
          and report["worst_rate_op_min"] >= 0.0)
    _verdict(3, "100 randomized classical draws all stay non-tunnelling", ok,
             f"worst functional={report['worst_functional']:.2e} "
             f"worst rate-op min={report['worst_rate_op_min']:.2e}")


def test_04_barrier_packet_timeline(tmp_path):
    started = time.monotonic()
    rc = cli.main(["evolve", str(SCENARIOS / "barrier_tunnelling.toml"),
                   "--out", str(tmp_path)])
    elapsed = time.monotonic() - started
    summary = json.loads(
        (tmp_path / "barrier_tunnelling_summary.json").read_text())
    rows = np.loadtxt(tmp_path / "barrier_tunnelling_series.csv",
                      delimiter=",", skiprows=1)
    hits = rows[:, 1] > rows[:, 2] + 1e-6
    p_above_span = float(np.ptp(rows[:, 2]))
    ok = (rc == 0 and bool(hits.any())
          and p_above_span < 1e-6
          and summary["negativity_volume_initial"] <= 1e-6
          and summary["negativity_volume_max"] > 1e-3
          and elapsed < 120.0)
    _verdict(4, "barrier packet: interior mass beats the energy tail while "
                "negativity grows", ok,
             f"{int(hits.sum())}/{len(hits)} times, "
             f"P(E>V0) span={p_above_span:.1e}, "
             f"negativity {summary['negativity_volume_initial']:.1e} -> "
             f"{summary['negativity_volume_max']:.1e}, {elapsed:.0f}s")


def test_05_barrier_eigenstate_check_matches_scans():
    v0, length = 2.0, 1.0
    grid = make_grid(-16.0, 16.0, 512, n_p=1024)
    potential = RectangularBarrier(v0, length)
    spectrum = eigendecompose(discretize_hamiltonian(grid, potential))
    assembler = EnergyEffectAssembler(grid, spectrum)
    pairs = []
    for n in range(5):
        psi = spectrum.eigenstate(n)
        direct = barrier_eigenstate_check(psi, float(spectrum.energies[n]),
                                          v0, length)
        rep = scan_tunnelling(wigner_of_pure(psi), potential,
                              assembler=assembler)
        pairs.append((direct, rep.verdict))
    ok = all(a == b for a, b in pairs)
    _verdict(5, "eigenstate shortcut agrees with full scans on 5 levels", ok,
             "verdicts " + ",".join(str(a) for a, _ in pairs))


def test_06_functional_equals_probability_difference():
    grid = make_grid(-10.0, 10.0, 128, n_p=256)
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for draw in range(50):
        if rng.random() < 0.5:
            potential = HarmonicPotential(rng.uniform(0.6, 1.6))
        else:
            potential = RectangularBarrier(rng.uniform(0.8, 3.0),
                                           rng.uniform(0.6, 2.0))
        spectrum = eigendecompose(discretize_hamiltonian(grid, potential))
        packets = [gaussian_packet(grid, rng.uniform(-3, 3),
                                   rng.uniform(-2, 2), rng.uniform(0.5, 1.5))
                   for _ in range(2)]
        if draw % 3 == 0:
            state = MixedState([(0.4, packets[0]), (0.6, packets[1])])
            w = wigner_of_mixture(state)
            weights = state.components
        else:
            state = packets[0]
            w = wigner_of_pure(state)
            weights = [(1.0, state)]
        e_star = rng.uniform(0.2, 3.0)
        fn = tunnelling_functional(w, potential, e_star, spectrum)
        # independent route: position mass straight from |psi|^2 and the
        # energy tail from coefficient space, no phase-space pairing
        p_x = position_region_prob(state, potential, e_star)
        p_e = sum(wt * float(
            (np.abs(spectrum.coefficients(psi)) ** 2)
            [spectrum.energies > e_star].sum()) for wt, psi in weights)
        worst = max(worst, abs(fn - (p_x - p_e)))
    ok = worst < 1e-3
    _verdict(6, "functional equals P_x - P_E over 50 random triples", ok,
             f"worst |difference|={worst:.2e}")


def test_07_gaussian_positivity_and_purity():
    grid = make_grid(-12.0, 12.0, 256, n_p=512)
    rng = np.random.default_rng(SEED)
    worst_min, worst_purity_err = 0.0, 0.0
    for _ in range(20):
        psi = gaussian_packet(grid, rng.uniform(-3, 3), rng.uniform(-2, 2),
                              rng.uniform(0.5, 1.5))
        w = wigner_of_pure(psi)
        worst_min = min(worst_min, float(w.values.min()))
        worst_purity_err = max(worst_purity_err, abs(purity(w) - 1.0))
    mixture = MixedState([(0.5, ho_eigenstate(grid, 0, 1.0)),
                          (0.5, ho_eigenstate(grid, 1, 1.0))])
    mixed_purity = purity(wigner_of_mixture(mixture))
    ok = (worst_min >= -1e-6 and worst_purity_err <= 1e-4
          and abs(mixed_purity - 0.5) <= 1e-3)
    _verdict(7, "20 gaussians positive and pure; orthogonal mixture at 1/2",
             ok, f"worst min={worst_min:.1e} "
                 f"worst |purity-1|={worst_purity_err:.1e} "
                 f"mixture purity={mixed_purity:.4f}")


def test_08_post_quantum_gaussian_battery():
    grid = make_grid(-8.0, 8.0, 256, n_p=512)
    narrow = GaussianMoments(np.zeros(2), 0.25 * np.eye(2))
    vacuum = GaussianMoments(np.zeros(2), 0.5 * np.eye(2))
    narrow_purity = gaussian_purity(narrow)
    vacuum_purity = gaussian_purity(vacuum)
    narrow_min = float(density_eigenvalues(
        reconstruct_density_matrix(gaussian_wigner(grid, narrow)),
        grid).min())
    vacuum_min = float(density_eigenvalues(
        reconstruct_density_matrix(gaussian_wigner(grid, vacuum)),
        grid).min())
    ok = (abs(narrow_purity - 2.0) <= 1e-12 and narrow_min < -1e-3
          and abs(vacuum_purity - 1.0) <= 1e-3 and vacuum_min >= -1e-6)
    _verdict(8, "gamma = I/4 breaks positivity, gamma = I/2 stays a state",
             ok, f"purities {narrow_purity:.12f}/{vacuum_purity:.6f}, "
                 f"min eigenvalues {narrow_min:.3f}/{vacuum_min:.1e}")


def test_09_oscillator_overlaps_match_trace():
    grid = make_grid(-10.0, 10.0, 128, n_p=256)
    states = [ho_eigenstate(grid, n, 1.0) for n in range(5)]
    worst = 0.0
    for i1 in range(5):
        for j1 in range(5):
            for i2 in range(5):
                for j2 in range(5):
                    got = eigenbasis_overlap(i1, j1, i2, j2, states)
                    want = 1.0 if (i1 == i2 and j1 == j2) else 0.0
                    worst = max(worst, abs(got - want))
    ok = worst < 1e-4
    _verdict(9, "625 oscillator cross-overlaps match the trace oracle", ok,
             f"worst |error|={worst:.2e}")


def test_10_reflection_verdicts(tmp_path):
    rc_free = cli.main(["reflect-scan",
                        str(SCENARIOS / "free_reflection.toml"),
                        "--out", str(tmp_path / "free")])
    free = json.loads(
        (tmp_path / "free" / "free_reflection_report.json").read_text())
    rc_barrier = cli.main(["reflect-scan",
                           str(SCENARIOS / "barrier_reflection.toml"),
                           "--out", str(tmp_path / "barrier")])
    barrier = json.loads(
        (tmp_path / "barrier" / "barrier_reflection_report.json").read_text())
    hits = sum(s["verdict"] for s in barrier["snapshots"])
    ok = (rc_free == 0 and free["verdict"] is False
          and rc_barrier == 0 and barrier["any_verdict"] is True)
    _verdict(10, "free packet never reflects; above-barrier packet does", ok,
             f"free max={free['max_violation']:.1e}, barrier snapshots "
             f"{hits}/{barrier['n_snapshots']}")


def test_11_free_energy_tail_matches_quadrature():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        p0 = rng.uniform(-3.0, 3.0)
        sigma_x = rng.uniform(0.4, 2.0)
        e_star = rng.uniform(0.05, 4.0)
        closed = free_momentum_energy_cdf(p0, sigma_x, e_star, 1.0, 1.0)
        sigma_p = 0.5 / sigma_x

        def density(p):
            return (np.exp(-((p - p0) ** 2) / (2.0 * sigma_p ** 2))
                    / np.sqrt(2.0 * np.pi * sigma_p ** 2))

        q = np.sqrt(2.0 * e_star)
        upper, _ = quad(density, q, np.inf, epsabs=1e-13)
        lower, _ = quad(density, -np.inf, -q, epsabs=1e-13)
        worst = max(worst, abs(closed - (upper + lower)))
    ok = worst < 1e-6
    _verdict(11, "free-packet energy tail matches momentum quadrature", ok,
             f"worst |error|={worst:.2e} over 20 triples")
