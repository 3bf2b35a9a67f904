"""Tunnelling and reflection detection on phase-space fields.

The detection functional pairs a state field with the effect difference
E_{x : V > E*} - E_{E > E*}.  Classically the difference is non-positive
cell by cell, so any value above the detection threshold witnesses
behaviour with no classical counterpart.  Scans sweep E* over a grid built
from the captured part of the spectrum; every probability in a scan comes
from per-eigenstate overlaps, which equals the assembled-field route term
by term by linearity of the pairing.

Reflection uses the same machinery with the momentum band |p| less than
sqrt(2m(E* - sup V)) in place of the forbidden region, and a strictly-below
energy effect in place of strictly-above.
"""

from dataclasses import dataclass

import numpy as np

from .classical import ClassicalState
from .effects import EnergyEffectAssembler, classical_energy_effect, \
    momentum_band_effect, position_effect
from .grid import PhaseField, inner_product, integrate_2d
from .spectral import Potential, RectangularBarrier, Spectrum, \
    discretize_hamiltonian
from .states import WaveFunction, negativity_diagnostics

__all__ = [
    "TAU_DET",
    "TunnellingReport",
    "tunnelling_functional",
    "scan_tunnelling",
    "barrier_eigenstate_check",
    "packet_tunnelling_criterion",
    "reflection_functional",
    "scan_reflection",
]

TAU_DET = 1e-6
_EPS = 1e-9
_CAPTURE_BUDGET = 1e-8


@dataclass
class TunnellingReport:
    """Outcome of an E* scan.

    functional_values[i] is the detection functional at e_star_grid[i].
    The witness is the E* achieving max_violation when the verdict is
    positive; rate_op_negativity holds (min value, negative volume) of the
    effect difference assembled at the witness, state_negativity the same
    diagnostics for the scanned field itself.
    """

    e_star_grid: np.ndarray
    functional_values: np.ndarray
    verdict: bool
    witness_e_star: float
    max_violation: float
    state_negativity: tuple
    rate_op_negativity: tuple
    tau_det: float
    label: str = "tunnelling"


def _classical_field(f) -> PhaseField:
    if isinstance(f, ClassicalState):
        return f.field
    raise TypeError(
        f"expected a classical distribution, got {type(f).__name__}")


def _require_quantum(f, spectrum):
    if not isinstance(f, PhaseField):
        raise TypeError(
            f"expected a phase-space field, got {type(f).__name__}")
    if spectrum is None:
        raise ValueError("quantum detection needs a spectrum")
    if spectrum.grid != f.grid:
        raise ValueError("spectrum and field live on different grids")


def tunnelling_functional(f, potential: Potential, e_star: float,
                          spectrum: Spectrum = None) -> float:
    """integral of [E_{x:V>E*} - E_{E>E*}] * f over phase space.

    Positive values flag probability mass assigned to the forbidden region
    beyond what the energy distribution permits.  The flavor of the energy
    effect follows the type of f: classical distributions pair with the
    H > E* indicator, quantum fields with the spectral effect.
    """
    if isinstance(f, ClassicalState):
        if spectrum is not None:
            raise ValueError("classical states take no spectrum")
        field = f.field
        grid = field.grid
        energy = classical_energy_effect(grid, potential, e_star)
    else:
        _require_quantum(f, spectrum)
        field = f
        grid = field.grid
        energy = EnergyEffectAssembler(grid, spectrum).assemble(e_star)
    region = position_effect(grid, potential, e_star)
    diff = PhaseField(grid, region.field.values - energy.field.values)
    return float(inner_product(diff, field))


def reflection_functional(f, potential: Potential, e_star: float,
                          spectrum: Spectrum = None) -> float:
    """P(|p| < sqrt(2m(E* - sup V))) - P(E < E*) as a field pairing.

    Classically non-positive: momenta inside the band bound the kinetic
    term, so H < E* wherever the band indicator is 1.
    """
    if isinstance(f, ClassicalState):
        if spectrum is not None:
            raise ValueError("classical states take no spectrum")
        field = f.field
        grid = field.grid
        v = potential.values(grid)
        h = v[:, None] + (grid.p**2 / (2.0 * grid.mass))[None, :]
        below_values = (h < e_star).astype(float)
    else:
        _require_quantum(f, spectrum)
        field = f
        grid = field.grid
        below_values = EnergyEffectAssembler(grid, spectrum) \
            .assemble_below(e_star).field.values
    band = momentum_band_effect(grid, potential, e_star)
    diff = PhaseField(grid, band.field.values - below_values)
    return float(inner_product(diff, field))


class _OverlapLadder:
    """Per-eigenstate overlaps o_n = 2*pi*hbar * integral(W_n * f).

    Climbs the spectrum until the uncaptured remainder of f drops under
    the budget; the remainder then bounds the error of every cumulative
    probability built from the ladder.
    """

    def __init__(self, assembler: EnergyEffectAssembler, f: PhaseField,
                 budget: float = _CAPTURE_BUDGET):
        grid = f.grid
        self.total = integrate_2d(f)
        spectrum = assembler.spectrum
        if spectrum.momentum_diagonal:
            col_mass = f.values.sum(axis=0) * grid.cell_area
            self.energies = spectrum.energies
            self.cum = np.concatenate([[0.0],
                                       np.cumsum(col_mass[spectrum.cell_order])])
            return
        two_pi_hbar = 2.0 * np.pi * grid.hbar
        energies = spectrum.energies
        overlaps = []
        running = 0.0
        for n in range(len(energies)):
            w_n = assembler.eigenstate_wigner(n)
            o_n = two_pi_hbar * float((w_n * f.values).sum()) * grid.cell_area
            overlaps.append(o_n)
            running += o_n
            if self.total - running <= budget:
                break
        else:
            if spectrum.truncated:
                raise ValueError(
                    f"state mass {self.total - running:.3e} above the "
                    f"truncated spectrum exceeds the capture budget {budget:.0e}")
        self.energies = energies[:len(overlaps)]
        self.cum = np.concatenate([[0.0], np.cumsum(overlaps)])

    def prob_above(self, e_star: float) -> float:
        # strict E_n > E*; remainder above the ladder top counts as above
        n_le = np.searchsorted(self.energies, e_star, side="right")
        return self.total - float(self.cum[n_le])

    def prob_below(self, e_star: float) -> float:
        # strict E_n < E*; the remainder is taken to sit above E*
        n_lt = np.searchsorted(self.energies, e_star, side="left")
        return float(self.cum[n_lt])


def _marginal_masses(field: PhaseField):
    row = field.values.sum(axis=1) * field.grid.cell_area
    col = field.values.sum(axis=0) * field.grid.cell_area
    return row, col


def _sorted_energy_mass(field: PhaseField, potential: Potential):
    grid = field.grid
    v = potential.values(grid)
    h = (v[:, None] + (grid.p**2 / (2.0 * grid.mass))[None, :]).ravel()
    order = np.argsort(h, kind="stable")
    mass = field.values.ravel()[order] * grid.cell_area
    return h[order], np.concatenate([[0.0], np.cumsum(mass)])


def _default_tunnel_grid(anchor_energies: np.ndarray, sup_v: float) -> np.ndarray:
    pts = [np.array([0.0]),
           np.array([sup_v - _eps_for(sup_v), sup_v + _eps_for(sup_v)])]
    e = np.asarray(anchor_energies, dtype=float)
    if e.size:
        pts.append(e + _eps_for(e))
        if e.size > 1:
            pts.append(0.5 * (e[1:] + e[:-1]))
    return np.unique(np.concatenate(pts))


def _eps_for(value):
    return _EPS * np.maximum(1.0, np.abs(value))


def _finish_report(grid_vals, fn_vals, tau_det, field, rate_field_at,
                   label) -> TunnellingReport:
    fn_vals = np.asarray(fn_vals, dtype=float)
    max_violation = float(fn_vals.max())
    verdict = bool(max_violation > tau_det)
    witness = float(grid_vals[int(np.argmax(fn_vals))]) if verdict else None
    rate_neg = None
    if verdict:
        rate_neg = negativity_diagnostics(rate_field_at(witness))
    return TunnellingReport(
        e_star_grid=np.asarray(grid_vals, dtype=float),
        functional_values=fn_vals,
        verdict=verdict,
        witness_e_star=witness,
        max_violation=max_violation,
        state_negativity=negativity_diagnostics(field),
        rate_op_negativity=rate_neg,
        tau_det=tau_det,
        label=label,
    )


def scan_tunnelling(f, potential: Potential, spectrum: Spectrum = None,
                    e_star_policy=None, tau_det: float = TAU_DET,
                    capture_budget: float = _CAPTURE_BUDGET, *,
                    assembler: EnergyEffectAssembler = None) -> TunnellingReport:
    """Sweeps E* and reports whether any value of the functional exceeds
    tau_det.

    The default E* grid takes midpoints between consecutive captured
    eigenvalues, each eigenvalue nudged up by a relative epsilon (the
    functional is largest immediately above a level, where the forbidden
    region is widest while the energy tail is unchanged), plus 0 and
    sup V on either side.

    Pass the same assembler across calls to reuse its eigenstate Wigner
    cache; its spectrum then stands in for the spectrum argument.
    """
    if isinstance(f, ClassicalState):
        if spectrum is not None:
            raise ValueError("classical states take no spectrum")
        field = f.field
        grid = field.grid
        v = potential.values(grid)
        row_mass, _ = _marginal_masses(field)
        h_sorted, h_cum = _sorted_energy_mass(field, potential)
        total = float(h_cum[-1])
        if e_star_policy is None:
            span = np.linspace(h_sorted[0], h_sorted[-1], 129)
            e_grid = _default_tunnel_grid(span, potential.sup_v(grid))
        else:
            e_grid = np.unique(np.asarray(e_star_policy, dtype=float))
        if e_grid.size == 0:
            raise ValueError("empty E* grid")
        fn = np.empty(e_grid.size)
        for i, e_star in enumerate(e_grid):
            p_x = float(row_mass[v > e_star].sum())
            n_le = np.searchsorted(h_sorted, e_star, side="right")
            p_e = total - float(h_cum[n_le])
            fn[i] = p_x - p_e

        def rate_field(e_star):
            energy = classical_energy_effect(grid, potential, e_star)
            region = position_effect(grid, potential, e_star)
            return PhaseField(grid, energy.field.values - region.field.values)

        return _finish_report(e_grid, fn, tau_det, field, rate_field,
                              "tunnelling")

    if assembler is not None:
        spectrum = assembler.spectrum
    _require_quantum(f, spectrum)
    grid = f.grid
    v = potential.values(grid)
    if assembler is None:
        assembler = EnergyEffectAssembler(grid, spectrum)
    elif assembler.grid != grid:
        raise ValueError("assembler was built on a different grid")
    ladder = _OverlapLadder(assembler, f, capture_budget)
    row_mass, _ = _marginal_masses(f)
    if e_star_policy is None:
        e_grid = _default_tunnel_grid(ladder.energies, potential.sup_v(grid))
    else:
        e_grid = np.unique(np.asarray(e_star_policy, dtype=float))
    if e_grid.size == 0:
        raise ValueError("empty E* grid")
    fn = np.empty(e_grid.size)
    for i, e_star in enumerate(e_grid):
        p_x = float(row_mass[v > e_star].sum())
        fn[i] = p_x - ladder.prob_above(e_star)

    def rate_field(e_star):
        energy = assembler.assemble(e_star)
        region = position_effect(grid, potential, e_star)
        return PhaseField(grid, energy.field.values - region.field.values)

    return _finish_report(e_grid, fn, tau_det, f, rate_field, "tunnelling")


def scan_reflection(f, potential: Potential, spectrum: Spectrum = None,
                    e_star_policy=None, tau_det: float = TAU_DET,
                    capture_budget: float = _CAPTURE_BUDGET, *,
                    assembler: EnergyEffectAssembler = None) -> TunnellingReport:
    """E* sweep of the reflection functional.

    The default grid places points where either side of the comparison
    jumps: just above sup V + p_j^2/2m for every momentum cell (the band
    admits the cell there) and at the captured eigenvalues (the energy
    side admits the level just above).
    """
    if isinstance(f, ClassicalState):
        field, ladder, assembler = f.field, None, None
        if spectrum is not None:
            raise ValueError("classical states take no spectrum")
    else:
        if assembler is not None:
            spectrum = assembler.spectrum
        _require_quantum(f, spectrum)
        field = f
        if assembler is None:
            assembler = EnergyEffectAssembler(f.grid, spectrum)
        elif assembler.grid != f.grid:
            raise ValueError("assembler was built on a different grid")
        ladder = _OverlapLadder(assembler, f, capture_budget)
    grid = field.grid
    sup_v = potential.sup_v(grid)
    _, col_mass = _marginal_masses(field)
    abs_p = np.abs(grid.p)

    if ladder is None:
        h_sorted, h_cum = _sorted_energy_mass(field, potential)
        anchors = np.linspace(h_sorted[0], h_sorted[-1], 129)
        e_top = h_sorted[-1]
    else:
        anchors = ladder.energies
        e_top = anchors[-1] if anchors.size else sup_v
    if e_star_policy is None:
        band_e = sup_v + np.unique(abs_p)**2 / (2.0 * grid.mass)
        band_e = band_e[band_e <= e_top + _eps_for(e_top)]
        pts = [band_e + _eps_for(band_e), np.asarray(anchors, dtype=float),
               np.array([sup_v + _eps_for(sup_v)])]
        e_grid = np.unique(np.concatenate(pts))
    else:
        e_grid = np.unique(np.asarray(e_star_policy, dtype=float))
    if e_grid.size == 0:
        raise ValueError("empty E* grid")

    fn = np.empty(e_grid.size)
    for i, e_star in enumerate(e_grid):
        if e_star > sup_v:
            bound = np.sqrt(2.0 * grid.mass * (e_star - sup_v))
            p_band = float(col_mass[abs_p < bound].sum())
        else:
            p_band = 0.0
        if ladder is None:
            n_lt = np.searchsorted(h_sorted, e_star, side="left")
            p_below = float(h_cum[n_lt])
        else:
            p_below = ladder.prob_below(e_star)
        fn[i] = p_band - p_below

    def rate_field(e_star):
        band = momentum_band_effect(grid, potential, e_star)
        if ladder is None:
            v = potential.values(grid)
            h = v[:, None] + (grid.p**2 / (2.0 * grid.mass))[None, :]
            below = (h < e_star).astype(float)
        else:
            below = assembler.assemble_below(e_star).field.values
        return PhaseField(grid, band.field.values - below)

    return _finish_report(e_grid, fn, tau_det, field, rate_field, "reflection")


def barrier_eigenstate_check(psi: WaveFunction, e0: float, v0: float,
                             length: float, tau_det: float = TAU_DET,
                             rtol: float = 1e-8) -> bool:
    """True when a barrier eigenstate below the top carries mass inside it.

    psi must actually be an eigenvector of the discretized barrier
    Hamiltonian at energy e0; the residual gate rejects anything else.
    """
    grid = psi.grid
    h = discretize_hamiltonian(grid, RectangularBarrier(v0, length))
    residual = h.apply(psi.values) - e0 * psi.values
    norm = np.sqrt(psi.norm_squared())
    if np.linalg.norm(residual) * np.sqrt(grid.dx) > rtol * h.scale() * norm:
        raise ValueError(
            "psi is not an eigenvector of the barrier Hamiltonian at "
            f"E={e0!r} (relative residual "
            f"{np.linalg.norm(residual) * np.sqrt(grid.dx) / (h.scale() * norm):.3e})")
    inside = (grid.x >= 0.0) & (grid.x < length)
    p_in = float((np.abs(psi.values[inside])**2).sum() * grid.dx)
    return bool(e0 < v0 and p_in > tau_det)


def packet_tunnelling_criterion(f_t, v0: float, length: float = None,
                                spectrum: Spectrum = None,
                                tau_det: float = TAU_DET) -> bool:
    """True when barrier-interior mass exceeds the above-barrier energy tail.

    Accepts either a phase-space field (then length and spectrum are
    required) or a precomputed pair (P_inside, P_energy_above).
    """
    if isinstance(f_t, PhaseField):
        if length is None or spectrum is None:
            raise ValueError("field input needs the barrier length and a spectrum")
        _require_quantum(f_t, spectrum)
        grid = f_t.grid
        row_mass, _ = _marginal_masses(f_t)
        inside = (grid.x >= 0.0) & (grid.x < length)
        p_in = float(row_mass[inside].sum())
        ladder = _OverlapLadder(EnergyEffectAssembler(grid, spectrum), f_t)
        p_above = ladder.prob_above(v0)
    else:
        p_in, p_above = (float(q) for q in f_t)
    return bool(p_in > p_above + tau_det)
