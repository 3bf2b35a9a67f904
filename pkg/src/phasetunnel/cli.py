"""Command line front end: scenario configs in, reports and figures out.

Import discipline: this module and the config loader stay stdlib-only at
import time so --threads can pin the BLAS/OpenMP pool sizes in the
environment before numpy first loads; every handler imports the numeric
modules inside its body.

Exit codes: 0 on success, 2 when a suite-mode battery (classical-check,
appendix-suite) fails a check it is expected to pass, 1 on any error.
"""

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

from .config import ConfigError, ScenarioConfig, load_config

__all__ = ["main"]

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS",
                "VECLIB_MAXIMUM_THREADS")


@dataclass
class _Outputs:
    directory: Path
    stem: str
    figures: bool

    def path(self, suffix: str) -> Path:
        return self.directory / (self.stem + suffix)


def _pin_threads(n: int) -> None:
    import os

    if n < 1:
        raise ConfigError(f"--threads must be >= 1, got {n}")
    if "numpy" in sys.modules:
        print("warning: numpy is already loaded; --threads only reaches "
              "pools that read the environment lazily", file=sys.stderr)
    for var in _THREAD_VARS:
        os.environ[var] = str(n)


def _outputs(cfg: ScenarioConfig, override, default_stem: str) -> _Outputs:
    block = cfg.output or {}
    directory = Path(override) if override else Path(block.get("dir", "out"))
    directory.mkdir(parents=True, exist_ok=True)
    return _Outputs(directory, block.get("stem", default_stem),
                    bool(block.get("figures", True)))


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# -- config -> objects -------------------------------------------------

def _build_grid(cfg: ScenarioConfig):
    from .grid import make_grid

    block = cfg.grid
    if not block:
        raise ConfigError(f"{cfg.path}: this subcommand needs a [grid] block")
    return make_grid(block["x_min"], block["x_max"], block["n_x"],
                     hbar=block.get("hbar", 1.0), mass=block.get("mass", 1.0),
                     n_p=block.get("n_p"))


def _build_potential(cfg: ScenarioConfig, grid):
    from . import spectral

    block = cfg.potential
    if not block:
        raise ConfigError(
            f"{cfg.path}: this subcommand needs a [potential] block")
    kind = block["kind"]
    if kind == "rectangular_barrier":
        return spectral.RectangularBarrier(block["v0"], block["length"])
    if kind == "harmonic":
        return spectral.HarmonicPotential(block["omega"])
    if kind == "free":
        return spectral.free_potential()
    import numpy as np

    # one sample per line, resolved relative to the config file
    table_path = Path(cfg.path).parent / block["table_path"]
    values = np.loadtxt(table_path, dtype=float, ndmin=1)
    return spectral.TabulatedPotential(tuple(float(v) for v in values))


def _build_state(block: dict, grid):
    from .states import MixedState, gaussian_packet, ho_eigenstate

    kind = block["kind"]
    if kind == "gaussian":
        return gaussian_packet(grid, block["x0"], block["p0"],
                               block["sigma_x"])
    if kind == "ho_eigenstate":
        return ho_eigenstate(grid, block["n"], block["omega"])
    return MixedState([(comp["weight"], _build_state(comp, grid))
                       for comp in block["components"]])


def _single_state(cfg: ScenarioConfig, grid):
    if not cfg.states:
        raise ConfigError(f"{cfg.path}: this subcommand needs a [state] block")
    if len(cfg.states) > 1:
        raise ConfigError(
            f"{cfg.path}: this subcommand takes a single [state] block")
    return _build_state(cfg.states[0], grid)


def _state_wigner(state):
    from .states import MixedState, wigner_of_mixture, wigner_of_pure

    if isinstance(state, MixedState):
        return wigner_of_mixture(state)
    return wigner_of_pure(state)


def _spectrum_for(cfg: ScenarioConfig, grid, potential, k: int = None):
    from .io import load_spectrum, save_spectrum, spectrum_cache_key
    from .spectral import discretize_hamiltonian, eigendecompose, free_spectrum

    if potential.kind == "free":
        return free_spectrum(grid)
    cache_dir = (cfg.output or {}).get("cache_dir")
    key = None
    if cache_dir:
        # the cache key must pin the truncation depth too
        key = spectrum_cache_key(grid, potential) + (f"-k{k}" if k else "-full")
        cached = load_spectrum(cache_dir, key, grid)
        if cached is not None:
            return cached
    spectrum = eigendecompose(discretize_hamiltonian(grid, potential), k)
    if cache_dir:
        save_spectrum(spectrum, cache_dir, key)
    return spectrum


def _scan_kwargs(cfg: ScenarioConfig, label: str) -> dict:
    scan = cfg.scan or {}
    wanted = scan.get("kind")
    if wanted is not None and wanted != label:
        raise ConfigError(
            f"{cfg.path}: [scan] kind '{wanted}' does not match the "
            f"{label} subcommand")
    kwargs = {"e_star_policy": scan.get("e_stars")}
    if "tau_det" in scan:
        kwargs["tau_det"] = scan["tau_det"]
    if "capture_budget" in scan:
        kwargs["capture_budget"] = scan["capture_budget"]
    return kwargs


def _propagate(cfg: ScenarioConfig, state, potential):
    from .dynamics import crank_nicolson_evolve, split_step_evolve

    block = cfg.evolve
    propagator = block.get("propagator", "strang")
    stride = block.get("stride", 20)
    if propagator == "strang":
        return split_step_evolve(state, potential, block["dt"],
                                 block["n_steps"], stride=stride,
                                 kinetic=block.get("kinetic", "fft"))
    if propagator == "crank_nicolson":
        return crank_nicolson_evolve(state, potential, block["dt"],
                                     block["n_steps"], stride=stride)
    raise ConfigError(f"{cfg.path}: unknown propagator '{propagator}' "
                      "(expected 'strang' or 'crank_nicolson')")


# -- subcommands -------------------------------------------------------

def _cmd_wigner(cfg: ScenarioConfig, out: _Outputs) -> int:
    from .io import (grid_to_dict, write_field_binary, write_field_csv,
                     write_json)
    from .states import negativity_diagnostics, purity

    grid = _build_grid(cfg)
    if not cfg.states:
        raise ConfigError(f"{cfg.path}: wigner needs a [state] block")
    multi = len(cfg.states) > 1
    for idx, block in enumerate(cfg.states):
        w = _state_wigner(_build_state(block, grid))
        stem = f"{out.stem}_{idx}" if multi else out.stem
        base = out.directory / stem
        pur = purity(w)
        neg_min, neg_vol = negativity_diagnostics(w)
        write_field_csv(w, f"{base}.csv")
        write_field_binary(w, f"{base}.wigf")
        write_json({"kind": block["kind"], "grid": grid_to_dict(grid),
                    "purity": pur, "negativity_min": neg_min,
                    "negativity_volume": neg_vol}, f"{base}.json")
        if out.figures:
            from .plotting import field_png

            field_png(w, f"{base}.png", title=block["kind"])
        print(f"wigner: {stem} purity={pur:.6f} "
              f"negativity_min={neg_min:.6e}")
    return 0


def _scan_command(cfg: ScenarioConfig, out: _Outputs, label: str) -> int:
    from .io import report_to_dict, write_json, write_scan_csv
    from .tunnelling import scan_reflection, scan_tunnelling

    grid = _build_grid(cfg)
    potential = _build_potential(cfg, grid)
    w = _state_wigner(_single_state(cfg, grid))
    kwargs = _scan_kwargs(cfg, label)
    spectrum = _spectrum_for(cfg, grid, potential,
                             (cfg.scan or {}).get("k_levels"))
    runner = scan_tunnelling if label == "tunnelling" else scan_reflection
    report = runner(w, potential, spectrum, **kwargs)
    write_json(report_to_dict(report), out.path("_report.json"))
    write_scan_csv(report, out.path("_scan.csv"))
    if out.figures:
        from .plotting import scan_png

        scan_png(report, out.path("_scan.png"))
    witness = ("-" if report.witness_e_star is None
               else f"{report.witness_e_star:.6g}")
    print(f"{label}: verdict={report.verdict} witness={witness} "
          f"max_violation={report.max_violation:.6g}")
    return 0


def _cmd_tunnel_scan(cfg: ScenarioConfig, out: _Outputs) -> int:
    return _scan_command(cfg, out, "tunnelling")


def _cmd_reflect_scan(cfg: ScenarioConfig, out: _Outputs) -> int:
    if cfg.evolve is None:
        return _scan_command(cfg, out, "reflection")

    import numpy as np

    from .effects import EnergyEffectAssembler
    from .io import write_json
    from .states import MixedState, wigner_of_pure
    from .tunnelling import TAU_DET, scan_reflection

    grid = _build_grid(cfg)
    potential = _build_potential(cfg, grid)
    state = _single_state(cfg, grid)
    if isinstance(state, MixedState):
        raise ConfigError(f"{cfg.path}: snapshot scans propagate a pure state")
    kwargs = _scan_kwargs(cfg, "reflection")
    run = _propagate(cfg, state, potential)
    spectrum = _spectrum_for(cfg, grid, potential,
                             (cfg.scan or {}).get("k_levels"))
    # one assembler across snapshots so eigenstate fields are derived once
    assembler = EnergyEffectAssembler(grid, spectrum)
    snapshots = []
    any_verdict = False
    for t, frame in zip(run.times, run.frames):
        rep = scan_reflection(wigner_of_pure(frame), potential,
                              assembler=assembler, **kwargs)
        any_verdict = any_verdict or rep.verdict
        snapshots.append({"t": float(t), "verdict": bool(rep.verdict),
                          "witness_e_star": rep.witness_e_star,
                          "max_violation": float(rep.max_violation)})
    tau = kwargs.get("tau_det", TAU_DET)
    write_json({"label": "reflection", "any_verdict": any_verdict,
                "tau_det": tau, "n_snapshots": len(snapshots),
                "snapshots": snapshots}, out.path("_report.json"))
    _write_csv(out.path("_timeline.csv"), ["t", "max_violation", "verdict"],
               [[f"{s['t']:.17g}", f"{s['max_violation']:.17g}",
                 int(s["verdict"])] for s in snapshots])
    if out.figures:
        from .plotting import timeline_png

        timeline_png([s["t"] for s in snapshots],
                     [s["max_violation"] for s in snapshots],
                     tau, out.path("_timeline.png"))
    n_hits = sum(s["verdict"] for s in snapshots)
    print(f"reflection: any_verdict={any_verdict} "
          f"({n_hits}/{len(snapshots)} snapshots)")
    return 0


def _cmd_evolve(cfg: ScenarioConfig, out: _Outputs) -> int:
    import numpy as np

    from .dynamics import energy_cdf_drift, track_barrier_probabilities
    from .io import write_json, write_series_csv
    from .states import MixedState, negativity_diagnostics, wigner_of_pure

    grid = _build_grid(cfg)
    potential = _build_potential(cfg, grid)
    state = _single_state(cfg, grid)
    if isinstance(state, MixedState):
        raise ConfigError(f"{cfg.path}: evolve propagates a pure state")
    block = cfg.evolve
    if block is None:
        raise ConfigError(f"{cfg.path}: evolve needs an [evolve] block")
    v0 = block.get("track_v0")
    length = block.get("track_length")
    if potential.kind == "rectangular_barrier":
        v0 = potential.v0 if v0 is None else v0
        length = potential.length if length is None else length
    if v0 is None or length is None:
        raise ConfigError(
            f"{cfg.path}: tracking needs a rectangular_barrier potential "
            "or explicit track_v0/track_length")

    run = _propagate(cfg, state, potential)
    spectrum = _spectrum_for(cfg, grid, potential)
    series = track_barrier_probabilities(run, spectrum, v0, length)
    mins, volumes = [], []
    w_last = None
    for frame in run.frames:
        w_last = wigner_of_pure(frame)
        m, vol = negativity_diagnostics(w_last)
        mins.append(m)
        volumes.append(vol)
    rows = np.asarray(series.rows, dtype=float)
    p_above = rows[:, 2]
    midpoints = 0.5 * (spectrum.energies[1:] + spectrum.energies[:-1])
    cdf_drift = energy_cdf_drift(run, spectrum,
                                 np.concatenate([[v0], midpoints]))
    beyond = grid.x >= length
    transmitted = float(
        (np.abs(run.frames[-1].values[beyond]) ** 2).sum() * grid.dx)
    summary = {
        "propagator": run.propagator,
        "dt": float(run.dt),
        "n_steps": int(run.n_steps),
        "stride": int(run.stride),
        "n_snapshots": len(run),
        "norm_drift": float(np.abs(run.norms - 1.0).max()),
        "track_v0": float(v0),
        "track_length": float(length),
        "p_in_initial": float(rows[0, 1]),
        "p_in_max": float(rows[:, 1].max()),
        "p_above_initial": float(p_above[0]),
        "p_above_drift": float(np.abs(p_above - p_above[0]).max()),
        "energy_cdf_drift": float(cdf_drift),
        "mask_nonempty": bool(series.mask.any()),
        "n_mask_times": int(series.mask.sum()),
        "first_mask_time": (float(rows[series.mask, 0][0])
                            if series.mask.any() else None),
        "negativity_volume_initial": float(volumes[0]),
        "negativity_volume_max": float(max(volumes)),
        "transmitted_final": transmitted,
    }
    write_series_csv(series.rows, mins, out.path("_series.csv"))
    write_json(summary, out.path("_summary.json"))
    if out.figures:
        from .plotting import field_png, series_png

        series_png(series.rows, out.path("_series.png"),
                   tau_det=series.tau_det)
        field_png(w_last, out.path("_final_field.png"),
                  title=f"t = {rows[-1, 0]:g}")
    print(f"evolve: {len(run)} snapshots, tunnelling mask "
          f"{summary['n_mask_times']}/{len(run)}, "
          f"P(E>V0) drift {summary['p_above_drift']:.3e}")
    return 0


def _classical_battery(grid, rng, draws: int, e_per: int):
    import numpy as np

    from .classical import (classical_gaussian, classical_microcanonical,
                            classical_no_tunnel_certificate)
    from .spectral import (HarmonicPotential, RectangularBarrier,
                           TabulatedPotential)

    records = []
    worst_fn = -np.inf
    worst_min = np.inf
    for i in range(draws):
        mode = i % 3
        if mode == 0:
            potential = RectangularBarrier(float(rng.uniform(0.5, 3.0)),
                                           float(rng.uniform(0.5, 4.0)))
        elif mode == 1:
            potential = HarmonicPotential(float(rng.uniform(0.3, 1.5)))
        else:
            centers = rng.uniform(-6.0, 6.0, size=3)
            widths = rng.uniform(0.8, 2.0, size=3)
            heights = rng.uniform(0.2, 2.0, size=3)
            v = sum(h * np.exp(-0.5 * ((grid.x - c) / s) ** 2)
                    for c, s, h in zip(centers, widths, heights))
            potential = TabulatedPotential(tuple(float(q) for q in v))
        if i % 2 == 0:
            sx2 = float(rng.uniform(0.3, 1.5))
            sp2 = float(rng.uniform(0.3, 1.5))
            r = float(rng.uniform(-0.5, 0.5)) * np.sqrt(sx2 * sp2)
            state = classical_gaussian(
                grid,
                [float(rng.uniform(-4.0, 4.0)), float(rng.uniform(-1.5, 1.5))],
                [[sx2, r], [r, sp2]])
            state_kind = "gaussian"
        else:
            state = classical_microcanonical(grid, potential,
                                             float(rng.uniform(0.3, 2.5)))
            state_kind = "microcanonical"
        scale = max(float(potential.sup_v(grid)), 2.5)
        e_stars = rng.uniform(0.0, 1.25 * scale, size=e_per)
        result = classical_no_tunnel_certificate(state, potential, e_stars)
        worst_fn = max(worst_fn, result.worst_functional)
        worst_min = min(worst_min, result.worst_rate_op_min)
        records.append({"draw": i, "potential": potential.kind,
                        "state": state_kind, "passed": bool(result.passed),
                        "worst_functional": float(result.worst_functional),
                        "worst_rate_op_min": float(result.worst_rate_op_min)})
    return records, float(worst_fn), float(worst_min)


def _cmd_classical_check(cfg: ScenarioConfig, out: _Outputs) -> int:
    import numpy as np

    from .io import write_json

    grid = _build_grid(cfg)
    block = cfg.classical or {}
    draws = block.get("draws", 100)
    e_per = block.get("e_stars_per_draw", 3)
    rng = np.random.default_rng(cfg.seed)
    records, worst_fn, worst_min = _classical_battery(grid, rng, draws, e_per)
    passed = all(r["passed"] for r in records)
    write_json({"passed": passed, "n_draws": draws, "seed": cfg.seed,
                "worst_functional": worst_fn,
                "worst_rate_op_min": worst_min,
                "draws": records}, out.path("_report.json"))
    _write_csv(out.path("_draws.csv"),
               ["draw", "potential", "state", "passed",
                "worst_functional", "worst_rate_op_min"],
               [[r["draw"], r["potential"], r["state"], int(r["passed"]),
                 f"{r['worst_functional']:.17g}",
                 f"{r['worst_rate_op_min']:.17g}"] for r in records])
    if out.figures:
        from .plotting import battery_png

        battery_png([r["worst_functional"] for r in records], 1e-9,
                    out.path("_battery.png"), "worst functional")
    print(f"classical-check: {'pass' if passed else 'FAIL'} over {draws} "
          f"draws (worst functional {worst_fn:.3e}, "
          f"worst rate-op min {worst_min:.3e})")
    return 0 if passed else 2


def _cmd_purity(cfg: ScenarioConfig, out: _Outputs) -> int:
    from .io import write_json

    grid = _build_grid(cfg) if cfg.grid else None
    entries = []
    if cfg.postquantum and "gamma" in cfg.postquantum:
        import numpy as np

        from .postquantum import (GaussianMoments, gaussian_purity,
                                  gaussian_wigner, is_post_quantum,
                                  uncertainty_product)

        hbar = grid.hbar if grid is not None else 1.0
        moments = GaussianMoments(
            np.asarray(cfg.postquantum.get("mu", [0.0, 0.0]), dtype=float),
            np.asarray(cfg.postquantum["gamma"], dtype=float))
        entry = {"label": "gamma",
                 "purity": float(gaussian_purity(moments, hbar)),
                 "post_quantum": bool(is_post_quantum(moments, hbar)),
                 "uncertainty_product": float(uncertainty_product(moments))}
        if grid is not None:
            from .states import purity as field_purity

            entry["purity_on_grid"] = float(
                field_purity(gaussian_wigner(grid, moments)))
            entry["consistency_gap"] = abs(entry["purity"]
                                           - entry["purity_on_grid"])
        entries.append(entry)
    for idx, block in enumerate(cfg.states or []):
        if grid is None:
            raise ConfigError(
                f"{cfg.path}: state purities need a [grid] block")
        from .states import negativity_diagnostics
        from .states import purity as field_purity

        w = _state_wigner(_build_state(block, grid))
        neg_min, neg_vol = negativity_diagnostics(w)
        entries.append({"label": f"state_{idx}_{block['kind']}",
                        "purity": float(field_purity(w)),
                        "negativity_min": neg_min,
                        "negativity_volume": neg_vol})
    if not entries:
        raise ConfigError(
            f"{cfg.path}: purity needs a [postquantum] gamma or [state] "
            "blocks")
    write_json({"entries": entries}, out.path("_purity.json"))
    _write_csv(out.path("_purity.csv"), ["label", "purity"],
               [[e["label"], f"{e['purity']:.17g}"] for e in entries])
    for e in entries:
        print(f"purity: {e['label']} = {e['purity']:.6f}")
    return 0


def _cmd_postquantum(cfg: ScenarioConfig, out: _Outputs) -> int:
    import numpy as np

    from .io import write_json
    from .postquantum import (GaussianMoments, density_eigenvalues,
                              effect_pairings, gaussian_purity,
                              gaussian_wigner, is_post_quantum,
                              random_post_quantum, reconstruct_density_matrix,
                              uncertainty_product)

    block = cfg.postquantum
    if not block:
        raise ConfigError(
            f"{cfg.path}: postquantum needs a [postquantum] block")
    grid = _build_grid(cfg)
    hbar = grid.hbar
    report = {"seed": cfg.seed}
    if "gamma" in block:
        moments = GaussianMoments(
            np.asarray(block.get("mu", [0.0, 0.0]), dtype=float),
            np.asarray(block["gamma"], dtype=float))
        w = gaussian_wigner(grid, moments)
        rho = reconstruct_density_matrix(w)
        eig = density_eigenvalues(rho, grid)
        case = {
            "gamma": [[float(v) for v in row] for row in block["gamma"]],
            "mu": [float(v) for v in moments.mu],
            "purity": float(gaussian_purity(moments, hbar)),
            "post_quantum": bool(is_post_quantum(moments, hbar)),
            "uncertainty_product": float(uncertainty_product(moments)),
            "min_eigenvalue": float(eig.min()),
            "max_eigenvalue": float(eig.max()),
            "trace": float(eig.sum()),
            "hermiticity_defect": float(np.abs(rho - rho.conj().T).max()),
        }
        order = np.argsort(-np.abs(eig))
        _write_csv(out.path("_eigenvalues.csv"), ["eigenvalue"],
                   [[f"{v:.17g}"] for v in eig[order]])
        if out.figures:
            from .plotting import eigenvalue_png

            eigenvalue_png(eig, out.path("_eigenvalues.png"),
                           title=f"purity {case['purity']:.4f}")
        if cfg.potential and block.get("pair_e_stars"):
            from .effects import EnergyEffectAssembler, position_effect

            potential = _build_potential(cfg, grid)
            spectrum = _spectrum_for(cfg, grid, potential,
                                     (cfg.scan or {}).get("k_levels"))
            assembler = EnergyEffectAssembler(grid, spectrum)
            effects = []
            for e_star in block["pair_e_stars"]:
                effects.append(assembler.assemble(float(e_star)))
                effects.append(position_effect(grid, potential,
                                               float(e_star)))
            case["effect_pairings"] = [
                {"label": d.label, "e_star": float(d.e_star),
                 "value": float(d.value), "within_unit": bool(d.within_unit)}
                for d in effect_pairings(w, effects)]
        report["gamma_case"] = case
        print(f"postquantum: purity={case['purity']:.6f} "
              f"min_eigenvalue={case['min_eigenvalue']:.6e}")
    n_draws = block.get("draws", 0)
    if n_draws:
        rng = np.random.default_rng(cfg.seed)
        battery = []
        for _ in range(n_draws):
            m = random_post_quantum(rng, hbar)
            w_i = gaussian_wigner(grid, m)
            eig_i = density_eigenvalues(reconstruct_density_matrix(w_i), grid)
            battery.append({"purity": float(gaussian_purity(m, hbar)),
                            "min_eigenvalue": float(eig_i.min())})
        all_negative = bool(all(b["min_eigenvalue"] < 0.0 for b in battery))
        report["battery"] = {"n_draws": n_draws,
                             "all_negative": all_negative,
                             "draws": battery}
        print(f"postquantum: battery {n_draws} draws, "
              f"all_negative={all_negative}")
    if "gamma" not in block and not n_draws:
        raise ConfigError(
            f"{cfg.path}: [postquantum] needs 'gamma' and/or 'draws'")
    write_json(report, out.path("_report.json"))
    return 0


# -- the bundled verification battery ----------------------------------

def _check_barrier_equivalence(cfg: ScenarioConfig):
    """Five lowest levels of the reference barrier: the eigenstate route
    and the full scan must return the same verdict."""
    from .effects import EnergyEffectAssembler
    from .grid import make_grid
    from .spectral import (RectangularBarrier, discretize_hamiltonian,
                           eigendecompose)
    from .states import wigner_of_pure
    from .tunnelling import barrier_eigenstate_check, scan_tunnelling

    v0, length = 2.0, 1.0
    grid = make_grid(-16.0, 16.0, 512, n_p=1024)
    potential = RectangularBarrier(v0, length)
    spectrum = eigendecompose(discretize_hamiltonian(grid, potential))
    assembler = EnergyEffectAssembler(grid, spectrum)
    levels = []
    for n in range(5):
        e_n = float(spectrum.energies[n])
        psi = spectrum.eigenstate(n)
        direct = barrier_eigenstate_check(psi, e_n, v0, length)
        rep = scan_tunnelling(wigner_of_pure(psi), potential,
                              assembler=assembler)
        levels.append({"n": n, "energy": e_n, "direct": bool(direct),
                       "scan": bool(rep.verdict)})
    passed = all(lv["direct"] == lv["scan"] for lv in levels)
    return passed, {"v0": v0, "length": length, "levels": levels}


def _check_classical_certificate(cfg: ScenarioConfig):
    """Randomized classical states can never trip the functional."""
    import numpy as np

    from .grid import make_grid

    block = cfg.classical or {}
    draws = block.get("draws", 25)
    e_per = block.get("e_stars_per_draw", 3)
    grid = make_grid(-14.0, 14.0, 256, n_p=512)
    rng = np.random.default_rng([cfg.seed, 2])
    records, worst_fn, worst_min = _classical_battery(grid, rng, draws, e_per)
    passed = all(r["passed"] for r in records)
    return passed, {"n_draws": draws, "worst_functional": worst_fn,
                    "worst_rate_op_min": worst_min}


def _check_free_cdf(cfg: ScenarioConfig):
    """Closed-form free-packet P(E > E*) against direct quadrature of the
    momentum density."""
    import numpy as np
    from scipy.integrate import quad

    from .spectral import free_momentum_energy_cdf

    rng = np.random.default_rng([cfg.seed, 3])
    worst = 0.0
    for _ in range(20):
        p0 = float(rng.uniform(-2.0, 2.0))
        sigma_x = float(rng.uniform(0.3, 3.0))
        e_star = float(rng.uniform(0.0, 4.0))
        closed = free_momentum_energy_cdf(p0, sigma_x, e_star,
                                          mass=1.0, hbar=1.0)
        sigma_p = 0.5 / sigma_x
        def density(p):
            return (np.exp(-0.5 * ((p - p0) / sigma_p) ** 2)
                    / (np.sqrt(2.0 * np.pi) * sigma_p))
        q = np.sqrt(2.0 * e_star)
        inside, _ = quad(density, -q, q, epsabs=1e-13, epsrel=1e-13)
        worst = max(worst, abs(closed - (1.0 - inside)))
    return worst < 1e-6, {"n_triples": 20, "worst_error": worst}


def _check_harmonic_scan(cfg: ScenarioConfig):
    """Harmonic ground state: scan verdict, witness at the ground energy,
    functional = erfc(1) there, and the rate operator's closed form."""
    import numpy as np
    from scipy.special import erfc

    from .effects import tunnelling_rate_operator
    from .grid import make_grid
    from .spectral import (HarmonicPotential, discretize_hamiltonian,
                           eigendecompose)
    from .states import ho_eigenstate, wigner_of_pure
    from .tunnelling import scan_tunnelling, tunnelling_functional

    grid = make_grid(-1024.0 / 85.0, 1024.0 / 85.0, 1024, n_p=2048)
    potential = HarmonicPotential(1.0)
    spectrum = eigendecompose(discretize_hamiltonian(grid, potential), 64)
    w = wigner_of_pure(ho_eigenstate(grid, 0, 1.0))
    rep = scan_tunnelling(w, potential, spectrum)
    fn_half = tunnelling_functional(w, potential, 0.5, spectrum)
    target = float(erfc(1.0))

    rate = tunnelling_rate_operator(grid, potential, 0.5, "quantum", spectrum)
    xm, pm = grid.meshes()
    gauss = 2.0 * np.exp(-xm ** 2 - pm ** 2)
    closed = np.where(potential.values(grid)[:, None] > 0.5,
                      -gauss, 1.0 - gauss)
    rng = np.random.default_rng([cfg.seed, 4])
    ii = rng.integers(0, grid.n_x, size=1000)
    jj = rng.integers(0, grid.n_p, size=1000)
    sample_err = float(np.abs(rate.field.values[ii, jj]
                              - closed[ii, jj]).max())
    rate_min = float(rate.field.values.min())
    passed = (bool(rep.verdict)
              and rep.witness_e_star is not None
              and abs(rep.witness_e_star - 0.5) < 1e-3
              and abs(fn_half - target) < 1e-3
              and sample_err < 1e-3
              and rate_min < 0.0)
    return passed, {"verdict": bool(rep.verdict),
                    "witness_e_star": rep.witness_e_star,
                    "functional_at_half": float(fn_half),
                    "erfc_1": target,
                    "rate_op_sample_error": sample_err,
                    "rate_op_min": rate_min}


def _check_ho_overlaps(cfg: ScenarioConfig):
    """Pairwise products of oscillator-basis cross fields reproduce the
    operator traces."""
    from itertools import product

    from .grid import make_grid
    from .postquantum import eigenbasis_overlap
    from .states import ho_eigenstate

    grid = make_grid(-10.0, 10.0, 128, n_p=256)
    states = [ho_eigenstate(grid, n, 1.0) for n in range(5)]
    worst = 0.0
    for i1, j1, i2, j2 in product(range(5), repeat=4):
        value = eigenbasis_overlap(i1, j1, i2, j2, states)
        want = 1.0 if (i1 == i2 and j1 == j2) else 0.0
        worst = max(worst, abs(value - want))
    return worst < 1e-4, {"n_pairs": 625, "worst_error": worst}


_SUITE = [
    ("barrier_eigenstate_equivalence", _check_barrier_equivalence),
    ("classical_certificate", _check_classical_certificate),
    ("free_cdf_closed_form", _check_free_cdf),
    ("harmonic_ground_scan", _check_harmonic_scan),
    ("ho_overlap_orthogonality", _check_ho_overlaps),
]


def _cmd_appendix_suite(cfg: ScenarioConfig, out: _Outputs) -> int:
    from .io import write_json

    results = []
    for name, check in _SUITE:
        passed, details = check(cfg)
        results.append({"name": name, "passed": bool(passed), **details})
        print(f"{name}: {'pass' if passed else 'FAIL'}")
    ok = all(r["passed"] for r in results)
    write_json({"passed": ok, "seed": cfg.seed, "checks": results},
               out.path("_report.json"))
    _write_csv(out.path("_checks.csv"), ["check", "passed"],
               [[r["name"], int(r["passed"])] for r in results])
    if out.figures:
        from .plotting import suite_png

        suite_png([r["name"] for r in results],
                  [r["passed"] for r in results], out.path("_suite.png"))
    print(f"appendix-suite: {'pass' if ok else 'FAIL'}")
    return 0 if ok else 2


_COMMANDS = [
    ("wigner", _cmd_wigner,
     "phase-space field of a configured state (CSV, WIGF, JSON, PNG)"),
    ("tunnel-scan", _cmd_tunnel_scan,
     "E* sweep of the tunnelling functional"),
    ("reflect-scan", _cmd_reflect_scan,
     "E* sweep of the reflection functional, optionally per snapshot"),
    ("evolve", _cmd_evolve,
     "propagate a packet and track barrier probabilities"),
    ("classical-check", _cmd_classical_check,
     "randomized classical impossibility certificate"),
    ("purity", _cmd_purity,
     "closed-form and on-grid purities"),
    ("postquantum", _cmd_postquantum,
     "post-quantum Gaussian diagnostics and reconstruction"),
    ("appendix-suite", _cmd_appendix_suite,
     "run the bundled verification battery"),
]


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasetunnel",
        description="Phase-space tunnelling analysis from scenario configs.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="subcommand")
    for name, _, help_text in _COMMANDS:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="scenario config file (TOML or JSON)")
        p.add_argument("--out", default=None,
                       help="output directory (overrides [output] dir)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=None,
                       help="pin numeric thread pools (1 = bit-reproducible)")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handlers = {name: handler for name, handler, _ in _COMMANDS}
    try:
        if args.threads is not None:
            _pin_threads(args.threads)
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        out = _outputs(cfg, args.out, args.command)
        return handlers[args.command](cfg, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
