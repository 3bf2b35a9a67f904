"""Delimited, JSON and binary artifact emission.

All writers are deterministic: floats go out in shortest round-trip
form ("%.17g" for CSV, repr for JSON), keys are sorted, and nothing
records wall-clock time, so repeated runs with the same inputs produce
byte-identical files.

Binary field dumps carry a 32-byte header (magic "WIGF", version,
n_x, n_p, x_min, x_max, hbar) followed by the row-major float64 field;
the momentum axis and mass are reconstructed from grid conventions and
the sidecar JSON respectively.
"""

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .grid import GridSpec, PhaseField, make_grid
from .spectral import Potential, Spectrum

__all__ = [
    "write_json",
    "write_field_csv",
    "write_field_binary",
    "read_field_binary",
    "write_effect",
    "write_scan_csv",
    "report_to_dict",
    "write_series_csv",
    "spectrum_cache_key",
    "save_spectrum",
    "load_spectrum",
]

_HEADER = struct.Struct("<4sBxHH2xddf")   # 32 bytes
_MAGIC = b"WIGF"
_VERSION = 1


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def grid_to_dict(grid: GridSpec) -> dict:
    return {"x_min": grid.x_min, "x_max": grid.x_max, "n_x": grid.n_x,
            "n_p": grid.n_p, "hbar": grid.hbar, "mass": grid.mass}


def write_field_csv(field: PhaseField, path) -> None:
    """Rows of (x, p, w), x outer, matching the binary row-major order."""
    xm, pm = field.grid.meshes()
    table = np.column_stack(
        [xm.ravel(), pm.ravel(), field.values.ravel()])
    np.savetxt(path, table, fmt="%.17g", delimiter=",",
               header="x,p,w", comments="")


def write_field_binary(field: PhaseField, path) -> None:
    grid = field.grid
    header = _HEADER.pack(_MAGIC, _VERSION, grid.n_x, grid.n_p,
                          grid.x_min, grid.x_max, grid.hbar)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_field_binary(path, mass: float = 1.0) -> PhaseField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated field dump")
    magic, version, n_x, n_p, x_min, x_max, hbar = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError(f"{path}: not a WIGF dump")
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported WIGF version {version}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if values.size != n_x * n_p:
        raise ValueError(f"{path}: payload size does not match header")
    grid = make_grid(x_min, x_max, n_x, hbar=float(hbar), mass=mass, n_p=n_p)
    return PhaseField(grid, values.reshape(n_x, n_p).copy())


def write_effect(effect, base_path) -> None:
    """CSV + binary dumps of an effect field with a JSON sidecar."""
    base = Path(base_path)
    write_field_csv(effect.field, base.with_suffix(".csv"))
    write_field_binary(effect.field, base.with_suffix(".wigf"))
    write_json({"label": effect.label, "flavor": effect.flavor,
                "e_star": effect.e_star,
                "grid": grid_to_dict(effect.field.grid)},
               base.with_suffix(".json"))


def report_to_dict(report) -> dict:
    """JSON-ready view of a tunnelling/reflection scan report."""
    min_rate, neg_rate = (report.rate_op_negativity
                          if report.rate_op_negativity is not None
                          else (None, None))
    return {
        "label": report.label,
        "verdict": bool(report.verdict),
        "witness_e_star": report.witness_e_star,
        "max_violation": report.max_violation,
        "tau_det": report.tau_det,
        "n_e_star": int(len(report.e_star_grid)),
        "state_negativity_min": report.state_negativity[0],
        "state_negativity_volume": report.state_negativity[1],
        "rate_op_min": min_rate,
        "rate_op_negative_volume": neg_rate,
    }


def write_scan_csv(report, path) -> None:
    table = np.column_stack([report.e_star_grid, report.functional_values])
    np.savetxt(path, table, fmt="%.17g", delimiter=",",
               header="e_star,functional", comments="")


def write_series_csv(rows, wigner_mins, path) -> None:
    """Evolve series: (t, P_in_barrier, P_E_above_V0, norm, wigner_min)."""
    table = np.column_stack([np.asarray(rows, dtype=float),
                             np.asarray(wigner_mins, dtype=float)])
    np.savetxt(path, table, fmt="%.17g", delimiter=",",
               header="t,P_in_barrier,P_E_above_V0,norm,wigner_min",
               comments="")


def spectrum_cache_key(grid: GridSpec, potential: Potential) -> str:
    """Stable key over the exact grid and potential parameters."""
    payload = json.dumps([grid_to_dict(grid), potential.describe()],
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def save_spectrum(spectrum: Spectrum, cache_dir, key: str) -> Path:
    if spectrum.momentum_diagonal:
        raise ValueError("momentum-diagonal spectra are derived, not cached")
    cache = Path(cache_dir)
    cache.mkdir(parents=True, exist_ok=True)
    path = cache / f"spectrum-{key}.npz"
    np.savez(path, energies=spectrum.energies, vectors=spectrum.vectors,
             truncated=np.array(spectrum.truncated))
    return path


def load_spectrum(cache_dir, key: str, grid: GridSpec) -> Spectrum:
    path = Path(cache_dir) / f"spectrum-{key}.npz"
    if not path.exists():
        return None
    data = np.load(path)
    return Spectrum(grid, data["energies"], data["vectors"],
                    truncated=bool(data["truncated"]))
