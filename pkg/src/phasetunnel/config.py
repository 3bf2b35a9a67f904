"""Scenario config loading and validation.

The primary encoding is TOML (key/value with nested blocks); JSON is
accepted as an alternative by file extension.  The whole file is
checked against the known schema before any numerics run: unknown keys
are rejected with the line they appear on, types are enforced, and
kind-dependent required parameters are spelled out per kind.

This module stays stdlib-only so the CLI can validate configs and set
threading environment variables before numpy is ever imported.
"""

import json
import re
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:          # Python < 3.11
    import tomli as tomllib

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "validate_config"]


class ConfigError(Exception):
    """Config rejected before computation; message carries file:line."""


_GRID_KEYS = {"x_min": "float", "x_max": "float", "n_x": "int",
              "n_p": "int", "hbar": "float", "mass": "float"}
_POTENTIAL_KINDS = {
    "rectangular_barrier": {"v0": "float", "length": "float"},
    "harmonic": {"omega": "float"},
    "free": {},
    "tabulated": {"table_path": "str"},
}
_STATE_KINDS = {
    "gaussian": {"x0": "float", "p0": "float", "sigma_x": "float"},
    "ho_eigenstate": {"n": "int", "omega": "float"},
    "mixture": {"components": "list"},
}
_SCAN_KEYS = {"tau_det": "float", "e_stars": "list", "k_levels": "int",
              "capture_budget": "float", "kind": "str"}
_EVOLVE_KEYS = {"dt": "float", "n_steps": "int", "stride": "int",
                "kinetic": "str", "propagator": "str",
                "track_v0": "float", "track_length": "float"}
_CLASSICAL_KEYS = {"draws": "int", "e_stars_per_draw": "int"}
_POSTQUANTUM_KEYS = {"gamma": "list", "mu": "list", "draws": "int",
                     "pair_e_stars": "list"}
_OUTPUT_KEYS = {"dir": "str", "stem": "str", "cache_dir": "str",
                "figures": "bool"}
_TOP_LEVEL = {"grid", "potential", "state", "states", "scan", "evolve",
              "classical", "postquantum", "output", "seed"}


@dataclass
class ScenarioConfig:
    """Validated blocks, still as plain dicts; objects are built later."""

    path: str
    grid: dict = None
    potential: dict = None
    states: list = None
    scan: dict = None
    evolve: dict = None
    classical: dict = None
    postquantum: dict = None
    output: dict = None
    seed: int = 0


def _find_line(text: str, key: str) -> int:
    """Best-effort line of a key assignment for error messages."""
    pattern = re.compile(
        r'^\s*(?:"{0}"|\'{0}\'|{0})\s*[=:]'.format(re.escape(key)))
    for lineno, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return lineno
    return 0


def _err(path: str, text: str, key: str, message: str) -> ConfigError:
    line = _find_line(text, key)
    where = f"{path}:{line}" if line else path
    return ConfigError(f"{where}: {message}")


def _type_ok(value, expected: str) -> bool:
    if expected == "float":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if expected == "str":
        return isinstance(value, str)
    if expected == "bool":
        return isinstance(value, bool)
    if expected == "list":
        return isinstance(value, list)
    if expected == "table":
        return isinstance(value, dict)
    raise AssertionError(expected)


def _check_block(block: dict, schema: dict, name: str,
                 path: str, text: str) -> None:
    if not isinstance(block, dict):
        raise _err(path, text, name, f"[{name}] must be a table")
    for key, value in block.items():
        if key not in schema:
            raise _err(path, text, key, f"unknown key '{key}' in [{name}]")
        if not _type_ok(value, schema[key]):
            raise _err(path, text, key,
                       f"'{name}.{key}' must be of type {schema[key]}")


def _check_kinded(block: dict, kinds: dict, name: str,
                  path: str, text: str, extra: dict = None) -> None:
    if not isinstance(block, dict):
        raise _err(path, text, name, f"[{name}] must be a table")
    kind = block.get("kind")
    if kind is None:
        raise _err(path, text, name, f"[{name}] is missing 'kind'")
    if kind not in kinds:
        raise _err(path, text, "kind",
                   f"unknown {name} kind '{kind}' "
                   f"(expected one of {sorted(kinds)})")
    allowed = dict(kinds[kind])
    allowed["kind"] = "str"
    allowed.update(extra or {})
    _check_block(block, allowed, name, path, text)
    for key in kinds[kind]:
        if key not in block:
            raise _err(path, text, "kind",
                       f"{name} kind '{kind}' requires '{key}'")


def _check_state(block: dict, name: str, path: str, text: str) -> None:
    _check_kinded(block, _STATE_KINDS, name, path, text,
                  extra={"weight": "float"})
    if block.get("kind") == "mixture":
        components = block["components"]
        if not components:
            raise _err(path, text, "components",
                       "mixture needs at least one component")
        for comp in components:
            if not isinstance(comp, dict):
                raise _err(path, text, "components",
                           "mixture components must be tables")
            if comp.get("kind") == "mixture":
                raise _err(path, text, "kind",
                           "mixtures do not nest")
            _check_state(comp, f"{name}.components", path, text)
            if "weight" not in comp:
                raise _err(path, text, "components",
                           "each mixture component needs a 'weight'")


def validate_config(raw: dict, text: str, path: str) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a table")
    for key in raw:
        if key not in _TOP_LEVEL:
            raise _err(path, text, key, f"unknown top-level key '{key}'")
    if "state" in raw and "states" in raw:
        raise _err(path, text, "states",
                   "use either [state] or [[states]], not both")

    cfg = ScenarioConfig(path=path)
    if "grid" in raw:
        _check_block(raw["grid"], _GRID_KEYS, "grid", path, text)
        for key in ("x_min", "x_max", "n_x"):
            if key not in raw["grid"]:
                raise _err(path, text, "grid", f"[grid] is missing '{key}'")
        cfg.grid = raw["grid"]
    if "potential" in raw:
        _check_kinded(raw["potential"], _POTENTIAL_KINDS, "potential",
                      path, text)
        cfg.potential = raw["potential"]
    states = []
    if "state" in raw:
        _check_state(raw["state"], "state", path, text)
        states = [raw["state"]]
    elif "states" in raw:
        if not isinstance(raw["states"], list) or not raw["states"]:
            raise _err(path, text, "states",
                       "[[states]] must be a non-empty array of tables")
        for entry in raw["states"]:
            _check_state(entry, "states", path, text)
        states = list(raw["states"])
    cfg.states = states
    if "scan" in raw:
        _check_block(raw["scan"], _SCAN_KEYS, "scan", path, text)
        for v in raw["scan"].get("e_stars", []):
            if not _type_ok(v, "float"):
                raise _err(path, text, "e_stars",
                           "'scan.e_stars' must hold numbers")
        cfg.scan = raw["scan"]
    if "evolve" in raw:
        _check_block(raw["evolve"], _EVOLVE_KEYS, "evolve", path, text)
        for key in ("dt", "n_steps"):
            if key not in raw["evolve"]:
                raise _err(path, text, "evolve",
                           f"[evolve] is missing '{key}'")
        cfg.evolve = raw["evolve"]
    if "classical" in raw:
        _check_block(raw["classical"], _CLASSICAL_KEYS, "classical",
                     path, text)
        cfg.classical = raw["classical"]
    if "postquantum" in raw:
        _check_block(raw["postquantum"], _POSTQUANTUM_KEYS, "postquantum",
                     path, text)
        gamma = raw["postquantum"].get("gamma")
        if gamma is not None:
            rows_ok = (isinstance(gamma, list) and len(gamma) == 2
                       and all(isinstance(r, list) and len(r) == 2
                               and all(_type_ok(v, "float") for v in r)
                               for r in gamma))
            if not rows_ok:
                raise _err(path, text, "gamma",
                           "'postquantum.gamma' must be a 2x2 number matrix")
        cfg.postquantum = raw["postquantum"]
    if "output" in raw:
        _check_block(raw["output"], _OUTPUT_KEYS, "output", path, text)
        cfg.output = raw["output"]
    if "seed" in raw:
        if not _type_ok(raw["seed"], "int"):
            raise _err(path, text, "seed", "'seed' must be an integer")
        cfg.seed = raw["seed"]
    return cfg


def load_config(path) -> ScenarioConfig:
    path = str(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    if path.endswith(".json"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    else:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    return validate_config(raw, text, path)
