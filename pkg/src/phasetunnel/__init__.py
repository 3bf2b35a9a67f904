"""Phase-space analysis of quantum tunnelling.

States become Wigner quasi-probability fields, measurements become
phase-space effects, and the tunnelling question becomes the sign of a
functional comparing the forbidden-region probability with the energy
tail.  Submodules cover the transform (states), effect assembly
(effects), the scan machinery (tunnelling), the classical control
(classical), propagation (dynamics) and the post-quantum Gaussian
extension (postquantum).

Attribute access is lazy so the command line can configure threading
before numpy loads; `import phasetunnel` alone touches nothing numeric.
"""

import importlib

__version__ = "0.1.0"

_EXPORTS = {
    "GridSpec": "grid",
    "PhaseField": "grid",
    "make_grid": "grid",
    "integrate_2d": "grid",
    "inner_product": "grid",
    "WaveFunction": "states",
    "MixedState": "states",
    "gaussian_packet": "states",
    "ho_eigenstate": "states",
    "wigner_of_pure": "states",
    "wigner_of_mixture": "states",
    "cross_wigner": "states",
    "purity": "states",
    "negativity_diagnostics": "states",
    "Potential": "spectral",
    "RectangularBarrier": "spectral",
    "HarmonicPotential": "spectral",
    "TabulatedPotential": "spectral",
    "free_potential": "spectral",
    "Spectrum": "spectral",
    "discretize_hamiltonian": "spectral",
    "eigendecompose": "spectral",
    "free_spectrum": "spectral",
    "energy_cdf": "spectral",
    "free_momentum_energy_cdf": "spectral",
    "position_region_prob": "spectral",
    "Effect": "effects",
    "EnergyEffectAssembler": "effects",
    "position_effect": "effects",
    "classical_energy_effect": "effects",
    "quantum_energy_effect": "effects",
    "energy_below_effect": "effects",
    "tunnelling_rate_operator": "effects",
    "momentum_band_effect": "effects",
    "TAU_DET": "tunnelling",
    "TunnellingReport": "tunnelling",
    "tunnelling_functional": "tunnelling",
    "reflection_functional": "tunnelling",
    "scan_tunnelling": "tunnelling",
    "scan_reflection": "tunnelling",
    "barrier_eigenstate_check": "tunnelling",
    "packet_tunnelling_criterion": "tunnelling",
    "ClassicalState": "classical",
    "classical_gaussian": "classical",
    "classical_microcanonical": "classical",
    "CertificateResult": "classical",
    "classical_no_tunnel_certificate": "classical",
    "PropagationRun": "dynamics",
    "TrackedSeries": "dynamics",
    "BoundaryLeakError": "dynamics",
    "split_step_evolve": "dynamics",
    "crank_nicolson_evolve": "dynamics",
    "validate_step_size": "dynamics",
    "track_barrier_probabilities": "dynamics",
    "energy_cdf_drift": "dynamics",
    "GaussianMoments": "postquantum",
    "gaussian_purity": "postquantum",
    "is_post_quantum": "postquantum",
    "uncertainty_product": "postquantum",
    "gaussian_wigner": "postquantum",
    "random_post_quantum": "postquantum",
    "reconstruct_density_matrix": "postquantum",
    "density_eigenvalues": "postquantum",
    "eigenbasis_overlap": "postquantum",
    "PairingDiagnostic": "postquantum",
    "effect_pairings": "postquantum",
    "ConfigError": "config",
    "ScenarioConfig": "config",
    "load_config": "config",
}

_MODULES = {"grid", "states", "spectral", "effects", "tunnelling",
            "classical", "dynamics", "postquantum", "io", "config",
            "plotting", "cli"}

__all__ = sorted(_EXPORTS) + ["__version__"]


def __getattr__(name):
    if name in _EXPORTS:
        module = importlib.import_module(f".{_EXPORTS[name]}", __name__)
        value = getattr(module, name)
        globals()[name] = value
        return value
    if name in _MODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(__all__) | _MODULES | set(globals()))
