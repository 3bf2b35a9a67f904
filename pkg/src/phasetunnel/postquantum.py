"""Gaussian moment calculus and the post-quantum extension.

A Gaussian phase-space distribution is post-quantum when its purity
2*pi*hbar * int W^2 = hbar / (2 sqrt(det gamma)) exceeds one, i.e. when
it is narrower than the vacuum in the det-gamma sense.  Such fields are
perfectly good distributions but correspond to no quantum state; the
reconstruction below makes that concrete by exposing the negative
eigenvalues of the operator kernel they map back to.

Reconstruction inverts the correlation transform on its own grid: with
n_p = 2 n_x every separation x - x' maps to a distinct momentum cell,
so one inverse FFT per anti-diagonal of the kernel is exact.  The
folded n_p = n_x transform is not injective, so there is nothing to
invert there and the doubled grid is required.

Effect pairings with post-quantum fields may leave [0, 1]; they are
reported with a flag, never clipped, since the restricted effect space
that would tame them is out of scope here.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, PhaseField, inner_product
from .states import TAIL_BUDGET, _upsample

__all__ = [
    "GaussianMoments",
    "PairingDiagnostic",
    "gaussian_purity",
    "is_post_quantum",
    "uncertainty_product",
    "gaussian_wigner",
    "random_post_quantum",
    "reconstruct_density_matrix",
    "density_eigenvalues",
    "eigenbasis_overlap",
    "effect_pairings",
]

_PQ_MARGIN = 1e-12       # purity excess needed to call a field post-quantum
_UNIT_SLACK = 1e-12      # tolerance around [0, 1] for pairing flags


@dataclass
class GaussianMoments:
    """First and second moments (mu = (x, p) means, gamma = covariance)."""

    mu: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=float)
        if self.mu.shape != (2,) or self.gamma.shape != (2, 2):
            raise ValueError("mu must be length 2 and gamma 2x2")
        scale = max(1.0, float(np.abs(self.gamma).max()))
        if abs(self.gamma[0, 1] - self.gamma[1, 0]) > 1e-12 * scale:
            raise ValueError("gamma must be symmetric")
        if np.linalg.eigvalsh(self.gamma).min() <= 0.0:
            raise ValueError("gamma must be positive-definite")


def gaussian_purity(moments: GaussianMoments, hbar: float = 1.0) -> float:
    """2*pi*hbar * int W_G^2 = hbar / (2 sqrt(det gamma))."""
    return hbar / (2.0 * np.sqrt(np.linalg.det(moments.gamma)))


def is_post_quantum(moments: GaussianMoments, hbar: float = 1.0) -> bool:
    """True iff the Gaussian purity exceeds 1, i.e. sqrt(det gamma) < hbar/2."""
    return bool(gaussian_purity(moments, hbar) > 1.0 + _PQ_MARGIN)


def uncertainty_product(moments: GaussianMoments) -> float:
    """sigma_x * sigma_p; equals hbar/(2 mu) when gamma_xp = 0."""
    return float(np.sqrt(moments.gamma[0, 0] * moments.gamma[1, 1]))


def gaussian_wigner(grid: GridSpec, moments: GaussianMoments) -> PhaseField:
    """Normal distribution over phase space sampled at the grid cells.

    Raises ValueError when more than TAIL_BUDGET of the mass falls
    outside the grid along either marginal, like gaussian_packet does.
    """
    from scipy.special import erfc

    for mean, var, lo, hi in [
            (moments.mu[0], moments.gamma[0, 0], grid.x[0], grid.x[-1]),
            (moments.mu[1], moments.gamma[1, 1], grid.p[0], grid.p[-1])]:
        sigma = np.sqrt(var)
        tail = 0.5 * (erfc((mean - lo) / (np.sqrt(2.0) * sigma))
                      + erfc((hi - mean) / (np.sqrt(2.0) * sigma)))
        if tail > TAIL_BUDGET:
            raise ValueError(
                f"gaussian leaves {tail:.3e} of its mass outside the grid")
    inv = np.linalg.inv(moments.gamma)
    norm = 1.0 / (2.0 * np.pi * np.sqrt(np.linalg.det(moments.gamma)))
    xm, pm = grid.meshes()
    dx = xm - moments.mu[0]
    dp = pm - moments.mu[1]
    quad = inv[0, 0] * dx * dx + 2.0 * inv[0, 1] * dx * dp + inv[1, 1] * dp * dp
    return PhaseField(grid, norm * np.exp(-0.5 * quad))


def random_post_quantum(rng: np.random.Generator,
                        hbar: float = 1.0) -> GaussianMoments:
    """Random moments with sqrt(det gamma) < hbar/2 (purity > 1)."""
    root = 0.5 * hbar * rng.uniform(0.3, 0.9)
    aspect = np.exp(rng.uniform(-0.6, 0.6))
    theta = rng.uniform(0.0, np.pi)
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    gamma = rot @ np.diag([root * aspect, root / aspect]) @ rot.T
    mu = rng.uniform(-0.5, 0.5, size=2)
    return GaussianMoments(mu, gamma)


def reconstruct_density_matrix(w: PhaseField) -> np.ndarray:
    """Kernel rho(x, x') = int W((x+x')/2, p) exp(ip(x-x')/hbar) dp.

    Midpoints (x+x')/2 fall on half-cells, supplied by band-limited row
    refinement; along each anti-diagonal x+x' = const the p-integral is
    one inverse FFT, with x-x' = (i-j) dx landing bijectively on the
    doubled grid's momentum cells.  Real input makes the result
    Hermitian by construction.  Trace (sum of the diagonal times dx)
    reproduces the field integral exactly because refinement preserves
    the original rows.
    """
    grid = w.grid
    n = grid.n_x
    if grid.n_p != 2 * n:
        raise ValueError(
            "reconstruction requires the doubled momentum grid (n_p = 2 n_x); "
            "the folded transform is not injective")
    fine_rows = _upsample(w.values).real          # (2n, n_p), rows at dx/2
    kernel = np.fft.ifft(fine_rows, axis=1) * (grid.dp * grid.n_p)
    rho = np.empty((n, n), dtype=complex)
    for s in range(2 * n - 1):
        i = np.arange(max(0, s - n + 1), min(n, s + 1))
        sign = -1.0 if s % 2 else 1.0             # (-1)^(i-j), i-j = s mod 2
        rho[i, s - i] = sign * kernel[s, (2 * i - s) % grid.n_p]
    return rho


def density_eigenvalues(rho: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Operator eigenvalues (ascending) of a kernel over the x grid."""
    return np.linalg.eigvalsh(rho) * grid.dx


def eigenbasis_overlap(i1: int, j1: int, i2: int, j2: int,
                       eigenstates) -> float:
    """2*pi*hbar * int F_{i1 j1} conj(F_{i2 j2}) over phase space.

    Equals the trace of |w_i1><w_j1| (|w_i2><w_j2|)^dag, i.e.
    delta_{i1 i2} delta_{j1 j2} for orthonormal states.
    """
    from .states import cross_wigner

    for idx in (i1, j1, i2, j2):
        if idx < 0 or idx >= len(eigenstates):
            raise IndexError(f"eigenstate index {idx} out of range")
    grid = eigenstates[0].grid
    f_a = cross_wigner(eigenstates[i1], eigenstates[j1])
    f_b = cross_wigner(eigenstates[i2], eigenstates[j2])
    total = (f_a * f_b.conj()).sum() * grid.cell_area
    return float(2.0 * np.pi * grid.hbar * total.real)


@dataclass
class PairingDiagnostic:
    """One effect paired with a field; value kept verbatim, only flagged."""

    label: str
    e_star: float
    value: float
    within_unit: bool


def effect_pairings(w: PhaseField, effects) -> list:
    """Pair each effect with the field and flag values outside [0, 1]."""
    out = []
    for eff in effects:
        value = inner_product(eff.field, w)
        inside = -_UNIT_SLACK <= value <= 1.0 + _UNIT_SLACK
        out.append(PairingDiagnostic(eff.label, eff.e_star, value, inside))
    return out
