"""Wave functions, mixtures and their Wigner quasi-probability fields.

The Wigner transform is computed per position row as a discrete Fourier
transform over the half-offset variable y,

    W(x, p) = (1/pi*hbar) * integral exp(2ipy/hbar) psi*(x+y) psi(x-y) dy,

with y running on the half-step lattice y_k = k*dx/2 so that the transform
is exactly periodic on the FFT-conjugate momentum grid.  psi(x +/- y) is
read off a band-limited (Fourier zero-padding) refinement of the state by
pure index arithmetic, zero outside the grid.  For states whose position
and momentum tails vanish at the grid edges, which the constructors here
enforce, the transform is exact up to aliasing.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, PhaseField, inner_product

__all__ = [
    "WaveFunction",
    "MixedState",
    "gaussian_packet",
    "ho_eigenstate",
    "wigner_of_pure",
    "wigner_of_mixture",
    "cross_wigner",
    "purity",
    "negativity_diagnostics",
]

# Mass outside the grid (position or momentum) above which a state
# constructor refuses to sample: aliasing would corrupt the transform.
TAIL_BUDGET = 1e-8

_IMAG_RESIDUE = 1e-10


@dataclass
class WaveFunction:
    """Pure state sampled at cell centers, sum |psi|^2 dx = 1."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_x,):
            raise ValueError("state length does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("state contains non-finite values")

    def norm_squared(self) -> float:
        return float((np.abs(self.values) ** 2).sum() * self.grid.dx)


@dataclass
class MixedState:
    """Convex mixture of pure states on a shared grid."""

    components: list  # of (weight, WaveFunction)

    def __post_init__(self):
        if not self.components:
            raise ValueError("mixture needs at least one component")
        weights = np.array([w for w, _ in self.components], dtype=float)
        if np.any(weights <= 0):
            raise ValueError("mixture weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"mixture weights sum to {weights.sum()!r}, not 1")
        grids = {id(psi.grid) for _, psi in self.components}
        if len(grids) > 1 and len({psi.grid for _, psi in self.components}) > 1:
            raise ValueError("mixture components live on different grids")

    @property
    def grid(self) -> GridSpec:
        return self.components[0][1].grid


def gaussian_packet(grid: GridSpec, x0: float, p0: float, sigma_x: float) -> WaveFunction:
    """Minimum-uncertainty packet centered at (x0, p0) with position width sigma_x.

    Raises ValueError when more than TAIL_BUDGET of the packet's mass falls
    outside the grid in either position or momentum; such a placement cannot
    be represented without aliasing.
    """
    from scipy.special import erfc

    if sigma_x <= 0:
        raise ValueError("sigma_x must be positive")
    sigma_p = grid.hbar / (2.0 * sigma_x)
    # analytic out-of-grid mass for the Gaussian marginals
    x_tail = 0.5 * (erfc((x0 - grid.x_min) / (np.sqrt(2) * sigma_x))
                    + erfc((grid.x_max - x0) / (np.sqrt(2) * sigma_x)))
    p_edge = np.pi * grid.hbar / grid.dx
    p_tail = 0.5 * (erfc((p0 + p_edge) / (np.sqrt(2) * sigma_p))
                    + erfc((p_edge - p0) / (np.sqrt(2) * sigma_p)))
    if x_tail > TAIL_BUDGET:
        raise ValueError(
            f"packet leaves {x_tail:.3e} of its mass outside [{grid.x_min}, {grid.x_max})")
    if p_tail > TAIL_BUDGET:
        raise ValueError(
            f"packet leaves {p_tail:.3e} of its momentum mass beyond the grid Nyquist")
    x = grid.x
    psi = ((2.0 * np.pi * sigma_x**2) ** -0.25
           * np.exp(-((x - x0) ** 2) / (4.0 * sigma_x**2))
           * np.exp(1j * p0 * x / grid.hbar))
    psi /= np.sqrt((np.abs(psi) ** 2).sum() * grid.dx)
    return WaveFunction(grid, psi)


def ho_eigenstate(grid: GridSpec, n: int, omega: float) -> WaveFunction:
    """n-th harmonic oscillator eigenstate for the grid's mass.

    Uses the normalized Hermite-function three-term recurrence; stable for
    any n the grid can actually hold.
    """
    if n < 0:
        raise ValueError("quantum number must be non-negative")
    if omega <= 0:
        raise ValueError("omega must be positive")
    scale = np.sqrt(grid.mass * omega / grid.hbar)
    xi = scale * grid.x
    h_prev = np.pi**-0.25 * np.exp(-0.5 * xi**2)
    h = h_prev
    for k in range(1, n + 1):
        h_next = np.sqrt(2.0 / k) * xi * h - np.sqrt((k - 1) / k) * h_prev
        h_prev, h = h, h_next
    psi = np.sqrt(scale) * h
    captured = (psi**2).sum() * grid.dx
    if abs(captured - 1.0) > TAIL_BUDGET * 10:
        raise ValueError(
            f"eigenstate n={n} is not contained by the grid (captured norm {captured:.9f})")
    psi = psi / np.sqrt(captured)
    return WaveFunction(grid, psi.astype(complex))


def _upsample(values: np.ndarray) -> np.ndarray:
    """Band-limited x2 refinement by Fourier zero padding.

    Exact on the original samples; the Nyquist bin is split symmetrically,
    which is the unique choice keeping real input real.
    """
    n = values.shape[0]
    half = n // 2
    spec = np.fft.fft(values, axis=0)
    padded = np.zeros((2 * n,) + values.shape[1:], dtype=complex)
    padded[:half] = spec[:half]
    padded[half] = 0.5 * spec[half]
    padded[-half] = 0.5 * spec[half]
    padded[-half + 1:] = spec[half + 1:]
    return 2.0 * np.fft.ifft(padded, axis=0)


def _correlation_transform(grid: GridSpec, fine_a: np.ndarray, fine_b: np.ndarray,
                           block: int = 256) -> np.ndarray:
    """Weyl field of |a><b| on the grid's momentum cells.

    Computes (1/pi*hbar) * sum_k exp(2i p y_k / hbar) a(x-y_k) b*(x+y_k) dx/2
    over the half-step offsets y_k = k*dx/2.  With n_p = 2*n_x the 2n lags
    map one-to-one onto the momentum cells and the transform is exact for
    any grid-supported state.  With n_p = n_x the phase factor has period n
    in k and the lags fold pairwise onto a length-n inverse DFT; the fold
    aliases coherences longer than half the box, so overlap identities then
    hold only for states without such coherence.
    """
    n = grid.n_x
    two_n = 2 * n
    t = np.arange(two_n)
    out = np.empty((n, grid.n_p), dtype=complex)
    for start in range(0, n, block):
        rows = np.arange(start, min(start + block, n))[:, None]
        ia = 2 * rows - (t[None, :] - n)
        ib = 2 * rows + (t[None, :] - n)
        valid = (ia >= 0) & (ia < two_n) & (ib >= 0) & (ib < two_n)
        corr = np.where(valid,
                        fine_a[np.clip(ia, 0, two_n - 1)]
                        * np.conj(fine_b[np.clip(ib, 0, two_n - 1)]),
                        0.0)
        if grid.n_p == two_n:
            rolled = np.roll(corr, -n, axis=1)
            out[rows[:, 0], :] = np.fft.fftshift(
                two_n * np.fft.ifft(rolled, axis=1), axes=1)
        else:
            folded = corr[:, :n] + corr[:, n:]
            out[rows[:, 0], :] = np.fft.fftshift(
                n * np.fft.ifft(folded, axis=1), axes=1)
    out *= grid.dx / (2.0 * np.pi * grid.hbar)
    return out


def cross_wigner(psi_a: WaveFunction, psi_b: WaveFunction) -> np.ndarray:
    """Complex Weyl field of the operator |psi_a><psi_b|.

    For psi_a = psi_b this reduces to the ordinary Wigner function.  The
    return value is a bare complex array on the grid of the inputs; it is a
    quasi-probability only on the diagonal.
    """
    if psi_a.grid is not psi_b.grid and psi_a.grid != psi_b.grid:
        raise ValueError("states live on different grids")
    return _correlation_transform(psi_a.grid, _upsample(psi_a.values),
                                  _upsample(psi_b.values))


def wigner_of_pure(psi: WaveFunction) -> PhaseField:
    """Wigner quasi-probability field of a pure state."""
    w = cross_wigner(psi, psi)
    scale = np.abs(w.real).max()
    residue = np.abs(w.imag).max()
    if scale > 0 and residue > _IMAG_RESIDUE * scale:
        raise ValueError(
            f"imaginary residue {residue:.3e} exceeds {_IMAG_RESIDUE:.0e} of field scale; "
            "state is not representable on this grid")
    return PhaseField(psi.grid, w.real)


def wigner_of_mixture(state: MixedState) -> PhaseField:
    """Convex combination of the component Wigner fields."""
    acc = None
    for weight, psi in state.components:
        w = wigner_of_pure(psi)
        acc = weight * w.values if acc is None else acc + weight * w.values
    return PhaseField(state.grid, acc)


def purity(w: PhaseField) -> float:
    """Tr rho^2 = 2*pi*hbar * integral W^2; 1 for pure states, < 1 for mixtures."""
    return 2.0 * np.pi * w.grid.hbar * inner_product(w, w)


def negativity_diagnostics(w: PhaseField) -> tuple:
    """(minimum value, integral of the negative part) of a field."""
    neg = np.clip(-w.values, 0.0, None)
    return float(w.values.min()), float(neg.sum() * w.grid.cell_area)
