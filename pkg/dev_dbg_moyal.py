import numpy as np

from phasetunnel.grid import make_grid
from phasetunnel.spectral import FreePotential, HarmonicPotential, \
    discretize_hamiltonian, eigendecompose
from phasetunnel.states import gaussian_packet, ho_eigenstate, wigner_of_pure
from phasetunnel.effects import EnergyEffectAssembler

for n_p_factor in (1, 2):
    grid = make_grid(-16.0, 16.0, 256, n_p=256 * n_p_factor)
    pk = gaussian_packet(grid, x0=0.0, p0=2.0, sigma_x=1.0)
    wpk = wigner_of_pure(pk)
    tph = 2.0 * np.pi * grid.hbar
    print(f"=== n_p = {grid.n_p}")
    print("norm:", wpk.values.sum() * grid.cell_area,
          " purity:", tph * (wpk.values**2).sum() * grid.cell_area)
    # marginals
    xm = wpk.values.sum(axis=1) * grid.dp
    print("x-marginal err:", np.abs(xm - np.abs(pk.values) ** 2).max())
    pm = wpk.values.sum(axis=0) * grid.dx
    ft = grid.dx / np.sqrt(2 * np.pi * grid.hbar) * \
        np.exp(-1j * np.outer(grid.p, grid.x) / grid.hbar) @ pk.values
    print("p-marginal err:", np.abs(pm - np.abs(ft) ** 2).max())

    spec = eigendecompose(discretize_hamiltonian(grid, FreePotential()))
    c = spec.coefficients(pk)
    prob = np.abs(c) ** 2
    asm = EnergyEffectAssembler(grid, spec)
    o = np.array([tph * (asm.eigenstate_wigner(n) * wpk.values).sum() * grid.cell_area
                  for n in range(120)])
    print("box: max |o - |c|^2|:", np.abs(o - prob[:120]).max())
    w1 = asm.eigenstate_wigner(40)
    w2 = asm.eigenstate_wigner(42)
    print("box pair Moyal (40,40):", tph * (w1 * w1).sum() * grid.cell_area,
          " (40,42):", tph * (w1 * w2).sum() * grid.cell_area)
