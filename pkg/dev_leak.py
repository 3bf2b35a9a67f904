import numpy as np
from scipy.fft import dst, idst

from phasetunnel.grid import make_grid
from phasetunnel.spectral import RectangularBarrier
from phasetunnel.states import gaussian_packet

grid = make_grid(-28.0, 28.0, 512, n_p=1024)
potential = RectangularBarrier(1.5, 1.0)
psi = gaussian_packet(grid, -7.0, 2.55, 3.5)

v = potential.values(grid)
dt = 1e-3
x = grid.x
inner = slice(1, None)  # DST-I over interior nodes; x[0] is the wall-adjacent cell
n_edge = max(4, grid.n_x // 20)
print(f"n_edge={n_edge} zone_left=[{x[0]:.2f},{x[n_edge-1]:.2f}] zone_right=[{x[-n_edge]:.2f},{x[-1]:.2f}]")

# mirror the package stepper: half V kick, full kinetic via DST-I eigenvalues
k_modes = np.arange(1, grid.n_x + 1)
# match dynamics.py: FD Dirichlet kinetic eigenvalues for DST-I basis
lam = (grid.hbar**2 / (grid.mass * grid.dx**2)) * (1.0 - np.cos(np.pi * k_modes / (grid.n_x + 1)))
half_v = np.exp(-0.5j * dt * v / grid.hbar)
kin = np.exp(-1j * dt * lam / grid.hbar)

u = psi.values.copy()
for step in range(1, 4001):
    u = half_v * u
    coeff = dst(u, type=1)
    u = idst(kin * coeff, type=1)
    u = half_v * u
    if step % 200 == 0:
        rho = np.abs(u) ** 2
        left = rho[:n_edge].sum() * grid.dx
        right = rho[-n_edge:].sum() * grid.dx
        print(f"t={step*dt:5.2f}  left={left:.3e}  right={right:.3e}")
