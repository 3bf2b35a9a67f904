import time

import numpy as np
from scipy.special import erfc

from phasetunnel.classical import ClassicalState, classical_gaussian, \
    classical_no_tunnel_certificate
from phasetunnel.grid import make_grid
from phasetunnel.spectral import HarmonicPotential, discretize_hamiltonian, \
    eigendecompose, free_potential, free_spectrum
from phasetunnel.states import gaussian_packet, ho_eigenstate, wigner_of_pure
from phasetunnel.tunnelling import reflection_functional, scan_reflection, \
    scan_tunnelling, tunnelling_functional

t0 = time.time()
grid = make_grid(-1024 / 85, 1024 / 85, 1024, n_p=2048)
pot = HarmonicPotential(1.0)
h = discretize_hamiltonian(grid, pot)
spec = eigendecompose(h, k=64)
print("spectrum:", time.time() - t0, "s; E0..E3:", spec.energies[:4])

psi0 = ho_eigenstate(grid, 0, 1.0)
w0 = wigner_of_pure(psi0)
t1 = time.time()
rep = scan_tunnelling(w0, pot, spec)
print("scan:", time.time() - t1, "s")
print("verdict:", rep.verdict, "witness:", rep.witness_e_star,
      "max:", rep.max_violation, "erfc(1):", erfc(1.0))
print("err:", rep.max_violation - erfc(1.0))
print("state neg:", rep.state_negativity, "rate neg:", rep.rate_op_negativity)

fn = tunnelling_functional(w0, pot, 0.5, spec)
print("functional(0.5) field route:", fn, "err:", fn - erfc(1.0))

cl = classical_gaussian(grid, (0.0, 0.0), np.diag([0.5, 0.5]))
rep_c = scan_tunnelling(cl, pot)
print("classical verdict:", rep_c.verdict, "max:", rep_c.max_violation)
cert = classical_no_tunnel_certificate(cl, pot, rep.e_star_grid)
print("certificate:", cert.passed, cert.worst_functional, cert.worst_rate_op_min)

# free-particle reflection: exact zero route
fgrid = make_grid(-16.0, 16.0, 512, n_p=1024)
fpot = free_potential()
fspec = free_spectrum(fgrid)
pk = gaussian_packet(fgrid, x0=0.0, p0=2.0, sigma_x=1.0)
wpk = wigner_of_pure(pk)
t2 = time.time()
rrep = scan_reflection(wpk, fpot, fspec)
print("reflection scan:", time.time() - t2, "s; verdict:", rrep.verdict,
      "max |fn|:", np.abs(rrep.functional_values).max())
rf = reflection_functional(wpk, fpot, 2.0, fspec)
print("reflection functional @2.0:", rf)
print("total:", time.time() - t0, "s")
