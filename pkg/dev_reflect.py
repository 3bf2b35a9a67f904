import time

import numpy as np

from phasetunnel.dynamics import split_step_evolve
from phasetunnel.effects import EnergyEffectAssembler
from phasetunnel.grid import make_grid
from phasetunnel.spectral import RectangularBarrier, discretize_hamiltonian, eigendecompose
from phasetunnel.states import gaussian_packet, wigner_of_pure
from phasetunnel.tunnelling import scan_reflection

t0 = time.perf_counter()
grid = make_grid(-28.0, 28.0, 256, n_p=512)
potential = RectangularBarrier(1.5, 1.0)
psi = gaussian_packet(grid, -7.0, 2.55, 3.5)
print(f"setup {time.perf_counter() - t0:.2f}s", flush=True)

t0 = time.perf_counter()
run = split_step_evolve(psi, potential, 1e-3, 3400, stride=200, kinetic="dst")
print(f"evolve {time.perf_counter() - t0:.2f}s  frames={len(run)}", flush=True)

t0 = time.perf_counter()
spectrum = eigendecompose(discretize_hamiltonian(grid, potential))
assembler = EnergyEffectAssembler(grid, spectrum)
print(f"spectrum {time.perf_counter() - t0:.2f}s", flush=True)

for t, frame in zip(run.times, run.frames):
    t1 = time.perf_counter()
    w = wigner_of_pure(frame)
    report = scan_reflection(w, potential, assembler=assembler)
    print(
        f"t={t:5.2f}  max_violation={report.max_violation:.3e}  "
        f"verdict={report.verdict}  witness={report.witness_e_star}  "
        f"n_e={len(report.e_star_grid)}  {time.perf_counter() - t1:.2f}s",
        flush=True,
    )
