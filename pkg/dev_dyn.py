import time
import numpy as np
from phasetunnel.grid import make_grid
from phasetunnel.states import gaussian_packet, wigner_of_pure, negativity_diagnostics
from phasetunnel.spectral import RectangularBarrier, discretize_hamiltonian, eigendecompose
from phasetunnel.dynamics import (split_step_evolve, crank_nicolson_evolve,
                                  validate_step_size, track_barrier_probabilities,
                                  energy_cdf_drift)

g = make_grid(-32.0, 32.0, 1024, n_p=2048)
bar = RectangularBarrier(2.0, 1.0)
psi0 = gaussian_packet(g, -6.0, 1.5, 1.0)
t0 = time.time()
spec = eigendecompose(discretize_hamiltonian(g, bar))
print(f"full eigh: {time.time()-t0:.2f}s  levels={spec.energies.size}  E0={spec.energies[0]:.4f}")
print(f"captured norm of psi0: {1-spec.captured_norm(psi0):.2e} missing")

err = validate_step_size(psi0, bar, 2e-3)
print(f"step-halving per-step error fft@2e-3: {err:.2e}")
err_dst = validate_step_size(psi0, bar, 2e-3, kinetic="dst")
print(f"step-halving per-step error dst@2e-3: {err_dst:.2e}")

estars = np.linspace(0.05, 4.0, 80)
for name, fn in [("fft@2e-3", lambda: split_step_evolve(psi0, bar, 2e-3, 4000)),
                 ("dst@2e-3", lambda: split_step_evolve(psi0, bar, 2e-3, 4000, kinetic="dst")),
                 ("cn @2e-3", lambda: crank_nicolson_evolve(psi0, bar, 2e-3, 4000))]:
    t0 = time.time()
    try:
        run = fn()
    except Exception as e:
        print(f"{name}: ABORT {e}")
        continue
    dt_run = time.time() - t0
    ser = track_barrier_probabilities(run, spec, 2.0, 1.0)
    pe = np.array([r[2] for r in ser.rows])
    drift = np.abs(pe - pe[0]).max()
    cdf_drift = energy_cdf_drift(run, spec, estars)
    pin = np.array([r[1] for r in ser.rows])
    print(f"{name}: {dt_run:5.1f}s  snaps={len(run)}  P_E0={pe[0]:.6f}  "
          f"driftPE={drift:.2e}  driftCDF={cdf_drift:.2e}  "
          f"mask={ser.mask.sum()}/{len(ser)}  Pin_t0={pin[0]:.1e}  Pin_max={pin.max():.4f}  "
          f"normdrift={np.abs(run.norms-1).max():.1e}")
