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
psi0 = gaussian_packet(g, -6.0, 1.0, 1.0)
spec = eigendecompose(discretize_hamiltonian(g, bar))

# retuned packet, T=10
for name, dt, nst, stride, kin in [("dst@1e-3", 1e-3, 10000, 40, "dst"),
                                   ("dst@5e-4", 5e-4, 20000, 100, "dst"),
                                   ("cn @2e-3", 2e-3, 5000, 20, None)]:
    t0 = time.time()
    try:
        if kin:
            run = split_step_evolve(psi0, bar, dt, nst, stride=stride, kinetic=kin)
        else:
            run = crank_nicolson_evolve(psi0, bar, dt, nst, stride=stride)
    except Exception as e:
        print(f"{name}: ABORT {e}")
        continue
    el = time.time() - t0
    ser = track_barrier_probabilities(run, spec, 2.0, 1.0)
    pe = np.array([r[2] for r in ser.rows]); pin = np.array([r[1] for r in ser.rows])
    drift = np.abs(pe - pe[0]).max()
    cdfd = energy_cdf_drift(run, spec, np.linspace(0.05, 4.0, 80))
    print(f"{name}: {el:5.1f}s snaps={len(run)} P_E={pe[0]:.5f} driftPE={drift:.2e} "
          f"driftCDF={cdfd:.2e} mask={ser.mask.sum()}/{len(ser)} Pin_t0={pin[0]:.1e} "
          f"Pin_max={pin.max():.4f} t_peak={run.times[pin.argmax()]:.2f}")
    if kin == "dst" and dt == 5e-4:
        keep = run
# transmitted mass at end, edge safety, negativity at t=0 / peak interaction
x = g.x
last = keep.frames[-1]
trans = float((np.abs(last.values[x >= 1.0])**2).sum() * g.dx)
print(f"transmitted (x>=l) at T=10: {trans:.4f}")
t0 = time.time()
w0 = wigner_of_pure(keep.frames[0])
neg0 = negativity_diagnostics(w0)
i_pk = int(np.argmin(np.abs(keep.times - 7.0)))
wpk = wigner_of_pure(keep.frames[i_pk])
negpk = negativity_diagnostics(wpk)
print(f"wigner: {time.time()-t0:.2f}s for 2 fields; neg t=0 {neg0} | t={keep.times[i_pk]:.1f} {negpk}")
