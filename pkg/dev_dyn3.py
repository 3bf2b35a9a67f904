import numpy as np
from phasetunnel.grid import make_grid
from phasetunnel.states import gaussian_packet, ho_eigenstate
from phasetunnel.spectral import (RectangularBarrier, HarmonicPotential, FreePotential,
                                  discretize_hamiltonian, eigendecompose)
from phasetunnel.dynamics import (split_step_evolve, crank_nicolson_evolve,
                                  track_barrier_probabilities, BoundaryLeakError)

# 1. fft drift floor dt-independence
g = make_grid(-32.0, 32.0, 1024, n_p=2048)
bar = RectangularBarrier(2.0, 1.0)
psi15 = gaussian_packet(g, -6.0, 1.5, 1.0)
spec = eigendecompose(discretize_hamiltonian(g, bar))
run = split_step_evolve(psi15, bar, 1e-3, 8000, stride=40)
ser = track_barrier_probabilities(run, spec, 2.0, 1.0)
pe = np.array([r[2] for r in ser.rows])
print(f"fft@1e-3 driftPE = {np.abs(pe-pe[0]).max():.2e}  (floor check vs 1.74e-4 @2e-3)")

# 2. spec's original scenario: [-20,21] box, p0=1.5, T=8 -> expect boundary abort
g0 = make_grid(-20.0, 21.0, 1024)
psi0 = gaussian_packet(g0, -6.0, 1.5, 1.0)
try:
    split_step_evolve(psi0, bar, 2e-3, 4000)
    print("original box: completed (unexpected)")
except BoundaryLeakError as e:
    print(f"original box: {e}")

# 3. free packet p0=0: <x> constancy
gf = make_grid(-16.0, 16.0, 512, n_p=1024)
pf = gaussian_packet(gf, 0.0, 0.0, 1.0)
rf = split_step_evolve(pf, FreePotential(), 2e-3, 2000)
xs = [float((np.abs(f.values)**2 * gf.x).sum() * gf.dx) for f in rf.frames]
print(f"free <x> drift over T=4: {max(abs(v - xs[0]) for v in xs):.2e}")

# 4. harmonic displaced ground, revival at 2pi
gh = make_grid(-16.0, 16.0, 512, n_p=1024)
hp = HarmonicPotential(1.0)
coh = gaussian_packet(gh, 2.0, 0.0, np.sqrt(0.5))
nst = int(round(2*np.pi/2e-3))
rh = split_step_evolve(coh, hp, 2*np.pi/nst, nst)
fid = abs((coh.values.conj() * rh.frames[-1].values).sum() * gh.dx)**2
print(f"harmonic revival fidelity 1-F = {1-fid:.2e}  (need < 1e-4)")

# 5. transmitted mass: strang fine vs CN coarse oracle +-5%  (p0=1.5 example)
run6 = split_step_evolve(psi15, bar, 2e-3, 3000)   # T=6
tr_f = float((np.abs(run6.frames[-1].values[g.x >= 1.0])**2).sum() * g.dx)
gc = make_grid(-32.0, 32.0, 512)
psic = gaussian_packet(gc, -6.0, 1.5, 1.0)
runc = crank_nicolson_evolve(psic, bar, 2e-3, 3000)
tr_c = float((np.abs(runc.frames[-1].values[gc.x >= 1.0])**2).sum() * gc.dx)
print(f"transmitted T=6: strang n=1024 {tr_f:.5f}  cn n=512 {tr_c:.5f}  rel {abs(tr_f-tr_c)/tr_f:.3f}")
