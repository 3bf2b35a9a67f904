import numpy as np
from phasetunnel.grid import make_grid, integrate_2d
from phasetunnel.states import gaussian_packet, ho_eigenstate, wigner_of_pure, purity
from phasetunnel.postquantum import (GaussianMoments, gaussian_purity, is_post_quantum,
                                     gaussian_wigner, random_post_quantum,
                                     reconstruct_density_matrix, density_eigenvalues,
                                     eigenbasis_overlap, uncertainty_product)

g = make_grid(-12.0, 12.0, 512, n_p=1024)

for d, want in [(0.5, 1.0), (0.25, 2.0), (1.0, 0.5)]:
    m = GaussianMoments([0, 0], np.diag([d, d]))
    mu = gaussian_purity(m)
    print(f"gamma=diag({d},{d}): purity={mu}  want {want}  pq={is_post_quantum(m)}")

# purity consistency vs grid field
m0 = GaussianMoments([0.3, -0.2], [[0.5, 0.1], [0.1, 0.4]])
w0 = gaussian_wigner(g, m0)
print(f"purity closed={gaussian_purity(m0):.6f} grid={purity(w0):.6f} "
      f"diff={abs(gaussian_purity(m0)-purity(w0)):.2e}  (tol 1e-3)")
print(f"uncertainty prod {uncertainty_product(m0):.6f}")

# reconstruction battery
for d, tag in [(0.25, "pq"), (0.5, "vacuum"), (2.0, "broad")]:
    w = gaussian_wigner(g, GaussianMoments([0, 0], np.diag([d, d])))
    rho = reconstruct_density_matrix(w)
    herm = np.abs(rho - rho.conj().T).max()
    tr = float(np.trace(rho).real * g.dx)
    ev = density_eigenvalues(rho, g)
    print(f"diag({d},{d}) [{tag}]: herm={herm:.2e} trace={tr:.8f} intW={integrate_2d(w):.8f} "
          f"min_eig={ev[0]:.6f} max_eig={ev[-1]:.6f}")

# HO ground rank-1 + round trip
psi0 = ho_eigenstate(g, 0, 1.0)
w_ho = wigner_of_pure(psi0)
rho = reconstruct_density_matrix(w_ho)
ev, vec = np.linalg.eigh(rho)
ev_op = ev * g.dx
print(f"HO ground: top eig={ev_op[-1]:.6f} |2nd|={max(abs(ev_op[0]), abs(ev_op[-2])):.2e}")
dom = vec[:, -1] / np.sqrt(g.dx)
fid = abs((dom.conj() * psi0.values).sum() * g.dx) ** 2
print(f"round-trip fidelity 1-F={1-fid:.2e}  (tol 1e-4)")

# packet round trip
pk = gaussian_packet(g, 1.0, 2.0, 0.8)
rho2 = reconstruct_density_matrix(wigner_of_pure(pk))
ev2, vec2 = np.linalg.eigh(rho2)
dom2 = vec2[:, -1] / np.sqrt(g.dx)
fid2 = abs((dom2.conj() * pk.values).sum() * g.dx) ** 2
print(f"packet round-trip 1-F={1-fid2:.2e}")

# eigenbasis overlaps
basis = [ho_eigenstate(g, n, 1.0) for n in range(5)]
for quad, want in [((0,0,0,0),1),((0,0,1,1),0),((0,1,0,1),1),((0,1,1,0),0),((2,3,2,3),1)]:
    v = eigenbasis_overlap(*quad, basis)
    print(f"overlap{quad} = {v:+.6f} want {want} err {abs(v-want):.1e}")

# 20 random post-quantum draws -> min eig < 0
rng = np.random.default_rng(42)
worst = []
for _ in range(20):
    m = random_post_quantum(rng)
    w = gaussian_wigner(g, m)
    ev = density_eigenvalues(reconstruct_density_matrix(w), g)
    worst.append(ev[0])
print(f"20 pq draws: min eig range [{min(worst):.4f}, {max(worst):.4f}]  all<0: {all(v<0 for v in worst)}")
