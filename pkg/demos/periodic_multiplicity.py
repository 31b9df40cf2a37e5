"""Quasi-periodic conditions y(pi) = e^{i theta} y(0), y'(pi) = e^{i theta} y'(0).

With theta = 0 the free operator on [0, pi] has the periodic eigenvalues
(2n)^2, each nonzero one double: cos(2nt) and sin(2nt).  A generic theta
splits the pairs.  The scan reports multiplicities from the number of
vanishing singular values of the characteristic matrix.
"""

import numpy as np

from quasidiff import build_triplet, eigenfunctions, eigenvalues_real_scan, free_matrix, quasi_periodic

A = free_matrix(2, 0, np.pi)
T = build_triplet(2)

for theta in (0.0, 0.3 * np.pi):
    spec = quasi_periodic(theta, T)
    res = eigenvalues_real_scan(A, spec, T, (-0.5, 40.0))
    print(f"theta = {theta:.4f}")
    for ev in res.eigenvalues:
        exact = ""
        if theta == 0.0:
            n = round(np.sqrt(abs(ev.lam.real)) / 2)
            exact = f"   exact {(2 * n) ** 2}"
        print(f"    {ev.lam.real:12.8f}  multiplicity {ev.multiplicity}{exact}")

# an orthonormal basis of the eigenspace at 4
ys = eigenfunctions(A, quasi_periodic(0.0, T), T, 4.0)
t = np.linspace(0, np.pi, 5)
for y in ys:
    print(np.round(y(t)[:, 0].real, 6))
