"""Eigenvalues move off the real axis when K is a strict contraction.

For the free operator -y'' on [0, pi] the boundary condition is written as
(K - I) Gamma_1 y + i (K + I) Gamma_2 y = 0.  A unitary K gives a self-adjoint
extension (real spectrum); K = 0 with the plus sign gives a maximal
dissipative one, whose eigenvalues sit in the closed upper half-plane.  The
minus sign reflects everything into the lower half-plane.
"""

import numpy as np

from quasidiff import (
    ExtensionSpec,
    build_triplet,
    classify,
    eigenvalues_complex_box,
    free_matrix,
)

A = free_matrix(2, 0, np.pi)
T = build_triplet(2)

cases = {
    "rotation (unitary)": (np.array([[np.cos(0.4), -np.sin(0.4)], [np.sin(0.4), np.cos(0.4)]]), "plus"),
    "K = 0, plus": (np.zeros((2, 2)), "plus"),
    "K = 0, minus": (np.zeros((2, 2)), "minus"),
    "K = 0.5 I, plus": (0.5 * np.eye(2), "plus"),
}

for name, (K, sign) in cases.items():
    flags = classify(K)
    box = (-5.0, 40.0, -4.0, 4.0)
    res = eigenvalues_complex_box(A, ExtensionSpec(K, sign), T, box)
    print(f"{name}: unitary={flags.is_unitary}, contraction={flags.is_contraction}")
    for lam in res.values:
        print(f"    {lam.real:10.6f} {lam.imag:+10.6f}i")
