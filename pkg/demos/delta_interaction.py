"""Dirichlet spectrum of -y'' + alpha*delta(t - c)*y on [0, 1].

The delta potential enters only through its antiderivative, a step of height
alpha at c, so no smoothing is needed.  The eigenvalues are compared with the
roots of the scalar matching condition for the same problem.
"""

import numpy as np
from scipy.optimize import brentq

from quasidiff import (
    PiecewiseCoefficient,
    build_sturm_liouville,
    build_triplet,
    eigenfunction,
    eigenvalues_real_scan,
    preset,
)

alpha, c = 2.0, 0.5

# Q jumps by alpha at c, so Q' = alpha * delta(t - c)
Q = PiecewiseCoefficient.heaviside(c, 0, 1, alpha)
A = build_sturm_liouville(PiecewiseCoefficient.constant(1.0, 0, 1), Q)
T = build_triplet(2)
spec = preset("dirichlet", 2)

result = eigenvalues_real_scan(A, spec, T, (-40.0, 380.0))
print(f"{len(result)} eigenvalues in the window")


def characteristic(lam):
    k = np.sqrt(complex(lam))
    s = lambda x: x if abs(k) < 1e-12 else np.sin(k * x) / k
    return (s(1.0) + alpha * s(c) * s(1 - c)).real


grid = np.linspace(-40.0, 380.0, 20001)
vals = [characteristic(x) for x in grid]
roots = [brentq(characteristic, grid[i], grid[i + 1], xtol=1e-14)
         for i in range(len(grid) - 1) if vals[i] * vals[i + 1] < 0]

for ev, ref in zip(result.eigenvalues, roots):
    print(f"  lambda = {ev.lam.real:14.9f}   reference {ref:14.9f}   multiplicity {ev.multiplicity}")

# the first eigenfunction has a kink at c
y = eigenfunction(A, spec, T, result.values[0])
t = np.array([c - 1e-10, c + 1e-10])
d = y.derivative(t)[:, 0]
print(f"derivative jump at c: {(d[1] - d[0]).real:.6f}, alpha*y(c) = {(alpha * y(c)[0]).real:.6f}")
