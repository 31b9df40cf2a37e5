"""Boundary triplet maps as constant matrices on endpoint data.

A boundary data vector of a function ``y`` has length ``2m``::

    bv = (D[0]y(a), ..., D[m-1]y(a), D[0]y(b), ..., D[m-1]y(b))

and ``Gamma_1 y = G1 @ bv``, ``Gamma_2 y = G2 @ bv``.  The sesquilinear form
``(Gamma_1 y, Gamma_2 z) - (Gamma_2 y, Gamma_1 z)`` equals ``<l y, z> - <y,
l z>`` for a formally self-adjoint expression; it is ``i**m`` times the
bracket returned by :func:`lagrange_form`.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import legendre as npleg

from .coefficients import Piece, PiecewiseCoefficient
from .errors import (
    ConstraintError,
    ParameterError,
    RealizationError,
    TripletSingularityError,
)
from .ode import DEFAULT_ATOL, DEFAULT_RTOL, solve_cauchy
from .quadrature import integrate_doubling, panel_quadrature  # noqa: F401
from .shinzettl import ipow

# -- Gaussian rationals -----------------------------------------------------


class GaussianRational:
    """Exact ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def of(cls, z):
        if isinstance(z, GaussianRational):
            return z
        z = complex(z)
        return cls(Fraction(z.real), Fraction(z.imag))

    def conj(self):
        return GaussianRational(self.re, -self.im)

    def __add__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re
        )

    def __eq__(self, other):
        other = GaussianRational.of(other)
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def default_odd_coefficients(n):
    """``(alpha, beta, gamma, delta)`` for ``m = 2n + 1``, exact."""
    s = 1 if n % 2 == 0 else -1
    half = Fraction(1, 2)
    return (
        GaussianRational(1),
        GaussianRational(1),
        GaussianRational(s * half, 1),
        GaussianRational(-s * half, 1),
    )


def odd_coefficient_relations(alpha, beta, gamma, delta, n):
    """Evaluate the five admissibility relations exactly.

    Returns a dict mapping relation name to ``True``/``False``.
    """
    al, be, ga, de = (GaussianRational.of(x) for x in (alpha, beta, gamma, delta))
    sign = 1 if n % 2 == 0 else -1
    return {
        "alpha*conj(gamma) + conj(alpha)*gamma = (-1)^n": al * ga.conj() + al.conj() * ga == sign,
        "beta*conj(delta) + conj(beta)*delta = (-1)^(n+1)": be * de.conj() + be.conj() * de == -sign,
        "alpha*conj(delta) + conj(beta)*gamma = 0": al * de.conj() + be.conj() * ga == 0,
        "beta*conj(gamma) + conj(alpha)*delta = 0": be * ga.conj() + al.conj() * de == 0,
        "alpha*delta - beta*gamma != 0": not (al * de - be * ga == 0),
    }


# -- triplet ----------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryTripletMaps:
    """``G1``, ``G2`` (each ``m x 2m``) plus the odd-order coefficients."""

    m: int
    G1: np.ndarray = field(repr=False)
    G2: np.ndarray = field(repr=False)
    odd_coeffs: tuple = None

    @property
    def stacked(self):
        return np.vstack([self.G1, self.G2])

    @property
    def condition_number(self):
        return float(np.linalg.cond(self.stacked))

    def gamma1(self, bv):
        return self.G1 @ np.asarray(bv)

    def gamma2(self, bv):
        return self.G2 @ np.asarray(bv)

    def to_dict(self):
        def mat(M):
            return [[[float(z.real), float(z.imag)] for z in row] for row in M]

        out = {"m": self.m, "G1": mat(self.G1), "G2": mat(self.G2)}
        if self.odd_coeffs is not None:
            out["odd_coeffs"] = [[float(complex(z).real), float(complex(z).imag)]
                                 for z in self.odd_coeffs]
        return out


def build_triplet(m, odd_coeffs=None):
    """Boundary triplet matrices for order ``m >= 2``.

    Parameters
    ----------
    m : int
    odd_coeffs : tuple, optional
        ``(alpha, beta, gamma, delta)`` for odd ``m``; the defaults are
        ``1, 1, (-1)**n / 2 + i, (-1)**(n+1) / 2 + i`` with ``m = 2n + 1``.
    """
    if not isinstance(m, (int, np.integer)) or m < 2:
        raise ParameterError("order must be an integer m >= 2", m=m)
    m = int(m)
    im = ipow(m)
    G1 = np.zeros((m, 2 * m), dtype=complex)
    G2 = np.zeros((m, 2 * m), dtype=complex)
    n = m // 2
    for j in range(1, n + 1):
        G1[j - 1, m - j] = im * (-1) ** j
        G1[n + j - 1, 2 * m - j] = im * (-1) ** (j - 1)
        G2[j - 1, j - 1] = 1
        G2[n + j - 1, m + j - 1] = 1
    coeffs = None
    if m % 2:
        if odd_coeffs is None:
            coeffs = default_odd_coefficients(n)
        else:
            if len(odd_coeffs) != 4:
                raise ParameterError("odd_coeffs must be (alpha, beta, gamma, delta)")
            coeffs = tuple(GaussianRational.of(z) for z in odd_coeffs)
            rel = odd_coefficient_relations(*coeffs, n)
            names = list(rel)
            failed = [name for name in names[:4] if not rel[name]]
            if failed:
                raise ConstraintError(
                    "odd-order coefficients violate: " + "; ".join(failed), failed=failed
                )
            if not rel[names[4]]:
                raise TripletSingularityError("alpha*delta - beta*gamma vanishes")
        al, be, ga, de = (complex(z) for z in coeffs)
        G1[2 * n, m + n] = im * al
        G1[2 * n, n] = im * be
        G2[2 * n, m + n] = ga
        G2[2 * n, n] = de
        coeffs = tuple(coeffs)
    elif odd_coeffs is not None:
        raise ParameterError("odd_coeffs only apply to odd order")
    return BoundaryTripletMaps(m, G1, G2, coeffs)


# -- forms ------------------------------------------------------------------


def boundary_data(A, y):
    """``2m`` endpoint quasi-derivatives of a trajectory (``(2m, p)`` for several columns)."""
    if y.m != A.m:
        raise ParameterError("trajectory order does not match the matrix")
    return y.boundary_data()


def lagrange_form(bv_y, bv_z, m):
    """``sum_k (-1)**(k-1) D[m-k]y conj(D[k-1]z)`` evaluated between ``a`` and ``b``."""
    by = np.asarray(bv_y, dtype=complex)
    bz = np.asarray(bv_z, dtype=complex)
    if by.shape != (2 * m,) or bz.shape != (2 * m,):
        raise ParameterError(f"boundary data must have length {2 * m}")
    total = 0j
    for k in range(1, m + 1):
        sign = 1 if k % 2 else -1
        at_b = by[m + m - k] * np.conj(bz[m + k - 1])
        at_a = by[m - k] * np.conj(bz[k - 1])
        total += sign * (at_b - at_a)
    return complex(total)


def boundary_form(bv_y, bv_z, T):
    """``(Gamma_1 y, Gamma_2 z) - (Gamma_2 y, Gamma_1 z)``."""
    by = np.asarray(bv_y, dtype=complex)
    bz = np.asarray(bv_z, dtype=complex)
    g1y, g2y = T.G1 @ by, T.G2 @ by
    g1z, g2z = T.G1 @ bz, T.G2 @ bz
    return complex(np.vdot(g2z, g1y) - np.vdot(g1z, g2y))


# -- quadrature -------------------------------------------------------------


def _grid_of(*trajs):
    return np.unique(np.concatenate([t.step_grid() for t in trajs]))


def l2_inner(u, v, grid):
    """``integral u conj(v)`` for callables on a shared panel grid."""
    return integrate_doubling(lambda t: u(t) * np.conj(v(t)), grid)


@dataclass
class GreenResult:
    residual: float
    lhs: complex
    rhs: complex
    converged: bool
    warning: str = None

    def __float__(self):
        return self.residual


def greens_identity_residual(A, y, z, T=None):
    """``|<l y, z> - <y, l z> - ((Gamma_1 y, Gamma_2 z) - (Gamma_2 y, Gamma_1 z))|``.

    ``y`` and ``z`` are single-column trajectories; ``l y = lam y + f`` is
    read off the trajectory.
    """
    T = build_triplet(A.m) if T is None else T
    grid = _grid_of(y, z)
    first, ok1 = integrate_doubling(lambda t: y.l_values(t) * np.conj(z(t)[:, 0]), grid)
    second, ok2 = integrate_doubling(lambda t: y(t)[:, 0] * np.conj(z.l_values(t)), grid)
    lhs = first - second
    rhs = boundary_form(y.boundary_data(), z.boundary_data(), T)
    converged = ok1 and ok2
    return GreenResult(
        float(abs(lhs - rhs)), lhs, rhs, converged,
        None if converged else "quadrature did not reach the requested accuracy",
    )


# -- realising boundary data ------------------------------------------------


def _legendre_bumps(m, lo, hi, a, b):
    """``m`` Legendre polynomials on ``[lo, hi]``, zero elsewhere."""
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    br = [a, lo, hi, b] if hi < b else [a, lo, b]
    out = []
    for j in range(m):
        c = npleg.leg2poly(np.eye(m)[j])  # in powers of x = (t - mid) / half
        c = c / half ** np.arange(c.size)
        pieces = [Piece.zero(a), Piece.polynomial(c, origin=mid)]
        if hi < b:
            pieces.append(Piece.zero(hi))
        out.append(PiecewiseCoefficient(br, pieces))
    return out


def realize_boundary_data(A, target, lam=0.0, rng=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """A function in the maximal domain with prescribed boundary data.

    ``y = u + z``: ``u`` is homogeneous with the ``a``-part of ``target`` as
    initial data and ``z`` solves ``l(z) - lam z = f`` with zero data at
    ``a``, where ``f`` is a combination of ``m`` polynomial bumps supported in
    the right half of ``[a, b]``.  The combination is fixed by the ``m x m``
    linear map from bump weights to ``D[k]z(b)``.

    Returns a single-column trajectory (its forcing is ``f``).
    """
    m = A.m
    target = np.asarray(target, dtype=complex)
    if target.shape != (2 * m,):
        raise ParameterError(f"target must have length {2 * m}")
    rng = np.random.default_rng(0) if rng is None else rng
    a, b = A.a, A.b
    u = solve_cauchy(A, lam, None, a, target[:m], rtol, atol)
    need = target[m:] - u.boundary_data()[m:]
    lo, hi = a + 0.5 * (b - a), b
    last_cond = None
    for attempt in range(6):
        bumps = _legendre_bumps(m, lo, hi, a, b)
        cols = [solve_cauchy(A, lam, f, a, None, rtol, atol).boundary_data()[m:] for f in bumps]
        S = np.column_stack(cols)
        last_cond = np.linalg.cond(S)
        if last_cond <= 1e10:
            w = np.linalg.solve(S, need)
            scale = max(1.0, float(np.max(np.abs(target))))
            for _ in range(4):
                f = bumps[0].scale(w[0])
                for wj, bj in zip(w[1:], bumps[1:]):
                    f = f + bj.scale(wj)
                y = solve_cauchy(A, lam, f, a, target[:m], rtol, atol)
                miss = target[m:] - y.boundary_data()[m:]
                if np.max(np.abs(miss)) <= 1e-11 * scale:
                    break
                # iterative refinement absorbs the amplified integration error
                w = w + np.linalg.solve(S, miss)
            return y
        # re-randomise the bump support inside the right half
        half = 0.5 * (b - a)
        lo = a + half + rng.uniform(0.0, 0.5) * half
        hi = min(b, lo + rng.uniform(0.3, 1.0) * (b - lo))
    raise RealizationError(
        "bump system stayed ill-conditioned", condition_number=last_cond
    )
