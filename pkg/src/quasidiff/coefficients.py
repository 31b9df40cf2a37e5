"""Piecewise coefficient functions.

A :class:`PiecewiseCoefficient` is a complex-valued function on ``[a, b]``
given by a finite list of breakpoints and one :class:`Piece` per
subinterval.  Each piece is a short sum of terms::

    |t - origin|**exponent * num(t - origin) / den(t - origin)

with ``num`` and ``den`` complex polynomials (ascending coefficients).  Plain
polynomials have ``exponent == 0`` and no denominator.  A negative exponent
makes the piece *singular* at its origin, which must then be an endpoint of
the subinterval the piece lives on.

Evaluation at a breakpoint uses the piece to the right of it, except at
``b`` where the last piece is used.
"""

import math
import warnings

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from numpy.polynomial import polynomial as P
from scipy import integrate

from .errors import (
    CoefficientError,
    ComplexityError,
    DivisionError,
    DomainError,
    NonIntegrableError,
    SingularityError,
)

DEFAULT_MAX_DEGREE = 8
DEFAULT_MAX_BREAKPOINTS = 10_000

_ROOT_TOL = 1e-10


def _poly(coeffs):
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


def _degree(c):
    return len(c) - 1


def _order_at_zero(c):
    nz = np.flatnonzero(c)
    return int(nz[0]) if nz.size else math.inf


def _shift_poly(c, d):
    """Coefficients of ``c(s + d)`` in powers of ``s``."""
    if d == 0 or len(c) == 1:
        return c.copy()
    out = np.array([c[-1]], dtype=complex)
    lin = np.array([d, 1.0], dtype=complex)
    for ck in c[-2::-1]:
        out = P.polymul(out, lin)
        out[0] += ck
    return _poly(out)


def _real_roots_in(c, lo, hi, closed=False):
    """Real roots of polynomial ``c`` lying in (lo, hi) (or [lo, hi])."""
    c = _poly(c)
    scale = max(1.0, abs(lo), abs(hi))
    # leading terms below rounding on the interval only add roots far outside it
    size = np.abs(c) * scale ** np.arange(len(c))
    while len(c) > 1 and size[len(c) - 1] <= 1e-17 * size.max():
        c = c[:-1]
    if _degree(c) < 1:
        return np.empty(0)
    r = np.roots(c[::-1])
    r = r[np.abs(r.imag) <= _ROOT_TOL * scale].real
    tol = _ROOT_TOL * scale
    if closed:
        keep = (r >= lo - tol) & (r <= hi + tol)
    else:
        keep = (r > lo + tol) & (r < hi - tol)
    return np.sort(r[keep])


class Term:
    """One summand ``|s|**exponent * num(s) / den(s)`` with ``s = t - origin``."""

    __slots__ = ("exponent", "num", "den")

    def __init__(self, num, exponent=0.0, den=None):
        self.num = _poly(num)
        self.exponent = float(exponent)
        den = None if den is None else _poly(den)
        if den is not None:
            if not np.any(den):
                raise DivisionError("denominator is the zero polynomial")
            if len(den) == 1:
                self.num = self.num / den[0]
                den = None
        self.den = den

    @property
    def is_polynomial(self):
        return self.exponent == 0.0 and self.den is None

    @property
    def is_zero(self):
        return not np.any(self.num)

    def same_kind(self, other):
        if self.exponent != other.exponent:
            return False
        if self.den is None or other.den is None:
            return self.den is None and other.den is None
        return self.den.shape == other.den.shape and np.array_equal(self.den, other.den)

    def order_at_origin(self):
        """Effective power of ``|s|`` as ``s -> 0``."""
        k = _order_at_zero(self.num)
        if k == math.inf:
            return math.inf
        d = 0 if self.den is None else _order_at_zero(self.den)
        return self.exponent + k - d

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        val = P.polyval(s, self.num)
        if self.den is not None:
            dv = P.polyval(s, self.den)
            if np.any(dv == 0):
                at_origin = (dv == 0) & (s == 0)
                if np.any((dv == 0) & ~at_origin):
                    raise SingularityError("rational piece evaluated at a pole")
            with np.errstate(divide="ignore", invalid="ignore"):
                val = val / dv
        if self.exponent != 0.0:
            with np.errstate(divide="ignore", invalid="ignore"):
                val = val * np.abs(s) ** self.exponent
        zero = s == 0
        if np.any(zero) and (self.exponent != 0.0 or self.den is not None):
            eff = self.order_at_origin()
            if eff < 0:
                raise SingularityError("evaluation at the singular endpoint of a singular piece")
            k = _order_at_zero(self.num)
            if eff == 0:
                d0 = 1.0 if self.den is None else self.den[_order_at_zero(self.den)]
                limit = self.num[k] / d0
            else:
                limit = 0.0
            val = np.where(zero, limit, val)
        return val

    def shifted(self, d):
        if self.exponent != 0.0:
            raise CoefficientError("cannot move the origin of a power term")
        den = None if self.den is None else _shift_poly(self.den, d)
        return Term(_shift_poly(self.num, d), 0.0, den)

    def conj(self):
        return Term(self.num.conj(), self.exponent, None if self.den is None else self.den.conj())

    def scaled(self, s):
        return Term(self.num * s, self.exponent, self.den)

    def times(self, other):
        if self.den is None and other.den is None:
            den = None
        elif self.den is None:
            den = other.den
        elif other.den is None:
            den = self.den
        else:
            den = P.polymul(self.den, other.den)
        return Term(P.polymul(self.num, other.num), self.exponent + other.exponent, den)

    def plus(self, other):
        """Sum of two terms of the same kind."""
        return Term(P.polyadd(self.num, other.num), self.exponent, self.den)

    def to_dict(self):
        out = {"coeffs": [[float(c.real), float(c.imag)] for c in self.num]}
        if self.exponent != 0.0:
            out["exponent"] = self.exponent
        if self.den is not None:
            out["den"] = [[float(c.real), float(c.imag)] for c in self.den]
        return out


class Piece:
    """A sum of :class:`Term` objects sharing one origin."""

    __slots__ = ("origin", "terms")

    def __init__(self, origin, terms):
        self.origin = float(origin)
        merged = []
        for term in terms:
            if term.is_zero:
                continue
            for i, prev in enumerate(merged):
                if prev.same_kind(term):
                    merged[i] = prev.plus(term)
                    break
            else:
                merged.append(term)
        self.terms = tuple(t for t in merged if not t.is_zero)

    @classmethod
    def polynomial(cls, coeffs, origin=0.0):
        return cls(origin, [Term(coeffs)])

    @classmethod
    def zero(cls, origin=0.0):
        return cls(origin, [])

    @property
    def is_zero(self):
        return len(self.terms) == 0

    @property
    def is_polynomial(self):
        return all(t.is_polynomial for t in self.terms)

    @property
    def is_power_free(self):
        return all(t.exponent == 0.0 for t in self.terms)

    @property
    def degree(self):
        degs = [_degree(t.num) for t in self.terms]
        degs += [_degree(t.den) for t in self.terms if t.den is not None]
        return max(degs, default=0)

    def poly_coeffs(self, origin=None):
        """Coefficients of a polynomial piece in powers of ``t - origin``."""
        if not self.is_polynomial:
            raise CoefficientError("piece is not a polynomial")
        origin = self.origin if origin is None else origin
        if not self.terms:
            return np.zeros(1, dtype=complex)
        return _shift_poly(self.terms[0].num, origin - self.origin)

    def __call__(self, t):
        s = np.asarray(t, dtype=float) - self.origin
        out = np.zeros(np.shape(s), dtype=complex)
        for term in self.terms:
            out = out + term(s)
        return out

    def moved_to(self, origin):
        if origin == self.origin:
            return self
        d = origin - self.origin
        return Piece(origin, [t.shifted(d) for t in self.terms])

    def conj(self):
        return Piece(self.origin, [t.conj() for t in self.terms])

    def scaled(self, s):
        if s == 0:
            return Piece.zero(self.origin)
        return Piece(self.origin, [t.scaled(s) for t in self.terms])

    def equals(self, other, atol=0.0):
        """Structural equality (``self - other`` has only zero coefficients)."""
        diff = _piece_add(self, other.scaled(-1.0))
        return all(np.all(np.abs(t.num) <= atol) for t in diff.terms)


def _common_origin(p, q):
    if p.is_zero:
        return q.origin
    if q.is_zero or p.origin == q.origin:
        return p.origin
    if q.is_power_free:
        return p.origin
    if p.is_power_free:
        return q.origin
    raise CoefficientError(
        "cannot combine power terms anchored at different points "
        f"({p.origin} and {q.origin})"
    )


def _piece_add(p, q):
    if q.is_zero:
        return p
    if p.is_zero:
        return q
    o = _common_origin(p, q)
    p, q = p.moved_to(o), q.moved_to(o)
    terms = list(p.terms)
    for tq in q.terms:
        for i, tp in enumerate(terms):
            if tp.same_kind(tq):
                terms[i] = tp.plus(tq)
                break
            if tp.exponent == tq.exponent and (tp.den is not None or tq.den is not None):
                dp = np.ones(1, complex) if tp.den is None else tp.den
                dq = np.ones(1, complex) if tq.den is None else tq.den
                num = P.polyadd(P.polymul(tp.num, dq), P.polymul(tq.num, dp))
                terms[i] = Term(num, tp.exponent, P.polymul(dp, dq))
                break
        else:
            terms.append(tq)
    return Piece(o, terms)


def _piece_mul(p, q):
    if p.is_zero or q.is_zero:
        return Piece.zero(p.origin)
    o = _common_origin(p, q)
    p, q = p.moved_to(o), q.moved_to(o)
    return Piece(o, [tp.times(tq) for tp in p.terms for tq in q.terms])


def _piece_reciprocal(p, lo, hi):
    if p.is_zero:
        raise DivisionError("reciprocal of a piece that vanishes identically", interval=(lo, hi))
    if len(p.terms) != 1:
        raise CoefficientError("reciprocal of a multi-term piece is not representable")
    (term,) = p.terms
    roots = _real_roots_in(term.num, lo - p.origin, hi - p.origin)
    if roots.size:
        raise DivisionError(
            "reciprocal of a piece with an interior root",
            root=float(roots[0] + p.origin),
            interval=(lo, hi),
        )
    den = term.den if term.den is not None else np.ones(1, complex)
    return Piece(p.origin, [Term(den, -term.exponent, term.num)])


class PiecewiseCoefficient:
    """Complex piecewise function on ``[a, b]``.

    Parameters
    ----------
    breakpoints : array_like
        Strictly increasing; first entry ``a``, last entry ``b``.
    pieces : sequence of Piece
        One piece per subinterval.
    max_degree : int
        Cap on numerator and denominator degrees.
    """

    __slots__ = ("breakpoints", "pieces", "max_degree")

    def __init__(self, breakpoints, pieces, max_degree=DEFAULT_MAX_DEGREE):
        br = np.asarray(breakpoints, dtype=float)
        if br.ndim != 1 or br.size < 2:
            raise CoefficientError("need at least two breakpoints")
        if not np.all(np.diff(br) > 0):
            raise CoefficientError("breakpoints must be strictly increasing")
        pieces = tuple(pieces)
        if len(pieces) != br.size - 1:
            raise CoefficientError("need exactly one piece per subinterval")
        for lo, hi, piece in zip(br[:-1], br[1:], pieces):
            if piece.degree > max_degree:
                raise ComplexityError(
                    f"piece degree {piece.degree} exceeds cap {max_degree}", interval=(lo, hi)
                )
            if not piece.is_power_free and lo < piece.origin < hi:
                raise CoefficientError(
                    "power term anchored strictly inside its subinterval", interval=(lo, hi)
                )
        self.breakpoints = br
        self.pieces = pieces
        self.max_degree = max_degree

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value, a, b):
        return cls([a, b], [Piece.polynomial([value], origin=a)])

    @classmethod
    def zero(cls, a, b):
        return cls([a, b], [Piece.zero(a)])

    @classmethod
    def polynomial(cls, coeffs, a, b, origin=0.0):
        """Single polynomial ``sum coeffs[k] * (t - origin)**k`` on ``[a, b]``."""
        return cls([a, b], [Piece.polynomial(coeffs, origin=origin)])

    @classmethod
    def step(cls, a, b, at, left=0.0, right=1.0):
        """Two constant pieces, ``left`` on ``[a, at)`` and ``right`` on ``[at, b]``."""
        if not a < at < b:
            raise DomainError("step location must lie strictly inside (a, b)")
        return cls([a, at, b], [Piece.polynomial([left], a), Piece.polynomial([right], at)])

    @classmethod
    def heaviside(cls, at, a, b, height=1.0):
        return cls.step(a, b, at, 0.0, height)

    @classmethod
    def jumps(cls, a, b, locations, heights, base=0.0):
        """Step function ``base + sum heights[j] * H(t - locations[j])``."""
        order = np.argsort(locations)
        locs = np.asarray(locations, float)[order]
        hs = np.asarray(heights, complex)[order]
        br = np.concatenate([[a], locs, [b]])
        levels = base + np.concatenate([[0.0], np.cumsum(hs)])
        pieces = [Piece.polynomial([v], lo) for v, lo in zip(levels, br[:-1])]
        return cls(br, pieces)

    @classmethod
    def power(cls, exponent, a, b, scale=1.0, origin=None):
        """``scale * |t - origin|**exponent``; ``origin`` must be ``a`` or ``b``."""
        origin = a if origin is None else origin
        if a < origin < b:
            raise DomainError("power origin must not lie inside (a, b)")
        return cls([a, b], [Piece(origin, [Term([scale], exponent)])])

    @classmethod
    def interpolate(cls, func, a, b, pieces=16, degree=4):
        """Piecewise Chebyshev interpolant of a smooth callable."""
        br = np.linspace(a, b, pieces + 1)
        out = []
        for lo, hi in zip(br[:-1], br[1:]):
            h = hi - lo
            cheb = Chebyshev.interpolate(lambda s, lo=lo: func(lo + s), degree, domain=[0, h])
            poly = cheb.convert(kind=Polynomial, domain=[0, h], window=[0, h])
            out.append(Piece.polynomial(poly.coef, origin=lo))
        return cls(br, out)

    # -- basic properties -------------------------------------------------

    @property
    def a(self):
        return float(self.breakpoints[0])

    @property
    def b(self):
        return float(self.breakpoints[-1])

    @property
    def interval(self):
        return (self.a, self.b)

    @property
    def is_polynomial(self):
        return all(p.is_polynomial for p in self.pieces)

    def is_zero(self, atol=0.0):
        return all(all(np.all(np.abs(t.num) <= atol) for t in p.terms) for p in self.pieces)

    def is_real(self):
        return all(
            np.all(t.num.imag == 0) and (t.den is None or np.all(t.den.imag == 0))
            for p in self.pieces
            for t in p.terms
        )

    def subintervals(self):
        br = self.breakpoints
        return list(zip(br[:-1], br[1:], self.pieces))

    def singular_points(self):
        """Breakpoints at which some piece is unbounded, with the effective exponent."""
        out = []
        for lo, hi, piece in self.subintervals():
            for term in piece.terms:
                if piece.origin in (lo, hi):
                    eff = term.order_at_origin()
                    if eff < 0:
                        out.append((piece.origin, eff))
        return out

    def __repr__(self):
        return f"PiecewiseCoefficient([{self.a}, {self.b}], {len(self.pieces)} pieces)"

    # -- evaluation -------------------------------------------------------

    def piece_index(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def __call__(self, t):
        return evaluate(self, t)

    # -- algebra ----------------------------------------------------------

    def _check_same_interval(self, other):
        if self.interval != other.interval:
            raise DomainError(f"interval mismatch: {self.interval} vs {other.interval}")

    def _binary(self, other, fn):
        if np.isscalar(other):
            other = PiecewiseCoefficient.constant(other, self.a, self.b)
        self._check_same_interval(other)
        br = merge_breakpoints(self.breakpoints, other.breakpoints)
        mids = 0.5 * (br[:-1] + br[1:])
        i1 = self.piece_index(mids)
        i2 = other.piece_index(mids)
        pieces = [fn(self.pieces[j], other.pieces[k]) for j, k in zip(i1, i2)]
        return PiecewiseCoefficient(br, pieces, max(self.max_degree, other.max_degree))

    def __add__(self, other):
        return self._binary(other, _piece_add)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if not np.isscalar(other) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        return self._binary(other, _piece_mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return self.scale(1.0 / other)
        return self * other.reciprocal()

    def scale(self, s):
        return PiecewiseCoefficient(
            self.breakpoints, [p.scaled(s) for p in self.pieces], self.max_degree
        )

    def shift_constant(self, c):
        return self + c

    def conj(self):
        return PiecewiseCoefficient(
            self.breakpoints, [p.conj() for p in self.pieces], self.max_degree
        )

    def reciprocal(self):
        pieces = [_piece_reciprocal(p, lo, hi) for lo, hi, p in self.subintervals()]
        return PiecewiseCoefficient(self.breakpoints, pieces, self.max_degree)

    def refined(self, breakpoints):
        """Same function on the union of its breakpoints and ``breakpoints``."""
        br = merge_breakpoints(self.breakpoints, breakpoints)
        idx = self.piece_index(0.5 * (br[:-1] + br[1:]))
        return PiecewiseCoefficient(br, [self.pieces[i] for i in idx], self.max_degree)

    def equals(self, other, atol=0.0):
        """Structural equality of pieces after breakpoint merging."""
        self._check_same_interval(other)
        diff = self - other
        return diff.is_zero(atol)

    def antiderivative(self, value_at_a=0.0):
        """Continuous antiderivative ``F`` with ``F(a) = value_at_a``."""
        out = []
        level = complex(value_at_a)
        for lo, hi, piece in self.subintervals():
            terms = []
            for term in piece.terms:
                if term.den is not None:
                    raise CoefficientError("antiderivative of a rational piece")
                k = np.arange(len(term.num))
                denom = term.exponent + k + 1
                if np.any(denom == 0):
                    raise NonIntegrableError("antiderivative has a logarithmic term")
                num = np.concatenate([[0.0], term.num / denom])
                terms.append(Term(num, term.exponent))
            prim = Piece(piece.origin, terms)
            const = level - complex(prim(lo))
            prim = _piece_add(prim, Piece(piece.origin, [Term([const])]))
            level = complex(prim(hi))
            out.append(prim)
        return PiecewiseCoefficient(self.breakpoints, out, self.max_degree + 1)

    def integral(self):
        """Signed integral over ``[a, b]``."""
        if self.is_polynomial:
            return complex(self.antiderivative()(self.b))
        return sum(_piece_quad(p, lo, hi, absolute=False) for lo, hi, p in self.subintervals())

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        pieces = []
        for lo, hi, piece in self.subintervals():
            d = {"lo": float(lo), "hi": float(hi)}
            if piece.origin != lo:
                d["origin"] = piece.origin
            if len(piece.terms) <= 1:
                term = piece.terms[0] if piece.terms else Term([0.0])
                td = term.to_dict()
                d["coeffs"] = td["coeffs"]
                if "exponent" in td:
                    d["singular_exponent"] = td["exponent"]
                if "den" in td:
                    d["den"] = td["den"]
            else:
                d["terms"] = [t.to_dict() for t in piece.terms]
            pieces.append(d)
        return {"pieces": pieces}

    @classmethod
    def from_dict(cls, data, max_degree=DEFAULT_MAX_DEGREE):
        items = data["pieces"]
        if not items:
            raise CoefficientError("empty piece list")
        br = [float(items[0]["lo"])]
        pieces = []
        for item in items:
            lo, hi = float(item["lo"]), float(item["hi"])
            if lo != br[-1]:
                raise CoefficientError(f"pieces are not contiguous at {lo}")
            br.append(hi)
            origin = float(item.get("origin", lo))
            if "terms" in item:
                terms = [
                    Term(_cplx_list(t["coeffs"]), t.get("exponent", 0.0),
                         _cplx_list(t["den"]) if "den" in t else None)
                    for t in item["terms"]
                ]
            else:
                den = _cplx_list(item["den"]) if "den" in item else None
                terms = [Term(_cplx_list(item["coeffs"]), item.get("singular_exponent", 0.0), den)]
            pieces.append(Piece(origin, terms))
        return cls(br, pieces, max_degree)


def _cplx_list(values):
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            out.append(complex(v[0], v[1]))
        else:
            out.append(complex(v))
    return out


def merge_breakpoints(*arrays, max_breakpoints=DEFAULT_MAX_BREAKPOINTS):
    br = np.unique(np.concatenate([np.asarray(a, dtype=float) for a in arrays]))
    if br.size > max_breakpoints:
        raise ComplexityError(
            f"merged breakpoint set has {br.size} points (cap {max_breakpoints})"
        )
    return br


def evaluate(c, t):
    """Value of ``c`` at ``t`` (scalar or array), right-limit convention."""
    t_arr = np.asarray(t, dtype=float)
    slack = 1e-13 * (c.b - c.a)
    if np.any(t_arr < c.a - slack) or np.any(t_arr > c.b + slack):
        raise DomainError(f"t outside [{c.a}, {c.b}]")
    t_arr = np.clip(t_arr, c.a, c.b)
    idx = c.piece_index(t_arr)
    if t_arr.ndim == 0:
        return complex(c.pieces[int(idx)](t_arr))
    out = np.empty(t_arr.shape, dtype=complex)
    for k in np.unique(idx):
        sel = idx == k
        out[sel] = c.pieces[k](t_arr[sel])
    return out


def combine(op, *args, **kwargs):
    """Functional front end to coefficient arithmetic.

    ``op`` is one of ``add``, ``sub``, ``mul``, ``scale``, ``reciprocal``,
    ``shift_constant``.
    """
    if op == "add":
        f, g = args
        return f + g
    if op == "sub":
        f, g = args
        return f - g
    if op == "mul":
        f, g = args
        return f * g
    if op == "scale":
        f, s = args if len(args) == 2 else (args[0], kwargs["s"])
        return f.scale(s)
    if op == "reciprocal":
        (f,) = args
        return f.reciprocal()
    if op == "shift_constant":
        f, c = args if len(args) == 2 else (args[0], kwargs["c"])
        return f.shift_constant(c)
    raise CoefficientError(f"unknown operation {op!r}")


# -- integrability ---------------------------------------------------------


def _endpoint_exponent(piece, point):
    if piece.is_power_free and all(t.den is None for t in piece.terms):
        return 0.0
    if piece.origin != point:
        return 0.0
    return min((t.order_at_origin() for t in piece.terms), default=0.0)


def _check_poles(piece, lo, hi):
    for term in piece.terms:
        if term.den is None:
            continue
        s_lo, s_hi = lo - piece.origin, hi - piece.origin
        roots = _real_roots_in(term.den, s_lo, s_hi, closed=True)
        for r in roots:
            # roots exactly at the origin are accounted for by the order count
            if piece.origin in (lo, hi) and abs(r) <= _ROOT_TOL * max(1.0, abs(s_lo), abs(s_hi)):
                if _order_at_zero(term.den) > 0:
                    continue
            raise NonIntegrableError(
                "pole of a rational piece inside its closed subinterval",
                location=float(r + piece.origin),
            )


def _poly_abs_integral(c, lo, hi):
    """Closed-form integral of ``|p|`` for a real polynomial ``p``."""
    prim = P.polyint(c)
    pts = np.concatenate([[lo], _real_roots_in(c, lo, hi), [hi]])
    vals = P.polyval(pts, prim)
    return float(np.sum(np.abs(np.diff(vals))))


def _piece_quad(piece, lo, hi, absolute=True):
    _check_poles(piece, lo, hi)
    e_lo = _endpoint_exponent(piece, lo)
    e_hi = _endpoint_exponent(piece, hi)
    for e, where in ((e_lo, lo), (e_hi, hi)):
        if e <= -1:
            raise NonIntegrableError(
                f"non-integrable singularity |t - {where}|^{e:g}", location=float(where)
            )
    if piece.is_polynomial:
        c = piece.poly_coeffs(origin=lo)
        if absolute:
            # normalise by the largest coefficient so |s p| integrates to |s| times |p|
            # exactly, and a real polynomial times a phase keeps the closed form
            scale = float(np.max(np.maximum(np.abs(c.real), np.abs(c.imag))))
            c = c.real / scale + 1j * (c.imag / scale)
            k = int(np.argmax(np.abs(c)))
            c = c * np.conj(c[k] / abs(c[k]))
            if np.max(np.abs(c.imag)) <= 1e-15:
                return scale * _poly_abs_integral(c.real, 0.0, hi - lo)

            def unit(u, c=c):
                return abs(P.polyval(u, c))

            return scale * _quad(unit, hi - lo, True)
        if not absolute:
            prim = P.polyint(c)
            return complex(P.polyval(hi - lo, prim))

    def g(t):
        v = piece(t)
        return abs(v) if absolute else v

    # substitute s = u**kappa near a singular end so the integrand is bounded
    if e_lo < 0 and e_hi < 0:
        mid = 0.5 * (lo + hi)
        return _piece_quad_split(g, lo, mid, e_lo, None, absolute) + _piece_quad_split(
            g, mid, hi, None, e_hi, absolute
        )
    return _piece_quad_split(g, lo, hi, e_lo if e_lo < 0 else None, e_hi if e_hi < 0 else None, absolute)


def _piece_quad_split(g, lo, hi, e_lo, e_hi, absolute):
    h = hi - lo
    if e_lo is not None:
        kappa = 1.0 / (1.0 + e_lo)

        def f(u):
            return g(lo + u**kappa) * kappa * u ** (kappa - 1.0)

        span = h ** (1.0 / kappa)
    elif e_hi is not None:
        kappa = 1.0 / (1.0 + e_hi)

        def f(u):
            return g(hi - u**kappa) * kappa * u ** (kappa - 1.0)

        span = h ** (1.0 / kappa)
    else:

        def f(u):
            return g(lo + u)

        span = h
    return _quad(f, span, absolute)


def _quad(f, span, absolute):
    def run(fn):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(fn, 0.0, span, epsabs=0.0, epsrel=1e-11, limit=400)
            except integrate.IntegrationWarning:
                val, err = integrate.quad(fn, 0.0, span, epsabs=0.0, epsrel=1e-8, limit=400,
                                          full_output=True)[:2]
        if not np.isfinite(val) or err > 1e-6 * max(abs(val), 1e-300) + 1e-14:
            raise NonIntegrableError("quadrature did not converge", estimate=val, error=err)
        return val

    def at(u):
        return complex(f(np.array(u)))

    if absolute:
        return run(lambda u: float(abs(at(u))))
    return complex(run(lambda u: at(u).real), run(lambda u: at(u).imag))


def l1_norm(c):
    """``int_a^b |c(t)| dt``; raises :class:`NonIntegrableError` on divergence."""
    total = 0.0
    for lo, hi, piece in c.subintervals():
        if piece.is_zero:
            continue
        total += _piece_quad(piece, lo, hi, absolute=True)
    return float(total)


def is_integrable(c):
    try:
        l1_norm(c)
    except NonIntegrableError:
        return False
    return True
