"""Shin--Zettl matrices: construction, validation, Lagrange adjoint.

Matrix positions in reports and docstrings are 1-based ``(k, s)`` as in the
usual notation ``a_{k,s}``; the Python storage is 0-based.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .coefficients import PiecewiseCoefficient, l1_norm, merge_breakpoints
from .errors import (
    AdmissibilityError,
    CoefficientError,
    DomainError,
    NonIntegrableError,
    ParameterError,
)

_I_POW = (1, 1j, -1, -1j)


def ipow(k):
    """Exact ``i**k`` for integer ``k``."""
    return _I_POW[k % 4]


class ShinZettlMatrix:
    """An ``m x m`` grid of :class:`PiecewiseCoefficient` (``None`` = structural zero)."""

    def __init__(self, entries, a=None, b=None):
        rows = [list(r) for r in entries]
        m = len(rows)
        if m < 1 or any(len(r) != m for r in rows):
            raise ParameterError("entries must form a non-empty square grid")
        coeffs = [c for r in rows for c in r if c is not None]
        if a is None or b is None:
            if not coeffs:
                raise ParameterError("interval is required when every entry is None")
            a, b = coeffs[0].interval
        for c in coeffs:
            if c.interval != (float(a), float(b)):
                raise DomainError(f"entry interval {c.interval} differs from {(a, b)}")
        self.m = m
        self.a = float(a)
        self.b = float(b)
        self.entries = tuple(tuple(r) for r in rows)

    @classmethod
    def from_constant(cls, matrix, a, b):
        """Matrix of constant coefficients; zeros above the superdiagonal become ``None``."""
        mat = np.asarray(matrix, dtype=complex)
        m = mat.shape[0]
        rows = []
        for k in range(m):
            row = []
            for s in range(m):
                if s > k + 1 or (mat[k, s] == 0 and s != k + 1):
                    row.append(None)
                else:
                    row.append(PiecewiseCoefficient.constant(mat[k, s], a, b))
            rows.append(row)
        return cls(rows, a, b)

    @property
    def interval(self):
        return (self.a, self.b)

    def __getitem__(self, pos):
        k, s = pos
        return self.entries[k][s]

    def coefficient(self, k, s):
        """Entry ``a_{k,s}`` (1-based), zero coefficient for structural zeros."""
        c = self.entries[k - 1][s - 1]
        return PiecewiseCoefficient.zero(self.a, self.b) if c is None else c

    @property
    def breakpoints(self):
        arrays = [c.breakpoints for r in self.entries for c in r if c is not None]
        arrays.append(np.array([self.a, self.b]))
        return merge_breakpoints(*arrays)

    def is_real(self):
        return all(c.is_real() for r in self.entries for c in r if c is not None)

    def evaluate(self, t):
        """Dense ``(m, m)`` matrix ``A(t)``."""
        out = np.zeros((self.m, self.m), dtype=complex)
        for k, row in enumerate(self.entries):
            for s, c in enumerate(row):
                if c is not None:
                    out[k, s] = c(t)
        return out

    def equals(self, other, atol=0.0):
        if self.m != other.m or self.interval != other.interval:
            return False
        for k in range(self.m):
            for s in range(self.m):
                x, y = self.entries[k][s], other.entries[k][s]
                if x is None and y is None:
                    continue
                if x is None:
                    if not y.is_zero(atol):
                        return False
                elif y is None:
                    if not x.is_zero(atol):
                        return False
                elif not x.equals(y, atol):
                    return False
        return True

    def to_dict(self):
        return {
            "m": self.m,
            "interval": [self.a, self.b],
            "entries": [[None if c is None else c.to_dict() for c in r] for r in self.entries],
        }

    @classmethod
    def from_dict(cls, data):
        a, b = data["interval"]
        rows = [
            [None if c is None else PiecewiseCoefficient.from_dict(c) for c in r]
            for r in data["entries"]
        ]
        if len(rows) != data["m"]:
            raise ParameterError("entry grid does not match m")
        return cls(rows, a, b)

    def __repr__(self):
        return f"ShinZettlMatrix(m={self.m}, interval={self.interval})"


@dataclass
class Violation:
    kind: str
    position: tuple
    message: str


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)


def validate(A):
    """List every violated Shin--Zettl condition; empty report means admissible."""
    report = ValidationReport()
    for k in range(1, A.m + 1):
        for s in range(1, A.m + 1):
            c = A.entries[k - 1][s - 1]
            if s > k + 1:
                if c is not None and not c.is_zero():
                    report.violations.append(
                        Violation("upper-nonzero", (k, s), "entry above the superdiagonal is not zero")
                    )
                continue
            if s == k + 1:
                if c is None or any(p.is_zero for p in c.pieces):
                    report.violations.append(
                        Violation("superdiagonal-vanishes", (k, s),
                                  "superdiagonal entry vanishes on a subinterval")
                    )
            if c is None:
                continue
            try:
                l1_norm(c)
            except NonIntegrableError as exc:
                report.violations.append(Violation("non-integrable", (k, s), str(exc)))
    return report


def lambda_matrix(m):
    """The antidiagonal sign matrix with ``(k, m-k+1)`` entry ``(-1)**k``."""
    if m < 1:
        raise ParameterError("m must be positive")
    out = np.zeros((m, m), dtype=int)
    for k in range(1, m + 1):
        out[k - 1, m - k] = (-1) ** k
    return out


def lagrange_adjoint(A):
    """Formally adjoint matrix ``-Lambda^{-1} conj(A^T) Lambda``.

    Entrywise ``(A+)_{k,s} = (-1)**(k+s+1) * conj(a_{m-s+1, m-k+1})``.
    """
    m = A.m
    rows = []
    for k in range(1, m + 1):
        row = []
        for s in range(1, m + 1):
            src = A.entries[m - s][m - k]
            if src is None:
                row.append(None)
            else:
                sign = -1.0 if (k + s + 1) % 2 else 1.0
                c = src.conj()
                row.append(c if sign > 0 else -c)
        rows.append(row)
    return ShinZettlMatrix(rows, A.a, A.b)


def is_formally_selfadjoint(A, atol=0.0):
    """``A == A+`` by structural comparison of the pieces."""
    return A.equals(lagrange_adjoint(A), atol)


def _require_integrable(c, name):
    try:
        l1_norm(c)
    except NonIntegrableError as exc:
        raise AdmissibilityError(f"{name} is not integrable: {exc}", quotient=name) from exc


def _reciprocal(p):
    try:
        return p.reciprocal()
    except CoefficientError as exc:
        raise AdmissibilityError(f"1/p is not admissible: {exc}", quotient="1/p") from exc


def build_sturm_liouville(p, Q, mode="distributional"):
    """Shin--Zettl matrix of ``-(p y')' + q y``.

    In ``classical`` mode the second argument is the potential ``q`` itself
    and ``D[1]y = p y'``.  In ``distributional`` mode it is an antiderivative
    ``Q`` of ``q`` and ``D[1]y = p y' - Q y``.
    """
    if p.interval != Q.interval:
        raise DomainError("p and Q live on different intervals")
    inv_p = _reciprocal(p)
    _require_integrable(inv_p, "1/p")
    if mode == "classical":
        _require_integrable(Q, "q")
        return ShinZettlMatrix([[None, inv_p], [Q, None]], p.a, p.b)
    if mode != "distributional":
        raise ParameterError(f"unknown mode {mode!r}")
    q_over_p = Q * inv_p
    _require_integrable(q_over_p, "Q/p")
    q2_over_p = Q * q_over_p
    _require_integrable(q2_over_p, "Q^2/p")
    return ShinZettlMatrix([[q_over_p, inv_p], [-q2_over_p, -q_over_p]], p.a, p.b)


def build_two_term(m, k, Q):
    """Shin--Zettl matrix of ``i**m y^(m) + Q^(k) y`` with ``1 <= k <= m // 2``."""
    if m < 3:
        raise ParameterError("two-term regularisation needs m >= 3")
    if not 1 <= k <= m // 2:
        raise ParameterError(f"k must lie in [1, {m // 2}]")
    a, b = Q.interval
    if 2 * k == m:
        try:
            l1_norm(Q * Q.conj())
        except NonIntegrableError as exc:
            raise AdmissibilityError("Q is not square integrable", quotient="Q") from exc
    else:
        _require_integrable(Q, "Q")
    one = PiecewiseCoefficient.constant(1.0, a, b)
    rows = [[None] * m for _ in range(m)]
    for r in range(m - 1):
        rows[r][r + 1] = one
    c = ipow(-m)
    for s in range(k):
        rows[m - k + s - 1][s] = Q.scale(-c * (-1) ** s * comb(k, s))
    if 2 * k == m:
        rows[m - 1][k] = -Q
        rows[m - 1][0] = (Q * Q).scale((-1) ** (m // 2))
    else:
        rows[m - 1][k] = Q.scale(c * (-1) ** (k + 1))
    return ShinZettlMatrix(rows, a, b)


def free_matrix(m, a, b):
    """Matrix of ``i**m y^(m)`` (ones on the superdiagonal)."""
    one = PiecewiseCoefficient.constant(1.0, a, b)
    rows = [[None] * m for _ in range(m)]
    for r in range(m - 1):
        rows[r][r + 1] = one
    return ShinZettlMatrix(rows, a, b)
