"""First-order systems ``w' = A_lam(t) w + phi(t)`` for quasi-derivatives.

The state ``w = (D[0]y, ..., D[m-1]y)`` is integrated with the
Dormand--Prince 5(4) pair.  Every coefficient breakpoint is a mandatory step
boundary, so a jump in a coefficient is never sampled inside a step.  A
subinterval whose coefficient is unbounded like ``|t - t0|**e`` (``-1 < e <
0``) at one end is integrated in the variable ``sigma`` with ``t - t0 =
sigma**kappa``, ``kappa = 1 / (1 + e)``, which makes the right-hand side
bounded.

All integrations are vectorised over a batch of spectral parameters: the
state has shape ``(L, m, p)`` for ``L`` values of ``lam`` and ``p`` columns.
Homogeneous integrations renormalise large states and keep the removed
factor as a per-``lam`` log scale.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.integrate import RK45

from .coefficients import PiecewiseCoefficient, merge_breakpoints

from .errors import DomainError, IntegrationError, NonIntegrableError
from .quadrature import l2_norm_on
from .shinzettl import ShinZettlMatrix, ipow

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-10

_A = np.asarray(RK45.A, dtype=float)
_B = np.asarray(RK45.B, dtype=float)
_C = np.asarray(RK45.C, dtype=float)
_E = np.asarray(RK45.E, dtype=float)
_P = np.asarray(RK45.P, dtype=float)

_RESCALE_AT = 1e50

# Dense runs integrate a decade tighter than requested: the derivative of the
# order-4 interpolant is then within the requested tolerance of the vector field.
_DENSE_TIGHTEN = 0.1
BATCH_CHUNK = 64  # lams integrated together in one vectorised run


def build_a_lambda(A, lam):
    """``A_lam``: ``A`` with ``i**(-m) * lam`` added to entry ``(m, 1)``.

    With this sign the first component ``y`` of a solution of
    ``w' = A_lam w`` satisfies ``i**m D[m]y = lam * y``.
    """
    m = A.m
    rows = [list(r) for r in A.entries]
    shift = ipow(-m) * complex(lam)
    if shift != 0:
        old = rows[m - 1][0]
        rows[m - 1][0] = (
            PiecewiseCoefficient.constant(shift, A.a, A.b) if old is None else old + shift
        )
    return ShinZettlMatrix(rows, A.a, A.b)


# -- compiled subintervals --------------------------------------------------


def _singular_exponent(piece, point):
    if piece.origin != point or (piece.is_power_free and all(t.den is None for t in piece.terms)):
        return 0.0
    return min((t.order_at_origin() for t in piece.terms), default=0.0)


class _Segment:
    """Coefficients of one breakpoint subinterval, ready for fast evaluation."""

    def __init__(self, A, lo, hi, kind="plain", kappa=1.0):
        self.lo, self.hi = float(lo), float(hi)
        self.kind, self.kappa = kind, kappa
        m = A.m
        mid = 0.5 * (lo + hi)
        poly, extra = {}, []
        deg = 0
        self.exponents = [0.0, 0.0]
        for k, row in enumerate(A.entries):
            for s, c in enumerate(row):
                if c is None:
                    continue
                piece = c.pieces[int(c.piece_index(mid))]
                if piece.is_zero:
                    continue
                self.exponents[0] = min(self.exponents[0], _singular_exponent(piece, lo))
                self.exponents[1] = min(self.exponents[1], _singular_exponent(piece, hi))
                if piece.is_polynomial:
                    coeffs = piece.poly_coeffs(origin=lo)
                    poly[(k, s)] = coeffs
                    deg = max(deg, len(coeffs) - 1)
                else:
                    extra.append((k, s, piece))
        stack = np.zeros((deg + 1, m, m), dtype=complex)
        for (k, s), coeffs in poly.items():
            stack[: len(coeffs), k, s] = coeffs
        self.stack = stack
        self.constant = deg == 0 and not extra
        self.extra = extra
        if kind != "plain":
            span = hi - lo
            self.sig_end = span ** (1.0 / kappa)
            self.sig_floor = (1e-14 * span) ** (1.0 / kappa)

    def with_map(self, kind, kappa, lo=None, hi=None):
        seg = object.__new__(_Segment)
        seg.__dict__.update(self.__dict__)
        seg.lo = self.lo if lo is None else lo
        seg.hi = self.hi if hi is None else hi
        seg.kind, seg.kappa = kind, kappa
        if kind != "plain":
            span = seg.hi - seg.lo
            seg.sig_end = span ** (1.0 / kappa)
            seg.sig_floor = (1e-14 * span) ** (1.0 / kappa)
        return seg

    # sigma <-> t
    def sigma_range(self):
        if self.kind == "plain":
            return self.lo, self.hi
        if self.kind == "lo":
            return 0.0, self.sig_end
        return self.sig_end, 0.0  # 'hi': sigma decreases as t increases

    def t_of(self, sig):
        if self.kind == "plain":
            return sig
        if self.kind == "lo":
            return self.lo + sig**self.kappa
        return self.hi - sig**self.kappa

    def sigma_of(self, t):
        if self.kind == "plain":
            return t
        if self.kind == "lo":
            return np.maximum(t - self.lo, 0.0) ** (1.0 / self.kappa)
        return np.maximum(self.hi - t, 0.0) ** (1.0 / self.kappa)

    def dt_dsigma(self, sig):
        if self.kind == "plain":
            return 1.0
        d = self.kappa * sig ** (self.kappa - 1.0)
        return d if self.kind == "lo" else -d

    def matrix(self, t):
        st = self.stack
        if self.constant:
            return st[0]
        s = t - self.lo
        out = st[-1].copy()
        for j in range(st.shape[0] - 2, -1, -1):
            out *= s
            out += st[j]
        if self.extra:
            out = out.copy()
            for k, c, piece in self.extra:
                out[k, c] += complex(piece(t))
        return out


def _forcing_exponents(forcing, lo, hi):
    e_lo = e_hi = 0.0
    mid = 0.5 * (lo + hi)
    for f in forcing or ():
        if isinstance(f, PiecewiseCoefficient):
            piece = f.pieces[int(f.piece_index(mid))]
            e_lo = min(e_lo, _singular_exponent(piece, lo))
            e_hi = min(e_hi, _singular_exponent(piece, hi))
    return e_lo, e_hi


def _compiled_segments(A, lo, hi, extra_exponents=(0.0, 0.0)):
    cache = A.__dict__.setdefault("_segment_cache", {})
    key = (lo, hi, tuple(extra_exponents))
    if key not in cache:
        base = _Segment(A, lo, hi)
        e_lo = min(base.exponents[0], extra_exponents[0])
        e_hi = min(base.exponents[1], extra_exponents[1])
        for e in (e_lo, e_hi):
            if e <= -1:
                raise NonIntegrableError("coefficient singularity is not integrable")
        if e_lo < 0 and e_hi < 0:
            mid = 0.5 * (lo + hi)
            segs = [
                base.with_map("lo", 1.0 / (1.0 + e_lo), lo, mid),
                base.with_map("hi", 1.0 / (1.0 + e_hi), mid, hi),
            ]
        elif e_lo < 0:
            segs = [base.with_map("lo", 1.0 / (1.0 + e_lo))]
        elif e_hi < 0:
            segs = [base.with_map("hi", 1.0 / (1.0 + e_hi))]
        else:
            segs = [base]
        cache[key] = segs
    return cache[key]


class _Forcing:
    """``phi(t)`` restricted to one subinterval: last row ``i**(-m) f_j(t)``."""

    def __init__(self, funcs, lo, hi, m):
        self.factor = ipow(-m)
        mid = 0.5 * (lo + hi)
        self.parts = []
        for f in funcs:
            if f is None:
                self.parts.append(None)
            elif isinstance(f, PiecewiseCoefficient):
                self.parts.append(f.pieces[int(f.piece_index(mid))])
            else:
                self.parts.append(f)

    def __call__(self, t):
        vals = np.zeros(len(self.parts), dtype=complex)
        for j, f in enumerate(self.parts):
            if f is not None:
                vals[j] = complex(np.asarray(f(t)).reshape(-1)[0])
        return self.factor * vals


# -- Dormand-Prince core ----------------------------------------------------


class _DenseSegment:
    """Dense output of one subinterval (in the integration variable sigma)."""

    def __init__(self, seg, sig0, hs, y0, q, logs):
        self.seg = seg
        self.lo, self.hi = seg.lo, seg.hi
        self.sig0 = np.asarray(sig0)
        self.hs = np.asarray(hs)
        self.y0 = np.asarray(y0)
        self.q = np.asarray(q)
        self.logs = np.asarray(logs)
        left = np.minimum(self.sig0, self.sig0 + self.hs)
        self.order = np.argsort(left)
        self.left = left[self.order]

    def step_edges_t(self):
        sig = np.concatenate([self.sig0, self.sig0[-1:] + self.hs[-1:]])
        return np.sort(self.seg.t_of(sig))

    def evaluate(self, t, derivative=False):
        """States at ``t`` (1-d array), shape ``(len(t), L, m, p)``."""
        sig = self.seg.sigma_of(np.asarray(t, dtype=float))
        k = np.searchsorted(self.left, sig, side="right") - 1
        k = self.order[np.clip(k, 0, len(self.left) - 1)]
        h = self.hs[k]
        theta = (sig - self.sig0[k]) / h
        powers = np.stack([theta, theta**2, theta**3, theta**4], axis=0)  # (4, n)
        q = self.q[k]  # (n, 4, L, m, p)
        scale = np.exp(self.logs[k])[:, :, None, None]  # (n, L, 1, 1)
        if not derivative:
            inc = np.einsum("jn,njlmp->nlmp", powers, q)
            return (self.y0[k] + h[:, None, None, None] * inc) * scale
        dpow = np.stack([np.ones_like(theta), 2 * theta, 3 * theta**2, 4 * theta**3], axis=0)
        dsig = np.einsum("jn,njlmp->nlmp", dpow, q) * scale
        dt = np.asarray(self.seg.dt_dsigma(np.maximum(sig, 1e-300)), dtype=float)
        dt = np.broadcast_to(dt, sig.shape)
        return dsig / dt[:, None, None, None]


def _run_segment(seg, forcing, y, lam_shift, rtol, atol, h_abs, forward, dense, rescale, logs):
    s_lo, s_hi = seg.sigma_range()
    s_from, s_to = (s_lo, s_hi) if forward else (s_hi, s_lo)
    direction = 1.0 if s_to > s_from else -1.0
    span = abs(s_to - s_from)
    floor = getattr(seg, "sig_floor", 0.0)

    def rhs(sig, w):
        se = sig if seg.kind == "plain" else max(sig, floor)
        t = seg.t_of(se)
        out = seg.matrix(t) @ w
        out[:, -1, :] += lam_shift[:, None] * w[:, 0, :]
        if forcing is not None:
            out[:, -1, :] += forcing(t)[None, :]
        d = seg.dt_dsigma(se)
        if d != 1.0:
            out *= d
        return out

    sig = s_from
    f0 = rhs(sig, y)
    if h_abs is None:
        scale0 = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean(np.abs(y / scale0) ** 2))
        d1 = np.sqrt(np.mean(np.abs(f0 / scale0) ** 2))
        h_abs = 1e-3 * span if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h_abs = min(max(h_abs, 1e-8 * span), span)
    K = np.empty((7,) + y.shape, dtype=complex)
    rec = ([], [], [], [], []) if dense else None
    while True:
        remaining = abs(s_to - sig)
        if remaining <= 1e-14 * max(span, abs(s_to)):
            break
        last = h_abs >= remaining
        h_try = remaining if last else h_abs
        h = direction * h_try
        K[0] = f0
        for s in range(1, 6):
            dy = np.tensordot(_A[s, :s], K[:s], axes=1) * h
            K[s] = rhs(sig + _C[s] * h, y + dy)
        y_new = y + h * np.tensordot(_B, K[:6], axes=1)
        f_new = rhs(sig + h, y_new)
        K[6] = f_new
        err = h * np.tensordot(_E, K, axes=1)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        en = np.sqrt(np.mean(np.abs(err / sc) ** 2, axis=tuple(range(1, y.ndim))))
        en = float(np.max(en))
        if not np.isfinite(en):
            en = math.inf
        if en <= 1.0:
            if dense:
                rec[0].append(sig)
                rec[1].append(h)
                rec[2].append(y.copy())
                rec[3].append(np.tensordot(_P.T, K, axes=(1, 0)))
                rec[4].append(logs.copy())
            sig = s_to if last else sig + h
            y, f0 = y_new, f_new
            if rescale:
                nrm = np.max(np.abs(y), axis=tuple(range(1, y.ndim)))
                big = nrm > _RESCALE_AT
                if np.any(big):
                    fac = np.where(big, nrm, 1.0)
                    y = y / fac[:, None, None]
                    f0 = f0 / fac[:, None, None]
                    logs = logs + np.log(fac)
            factor = 10.0 if en == 0 else min(10.0, 0.9 * en**-0.2)
            h_abs = h_try * factor if not last else max(h_abs, h_try)
        else:
            h_abs = h_try * max(0.2, 0.9 * en**-0.2)
            if h_abs < 1e-13 * max(1.0, abs(sig)) or h_abs < 1e-15 * span:
                raise IntegrationError(
                    "step size underflow", location=float(seg.t_of(sig))
                )
    dense_seg = None
    if dense:
        dense_seg = _DenseSegment(seg, *[np.array(r) for r in rec])
    return y, logs, h_abs, dense_seg


def _forcing_breakpoints(forcing):
    out = []
    for f in forcing or ():
        if f is not None and hasattr(f, "breakpoints"):
            out.append(np.asarray(f.breakpoints, dtype=float))
    return out


def _check_forcing(forcing):
    for f in forcing or ():
        if isinstance(f, PiecewiseCoefficient):
            from .coefficients import l1_norm

            l1_norm(f)


def integrate(A, lams, y0, t0, t1, forcing=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
              dense=False, rescale=None):
    """Integrate ``w' = A_lam w + phi`` from ``t0`` to ``t1`` for every ``lam``.

    Parameters
    ----------
    A : ShinZettlMatrix
    lams : array_like, shape (L,)
    y0 : array_like, shape (L, m, p) or (m, p)
    forcing : list of p callables (or None), optional
        ``f_j``; the inhomogeneity of column ``j`` is ``i**(-m) f_j`` in the
        last row.

    Returns
    -------
    y1 : ndarray (L, m, p)
        Scaled end state; the true state is ``exp(logs) * y1``.
    logs : ndarray (L,)
    segments : list of _DenseSegment (empty unless ``dense``)
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    y = np.asarray(y0, dtype=complex)
    if y.ndim == 2:
        y = np.broadcast_to(y, (lams.size,) + y.shape).copy()
    else:
        y = y.copy()
    if rescale is None:
        rescale = forcing is None or all(f is None for f in forcing)
    if forcing is not None and all(f is None for f in forcing):
        forcing = None
    lo, hi = min(t0, t1), max(t0, t1)
    if lo < A.a - 1e-13 * (A.b - A.a) or hi > A.b + 1e-13 * (A.b - A.a):
        raise DomainError(f"[{lo}, {hi}] is not inside [{A.a}, {A.b}]")
    br = merge_breakpoints(A.breakpoints, *_forcing_breakpoints(forcing), [t0, t1])
    br = br[(br >= lo) & (br <= hi)]
    forward = t1 >= t0
    pairs = list(zip(br[:-1], br[1:]))
    if not forward:
        pairs = pairs[::-1]
    lam_shift = ipow(-A.m) * lams
    logs = np.zeros(lams.size)
    h_abs = None
    dense_out = []
    for s_lo, s_hi in pairs:
        segs = _compiled_segments(A, s_lo, s_hi, _forcing_exponents(forcing, s_lo, s_hi))
        if not forward:
            segs = segs[::-1]
        for seg in segs:
            frc = None if forcing is None else _Forcing(forcing, seg.lo, seg.hi, A.m)
            if seg.kind != "plain":
                h_abs = None
            y, logs, h_abs, dseg = _run_segment(
                seg, frc, y, lam_shift, rtol, atol, h_abs, forward, dense, rescale, logs
            )
            if seg.kind != "plain":
                h_abs = None
            if dense:
                dense_out.append(dseg)
    return y, logs, dense_out


# -- solutions --------------------------------------------------------------


def _matrix_values(A, t):
    """``A(t)`` for an array of points, shape ``(n, m, m)``."""
    out = np.zeros((t.size, A.m, A.m), dtype=complex)
    for k, row in enumerate(A.entries):
        for s, c in enumerate(row):
            if c is not None:
                out[:, k, s] = c(t)
    return out


class Trajectory:
    """Dense solution of a Cauchy problem (single ``lam``).

    Calling the trajectory returns the state ``(D[0]y, ..., D[m-1]y)`` at
    ``t``; the state has shape ``(m,)`` for one column or ``(m, p)``.
    """

    def __init__(self, A, lam, forcing, initial, c, segments, rtol, atol, factor=1.0):
        self.A = A
        self.m = A.m
        self.lam = complex(lam)
        self.forcing = forcing
        self.initial = np.asarray(initial)
        self.c = float(c)
        self.segments = sorted(segments, key=lambda s: s.lo)
        self.rtol, self.atol = rtol, atol
        self.factor = factor
        self._lo = np.array([s.lo for s in self.segments])

    @property
    def columns(self):
        return self.initial.shape[-1]

    @property
    def interval(self):
        return (self.A.a, self.A.b)

    @property
    def breakpoints(self):
        return np.unique(np.concatenate([[s.lo, s.hi] for s in self.segments]))

    def step_grid(self):
        """All integrator step boundaries (in ``t``)."""
        return np.unique(np.concatenate([s.step_edges_t() for s in self.segments]))

    def scaled(self, s):
        out = object.__new__(Trajectory)
        out.__dict__.update(self.__dict__)
        out.factor = self.factor * s
        if out.forcing is not None:
            out.forcing = [None if f is None else _Scaled(f, s) for f in out.forcing]
        return out

    def _states(self, t, derivative=False):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a, b = self.interval
        slack = 1e-12 * (b - a)
        if np.any(t < a - slack) or np.any(t > b + slack):
            raise DomainError(f"t outside [{a}, {b}]")
        t = np.clip(t, a, b)
        idx = np.clip(np.searchsorted(self._lo, t, side="right") - 1, 0, len(self.segments) - 1)
        out = np.empty((t.size, self.m, self.columns), dtype=complex)
        for k in np.unique(idx):
            sel = idx == k
            out[sel] = self.segments[k].evaluate(t[sel], derivative)[:, 0]
        return out * self.factor

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        out = self._states(t)
        if self.columns == 1:
            out = out[..., 0]
        return out[0] if scalar else out

    def derivative(self, t):
        """Derivative of the dense interpolant with respect to ``t``."""
        scalar = np.ndim(t) == 0
        out = self._states(t, derivative=True)
        if self.columns == 1:
            out = out[..., 0]
        return out[0] if scalar else out

    def forcing_values(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        vals = np.zeros((t.size, self.columns), dtype=complex)
        if self.forcing is not None:
            for j, f in enumerate(self.forcing):
                if f is not None:
                    vals[:, j] = np.asarray(f(t), dtype=complex).reshape(t.size)
        return vals

    def top(self, t):
        """``D[m]y = i**(-m) (lam y + f)`` along the solution."""
        scalar = np.ndim(t) == 0
        y = self._states(t)[:, 0, :]
        out = ipow(-self.m) * (self.lam * y + self.forcing_values(t))
        if self.columns == 1:
            out = out[:, 0]
        return out[0] if scalar else out

    def l_values(self, t):
        """``l(y) = lam y + f`` along the solution."""
        y = self._states(np.atleast_1d(t))[:, 0, :]
        out = self.lam * y + self.forcing_values(np.atleast_1d(t))
        return out[:, 0] if self.columns == 1 else out

    def residual(self, t):
        """``w' - A_lam w - phi`` from the interpolant derivative, shape ``(n, m, p)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        w = self._states(t)
        dw = self._states(t, derivative=True)
        rhs = _matrix_values(self.A, t) @ w
        rhs[:, -1, :] += ipow(-self.m) * (self.lam * w[:, 0, :] + self.forcing_values(t))
        return dw - rhs

    def equation_residual(self):
        """``L2`` norm of ``w' - A_lam w - phi`` over ``[a, b]``.

        The last component is ``i**(-m) ((l - lam) y - f)``, so this bounds
        the defect of the differential equation itself.
        """
        return l2_norm_on(lambda t: self.residual(t), self.step_grid())

    def midpoint_residual(self):
        """Largest relative residual ``|w' - A_lam w - phi| / (|w| + |w'|)`` at step midpoints."""
        g = self.step_grid()
        mid = 0.5 * (g[1:] + g[:-1])
        res = np.abs(self.residual(mid))
        scale = np.abs(self._states(mid)) + np.abs(self._states(mid, derivative=True))
        return float(np.max(res / np.maximum(scale, self.atol)))

    def boundary_data(self):
        """``(D[0..m-1]y(a), D[0..m-1]y(b))`` stacked, shape ``(2m,)`` or ``(2m, p)``."""
        a, b = self.interval
        wa = self._states(a)[0]
        wb = self._states(b)[0]
        out = np.concatenate([wa, wb], axis=0)
        if self.columns == 1:
            out = out[:, 0]
        if self.c == a and self.factor == 1.0:
            out[: self.m] = self.initial if self.columns > 1 else self.initial[:, 0]
        return out

    def as_function(self, component=0):
        return _Component(self, component)


class _Scaled:
    def __init__(self, f, s):
        self.f, self.s = f, s
        if hasattr(f, "breakpoints"):
            self.breakpoints = f.breakpoints

    def __call__(self, t):
        return self.s * np.asarray(self.f(t))


class _Component:
    """One quasi-derivative of a single-column trajectory as a plain function."""

    def __init__(self, traj, component):
        self.traj, self.component = traj, component
        self.breakpoints = traj.step_grid()
        self.interval = traj.interval

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        out = self.traj._states(t)[:, self.component, 0]
        return out[0] if scalar else out


class FundamentalSolution(Trajectory):
    """``Phi(t; lam)`` with ``Phi(a) = I``; calling returns an ``(m, m)`` matrix."""


def _as_forcing(f):
    if f is None:
        return None
    return [f]


def solve_cauchy(A, lam, f=None, c=None, alpha=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Solve ``l(y) - lam y = f`` with ``D[k]y(c) = alpha[k]``.

    Returns a single-column :class:`Trajectory` on all of ``[a, b]``.
    """
    m = A.m
    c = A.a if c is None else float(c)
    if not A.a <= c <= A.b:
        raise DomainError(f"c={c} outside [{A.a}, {A.b}]")
    alpha = np.zeros(m, complex) if alpha is None else np.asarray(alpha, dtype=complex)
    if alpha.shape != (m,):
        raise DomainError(f"need {m} initial values")
    forcing = _as_forcing(f)
    _check_forcing(forcing)
    y0 = alpha.reshape(1, m, 1)
    segs = []
    for t_end in (A.b, A.a):
        if t_end == c:
            continue
        _, _, dense = integrate(A, [lam], y0, c, t_end, forcing, rtol * _DENSE_TIGHTEN,
                                atol * _DENSE_TIGHTEN, dense=True, rescale=False)
        segs.extend(dense)
    return Trajectory(A, lam, forcing, alpha.reshape(m, 1), c, segs, rtol, atol)


def fundamental_matrix(A, lam, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Fundamental matrix with ``Phi(a) = I`` and dense output on ``[a, b]``."""
    m = A.m
    eye = np.eye(m, dtype=complex)
    _, _, dense = integrate(A, [lam], eye, A.a, A.b, None, rtol * _DENSE_TIGHTEN,
                            atol * _DENSE_TIGHTEN, dense=True, rescale=False)
    return FundamentalSolution(A, lam, None, eye, A.a, dense, rtol, atol)


def fundamental_batch(A, lams, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, jobs=1):
    """``Phi(b; lam)`` for many ``lam`` at once.

    Returns ``(phi, logs)`` with ``Phi(b; lam_l) = exp(logs[l]) * phi[l]``.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    eye = np.eye(A.m, dtype=complex)
    # the partition depends only on lams, so results do not depend on jobs
    chunks = [lams[i:i + BATCH_CHUNK] for i in range(0, lams.size, BATCH_CHUNK)]

    def work(ch):
        return integrate(A, ch, eye, A.a, A.b, None, rtol, atol)[:2]

    if jobs <= 1 or len(chunks) < 2:
        parts = [work(ch) for ch in chunks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, chunks))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def dense_eval(sol, t, top=False):
    """State of ``sol`` at ``t``; with ``top=True`` also ``D[m]y``."""
    w = sol(t)
    if not top:
        return w
    return w, sol.top(t)


def write_csv(sol, path, t):
    """Dump ``t, Re w_1, Im w_1, ..., Re w_m, Im w_m`` (first column only)."""
    t = np.asarray(t, dtype=float)
    w = sol._states(t)[:, :, 0]
    header = ["t"]
    for k in range(1, sol.m + 1):
        header += [f"Re w_{k}", f"Im w_{k}"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for ti, row in zip(t, w):
            vals = [repr(float(ti))]
            for v in row:
                vals += [repr(float(v.real)), repr(float(v.imag))]
            writer.writerow(vals)
