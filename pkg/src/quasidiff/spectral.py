"""Eigenvalues, eigenfunctions and resolvents of extensions ``L_K``.

Everything is driven by the characteristic matrix ``M(lam) = B V(lam)``, where
``B`` is the boundary-condition matrix of the extension and the columns of
``V(lam) = [I; Phi(b; lam)]`` are the boundary data of the fundamental
system.  ``lam`` is an eigenvalue exactly when ``M(lam)`` is singular.

Singularity is measured by ``sigma_min(B Q(lam)) / ||B||``, where ``Q`` has
orthonormal columns spanning the same subspace as ``V``.  ``B Q`` is singular
exactly when ``B V`` is (they differ by an invertible right factor), but the
measure is not distorted by exponential growth of the solutions and stays
meaningful when ``M`` vanishes entirely (multiplicity ``m``).  The analytic
determinant ``det(B V)`` is used only for the argument principle.
"""

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContourError,
    NotAnEigenvalueError,
    NotContractionError,
    NotUnitaryError,
    ResolventPoleError,
    SpectralDomainError,
    TooManyEigenvaluesError,
    ValidityError,
)
from .extensions import CONTRACTION_TOL, ExtensionSpec, boundary_condition_matrix
from .ode import DEFAULT_ATOL, DEFAULT_RTOL, fundamental_batch, solve_cauchy
from .shinzettl import is_formally_selfadjoint
from .quadrature import integrate_doubling, l2_norm_on

# -- options and results ----------------------------------------------------


@dataclass
class ScanOptions:
    """Tunable parameters shared by the eigenvalue searches.

    Attributes
    ----------
    grid : int
        Points of the initial real grid.
    threshold : float
        Acceptance bound on ``sigma_min / sigma_max``.
    mult_tol : float
        Singular values below ``mult_tol * sigma_max`` count towards the
        multiplicity.
    """

    grid: int = 400
    threshold: float = 1e-8
    mult_tol: float = 1e-6
    max_eigenvalues: int = 200
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    jobs: int = 1
    edge_points: int = 32
    max_depth: int = 14
    contour_retries: int = 3

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class Eigenvalue:
    lam: complex
    multiplicity: int
    residual: float
    extrapolation_uncertainty: float = 0.0

    def to_dict(self):
        return {
            "re": float(self.lam.real),
            "im": float(self.lam.imag),
            "mult": int(self.multiplicity),
            "residual": float(self.residual),
        }


@dataclass
class SpectralResult:
    eigenvalues: list
    meta: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.eigenvalues.sort(key=lambda e: (e.lam.real, e.lam.imag))

    @property
    def values(self):
        return np.array([e.lam for e in self.eigenvalues], dtype=complex)

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    def to_dict(self):
        return {
            "eigenvalues": [e.to_dict() for e in self.eigenvalues],
            "meta": self.meta,
            "warnings": list(self.warnings),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["re", "im", "mult", "residual"])
        for e in self.eigenvalues:
            writer.writerow([repr(float(e.lam.real)), repr(float(e.lam.imag)),
                             int(e.multiplicity), repr(float(e.residual))])
        return buf.getvalue()


# -- characteristic matrix --------------------------------------------------


@dataclass
class CharacteristicMatrix:
    """``M(lam) = exp(log_scale) * scaled``."""

    scaled: np.ndarray
    log_scale: float
    ratio: float

    @property
    def value(self):
        return self.scaled * math.exp(self.log_scale)

    def __array__(self, dtype=None, copy=None):
        out = self.value
        return out if dtype is None else out.astype(dtype)

    def logdet(self):
        """``(log|det M|, arg det M)``."""
        d = np.linalg.det(self.scaled)
        m = self.scaled.shape[0]
        if d == 0:
            return -math.inf, 0.0
        return math.log(abs(d)) + m * self.log_scale, float(np.angle(d))


class _Evaluator:
    """Batched evaluation of the scaled characteristic matrix."""

    def __init__(self, A, B, rtol, atol, jobs=1):
        self.A, self.B = A, np.asarray(B, dtype=complex)
        self.m = A.m
        self.rtol, self.atol, self.jobs = rtol, atol, jobs
        self.bnorm = float(np.linalg.norm(self.B, 2))
        self.calls = 0

    def data(self, lams):
        """Scaled ``V`` (``(L, 2m, m)``) and log scales."""
        lams = np.atleast_1d(np.asarray(lams, dtype=complex))
        phi, logs = fundamental_batch(self.A, lams, self.rtol, self.atol, self.jobs)
        self.calls += lams.size
        m = self.m
        V = np.empty((lams.size, 2 * m, m), dtype=complex)
        V[:, :m, :] = np.exp(-logs)[:, None, None] * np.eye(m)
        V[:, m:, :] = phi
        return V, logs

    def scaled(self, lams):
        V, logs = self.data(lams)
        return self.B @ V, logs, V

    @staticmethod
    def orthonormal(V):
        U, _, Wh = np.linalg.svd(V, full_matrices=False)
        return U @ Wh

    def balanced(self, lams):
        V, logs = self.data(lams)
        Q = self.orthonormal(V)
        return self.B @ Q, Q, V, logs

    def ratios(self, lams):
        Mb, _, _, _ = self.balanced(lams)
        s = np.linalg.svd(Mb, compute_uv=False)
        return s[:, -1] / self.bnorm


def _ratio_and_mult(Mb, bnorm, mult_tol):
    s = np.linalg.svd(Mb, compute_uv=False)
    ratio = s[-1] / bnorm
    mult = int(np.sum(s < mult_tol * bnorm))
    return float(ratio), max(mult, 1)


def _check_selfadjoint(A):
    if not is_formally_selfadjoint(A, atol=1e-12):
        warnings.warn("the expression is not formally self-adjoint; results may be meaningless")


def characteristic_matrix(A, spec, T, lam, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """``M(lam) = B [I; Phi(b; lam)]`` with its log-scale factor and singularity ratio."""
    _check_selfadjoint(A)
    B = boundary_condition_matrix(spec, T)
    ev = _Evaluator(A, B, rtol, atol)
    V, logs = ev.data([lam])
    Mb = B @ ev.orthonormal(V)[0]
    ratio, _ = _ratio_and_mult(Mb, ev.bnorm, 1e-6)
    return CharacteristicMatrix(B @ V[0], float(logs[0]), ratio)


# -- real scan --------------------------------------------------------------


def _local_minima(r):
    idx = []
    n = r.size
    for i in range(n):
        left = r[i - 1] if i > 0 else math.inf
        right = r[i + 1] if i < n - 1 else math.inf
        if r[i] < left and r[i] <= right:
            idx.append(i)
    return idx


def _refine_real(ev, brackets, x0, opts):
    """Safeguarded Newton on ``sigma_min`` with a derivative-sign bracket.

    ``sigma_min`` of the balanced matrix has a V-shaped minimum at a simple
    eigenvalue; its derivative ``Re(u^H M' v)`` changes sign there, which
    keeps a bisection bracket, and the Newton step on the V lands on the
    vertex.
    """
    lo = np.array([b[0] for b in brackets], dtype=float)
    hi = np.array([b[1] for b in brackets], dtype=float)
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    done = np.zeros(x.size, dtype=bool)
    for _ in range(80):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        xa = x[act]
        h = 1e-6 * np.maximum(1.0, np.abs(xa))
        pts = np.concatenate([xa, xa + h, xa - h])
        V, logs = ev.data(pts)
        k = act.size
        # B V(lam) N0 with N0 = (V0^H V0)^(-1/2) frozen at the centre is analytic
        # in lam, equals the balanced matrix at the centre and is singular
        # exactly when M is
        Vc = V[:k]
        Vp = V[k:2 * k] * np.exp(logs[k:2 * k] - logs[:k])[:, None, None]
        Vm = V[2 * k:] * np.exp(logs[2 * k:] - logs[:k])[:, None, None]
        _, s0, Wh0 = np.linalg.svd(Vc, full_matrices=False)
        N0 = (np.conj(np.swapaxes(Wh0, 1, 2)) / s0[:, None, :]) @ Wh0
        M0 = ev.B @ (Vc @ N0)
        dM = ev.B @ ((Vp - Vm) @ N0) / (2 * h)[:, None, None]
        U, s, Vh = np.linalg.svd(M0)
        u = U[:, :, -1]
        v = np.conj(Vh[:, -1, :])
        sig = s[:, -1] / ev.bnorm
        slope = np.real(np.einsum("li,lij,lj->l", np.conj(u), dM, v)) / ev.bnorm
        for j, i in enumerate(act):
            if slope[j] > 0:
                hi[i] = min(hi[i], xa[j])
            elif slope[j] < 0:
                lo[i] = max(lo[i], xa[j])
            step = -sig[j] / slope[j] if slope[j] != 0 else math.inf
            new = xa[j] + step
            if not (lo[i] < new < hi[i]) or not np.isfinite(new):
                new = 0.5 * (lo[i] + hi[i])
            tol = 1e-10 * max(1.0, abs(xa[j]))
            if abs(new - xa[j]) < tol or hi[i] - lo[i] < tol:
                done[i] = True
            x[i] = new
    return x, done


def eigenvalues_real_scan(A, spec, T, window, opts=None):
    """Real eigenvalues of a self-adjoint extension inside ``window``.

    A grid of ``opts.grid`` points is scanned for local minima of
    ``sigma_min / sigma_max``, each dip is resampled to split close pairs,
    and every candidate is refined until ``|d lam| < 1e-10 max(1, |lam|)``.
    """
    opts = ScanOptions() if opts is None else opts
    if not spec.is_unitary:
        raise NotUnitaryError("real scan needs a unitary K; use eigenvalues_complex_box")
    _check_selfadjoint(A)
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise SpectralDomainError("window must satisfy lo < hi")
    B = boundary_condition_matrix(spec, T)
    ev = _Evaluator(A, B, opts.rtol, opts.atol, opts.jobs)
    grid = np.linspace(lo, hi, opts.grid)
    r = ev.ratios(grid)
    step = grid[1] - grid[0]
    warn = []

    # resample each dip on a finer local grid to separate clustered minima
    cands = []
    mins = _local_minima(r)
    if mins:
        sub_n = 9
        subs = [np.linspace(grid[i] - step, grid[i] + step, sub_n) for i in mins]
        rs = ev.ratios(np.concatenate(subs)).reshape(len(mins), sub_n)
        for i, sg, sr in zip(mins, subs, rs):
            local = _local_minima(sr)
            inner = [j for j in local if 0 < j < sub_n - 1] or [int(np.argmin(sr))]
            for j in inner:
                a_, b_ = sg[max(j - 1, 0)], sg[min(j + 1, sub_n - 1)]
                cands.append(((a_, b_), sg[j], sr[j]))
            if len(inner) > 1 and sg[1] - sg[0] < 1e-12 * max(1.0, abs(sg[0])):
                warn.append(f"unresolved cluster in [{sg[0]!r}, {sg[-1]!r}]")

    result = []
    if cands:
        brackets = [c[0] for c in cands]
        x0 = [c[1] for c in cands]
        x, done = _refine_real(ev, brackets, x0, opts)
        Mb, _, _, _ = ev.balanced(x)
        for xi, ok, Mi in zip(x, done, Mb):
            ratio, mult = _ratio_and_mult(Mi, ev.bnorm, opts.mult_tol)
            if ratio >= opts.threshold:
                continue
            if xi < lo - 1e-12 * max(1, abs(lo)) or xi > hi + 1e-12 * max(1, abs(hi)):
                continue
            if not ok:
                warn.append(f"refinement did not converge near {xi!r}")
            if any(abs(e.lam.real - xi) < 1e-7 * max(1.0, abs(xi)) for e in result):
                continue
            result.append(Eigenvalue(complex(xi, 0.0), mult, ratio, 0.0))
    if len(result) > opts.max_eigenvalues:
        raise TooManyEigenvaluesError(
            f"{len(result)} eigenvalues in the window exceed the limit {opts.max_eigenvalues};"
            " use a smaller window", count=len(result)
        )
    meta = {
        "method": "real-scan",
        "grid": {"lo": lo, "hi": hi, "points": opts.grid},
        "tolerances": {"rtol": opts.rtol, "atol": opts.atol, "threshold": opts.threshold},
        "evaluations": ev.calls,
    }
    return SpectralResult(result, meta, warn)


# -- complex box ------------------------------------------------------------


class _OnContour(Exception):
    pass


def _contour_log(ev, lams):
    """``log det(B V)`` up to the positive scale, plus balanced ratios."""
    M, logs, V = ev.scaled(lams)
    d = np.linalg.det(M)
    Q = ev.orthonormal(V)
    s = np.linalg.svd(ev.B @ Q, compute_uv=False)
    ratio = s[:, -1] / ev.bnorm
    with np.errstate(divide="ignore"):
        logabs = np.log(np.abs(d)) + ev.m * logs
    return logabs, np.angle(d), ratio


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def _winding(ev, cell, opts):
    """Argument-principle count for the rectangle ``cell``; also the first moment."""
    x0, x1, y0, y1 = cell
    n = opts.edge_points
    s = np.linspace(0.0, 1.0, n + 1)
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    pts = []
    for k in range(4):
        z0, z1 = corners[k], corners[(k + 1) % 4]
        pts.append(z0 + (z1 - z0) * s[:-1])
    path = np.concatenate(pts + [np.array([corners[0]])])
    la, ph, ratio = _contour_log(ev, path)
    for _ in range(12):
        if np.any(ratio < 1e-9) or not np.all(np.isfinite(la)):
            raise _OnContour()
        dph = _wrap(np.diff(ph))
        dla = np.diff(la)
        bad = np.flatnonzero((np.abs(dph) > np.pi / 4) | (np.abs(dla) > 1.0))
        if bad.size == 0:
            break
        mids = 0.5 * (path[bad] + path[bad + 1])
        la_m, ph_m, r_m = _contour_log(ev, mids)
        path = np.insert(path, bad + 1, mids)
        la = np.insert(la, bad + 1, la_m)
        ph = np.insert(ph, bad + 1, ph_m)
        ratio = np.insert(ratio, bad + 1, r_m)
    else:
        raise ContourError("phase could not be resolved along the contour", cell=list(cell))
    dph = _wrap(np.diff(ph))
    total = float(np.sum(dph)) / (2 * np.pi)
    count = int(round(total))
    if abs(total - count) > 0.2:
        raise ContourError("winding number is not close to an integer", value=total)
    dlog = np.diff(la) + 1j * dph
    mid = 0.5 * (path[1:] + path[:-1])
    moment = complex(np.sum(mid * dlog) / (2j * np.pi))
    return count, moment


def _count_with_retry(ev, cell, opts, outer):
    x0, x1, y0, y1 = cell
    w, hgt = x1 - x0, y1 - y0
    for attempt in range(opts.contour_retries + 1):
        try:
            return _winding(ev, cell, opts), cell
        except _OnContour:
            if attempt == opts.contour_retries:
                break
            f = 0.0037 * (attempt + 1)
            if outer:
                cell = (x0 - f * w, x1 + f * w, y0 - f * hgt, y1 + f * hgt)
            else:
                cell = (x0 + f * w, x1 + f * w, y0 + f * hgt, y1 + f * hgt)
    raise ContourError("zero of the characteristic determinant on or near the contour",
                       cell=list(cell))


def _newton_det(ev, lam, k, opts, iters=40):
    """Newton on ``det M`` with multiplicity ``k``: ``lam -= k D / D'``."""
    for _ in range(iters):
        h = 1e-6 * max(1.0, abs(lam))
        M, logs, _ = ev.scaled([lam, lam + h, lam - h])
        Mp = M[1] * math.exp(logs[1] - logs[0])
        Mm = M[2] * math.exp(logs[2] - logs[0])
        dM = (Mp - Mm) / (2 * h)
        try:
            tr = np.trace(np.linalg.solve(M[0], dM))
        except np.linalg.LinAlgError:
            return lam, True
        if tr == 0 or not np.isfinite(tr):
            return lam, True
        step = k / tr
        lam = lam - step
        if abs(step) < 1e-12 * max(1.0, abs(lam)):
            return lam, True
    return lam, False


def eigenvalues_complex_box(A, spec, T, box, opts=None):
    """Eigenvalues in a rectangle via the argument principle and Newton.

    Parameters
    ----------
    box : dict or tuple
        ``{re_lo, re_hi, im_lo, im_hi}`` or the same four numbers.
    """
    opts = ScanOptions() if opts is None else opts
    if not spec.is_contraction:
        raise NotContractionError("K is not a contraction", norm=spec.classification.norm)
    _check_selfadjoint(A)
    if isinstance(box, dict):
        cell = (box["re_lo"], box["re_hi"], box["im_lo"], box["im_hi"])
    else:
        cell = tuple(box)
    cell = tuple(float(v) for v in cell)
    if not (cell[1] > cell[0] and cell[3] > cell[2]):
        raise SpectralDomainError("box must have positive width and height")
    B = boundary_condition_matrix(spec, T)
    ev = _Evaluator(A, B, opts.rtol, opts.atol, opts.jobs)
    (total, _), cell = _count_with_retry(ev, cell, opts, outer=True)
    scale = max(1.0, abs(complex(cell[0], cell[2])), abs(complex(cell[1], cell[3])))
    warn, found = [], []
    if total > opts.max_eigenvalues:
        raise TooManyEigenvaluesError(f"{total} zeros in the box exceed the limit", count=total)
    fractions = (0.5371, 0.4629, 0.5813, 0.4187)

    def split(c):
        x0, x1, y0, y1 = c
        for f in fractions:
            try:
                if x1 - x0 >= y1 - y0:
                    xm = x0 + f * (x1 - x0)
                    parts = [(x0, xm, y0, y1), (xm, x1, y0, y1)]
                else:
                    ym = y0 + f * (y1 - y0)
                    parts = [(x0, x1, y0, ym), (x0, x1, ym, y1)]
                return [(_winding(ev, p, opts), p) for p in parts]
            except _OnContour:
                continue
        raise ContourError("could not place a subdivision line away from zeros", cell=list(c))

    stack = [(cell, None, 0)]
    while stack:
        c, known, depth = stack.pop()
        if known is None:
            (count, moment), c = _count_with_retry(ev, c, opts, outer=False)
        else:
            count, moment = known
        if count == 0:
            continue
        size = max(c[1] - c[0], c[3] - c[2])
        if count == 1 or depth >= opts.max_depth or size < 1e-7 * scale:
            start = moment / count
            lam, ok = _newton_det(ev, start, count, opts)
            if not ok:
                warn.append(f"Newton did not converge near {start!r}")
            Mb, _, _, _ = ev.balanced([lam])
            ratio, mult = _ratio_and_mult(Mb[0], ev.bnorm, opts.mult_tol)
            slack = 1e-6 * size
            inside = (c[0] - slack <= lam.real <= c[1] + slack) and (c[2] - slack <= lam.imag <= c[3] + slack)
            if ratio < opts.threshold and inside:
                found.append(Eigenvalue(complex(lam), max(mult, 1) if count == 1 else count, ratio))
            else:
                warn.append(f"zero near {start!r} not confirmed (ratio {ratio:.3e})")
            continue
        for known_part, part in split(c):
            stack.append((part, known_part, depth + 1))
    meta = {
        "method": "complex-box",
        "grid": {"box": list(cell), "edge_points": opts.edge_points},
        "tolerances": {"rtol": opts.rtol, "atol": opts.atol, "threshold": opts.threshold},
        "winding_number": total,
        "evaluations": ev.calls,
    }
    return SpectralResult(found, meta, warn)


# -- eigenfunctions ---------------------------------------------------------


def _l2_norm(traj):
    grid = traj.step_grid()
    val, _ = integrate_doubling(lambda t: np.abs(traj(t)[:, 0]) ** 2, grid)
    return math.sqrt(abs(val))


def eigenfunctions(A, spec, T, lam0, threshold=1e-8, mult_tol=1e-6,
                   rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Orthonormal eigenfunctions for an accepted eigenvalue ``lam0``."""
    B = boundary_condition_matrix(spec, T)
    ev = _Evaluator(A, B, rtol, atol)
    Mb, Q, V, logs = ev.balanced([lam0])
    U, s, Vh = np.linalg.svd(Mb[0])
    ratio = s[-1] / ev.bnorm
    if ratio >= threshold:
        raise NotAnEigenvalueError(f"sigma ratio {ratio:.3e} is above {threshold:g}",
                                   residual=float(ratio))
    k = max(1, int(np.sum(s < mult_tol * ev.bnorm)))
    X = np.conj(Vh[-k:, :]).T  # null directions in the orthonormal basis
    C = (Q[0] @ X)[: A.m, :]  # initial data at a
    C = C / np.linalg.norm(C, axis=0)
    trajs = [solve_cauchy(A, lam0, None, A.a, C[:, j], rtol, atol) for j in range(k)]
    grid = np.unique(np.concatenate([t.step_grid() for t in trajs]))
    G = np.empty((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            G[i, j] = integrate_doubling(
                lambda t, i=i, j=j: trajs[j](t)[:, 0] * np.conj(trajs[i](t)[:, 0]), grid
            )[0]
    L = np.linalg.cholesky(G)  # G = L L^H with G_ij = <y_j, y_i>
    coef = np.linalg.inv(L).conj().T  # columns combine y_j into orthonormal functions
    out = []
    for j in range(k):
        c = C @ coef[:, j]
        # phase: first initial value that is not null-vector noise is made positive
        lead = c[np.argmax(np.abs(c) > mult_tol * np.max(np.abs(c)))]
        c = c * (abs(lead) / lead)
        y = solve_cauchy(A, lam0, None, A.a, c, rtol, atol)
        y = y.scaled(1.0 / _l2_norm(y))
        y.meta = {"lam": complex(lam0), "ratio": float(ratio), "multiplicity": k}
        out.append(y)
    return out


def eigenfunction(A, spec, T, lam0, **kw):
    """First normalised eigenfunction (see :func:`eigenfunctions`)."""
    return eigenfunctions(A, spec, T, lam0, **kw)[0]


# -- resolvents -------------------------------------------------------------


def resolvent_apply(A, spec, T, lam, h, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, pole_tol=1e-10):
    """``y = R_lam h``: ``l(y) - lam y = h`` with ``B bv(y) = 0``.

    The returned trajectory carries ``meta`` with the boundary residual and
    the relative residual of the differential equation.
    """
    lam = complex(lam)
    B = boundary_condition_matrix(spec, T)
    ev = _Evaluator(A, B, rtol, atol)
    V, logs = ev.data([lam])
    Mb = B @ ev.orthonormal(V)[0]
    s = np.linalg.svd(Mb, compute_uv=False)
    ratio = s[-1] / ev.bnorm
    if ratio < pole_tol:
        raise ResolventPoleError(
            f"lam={lam!r} is (numerically) an eigenvalue: sigma ratio {ratio:.3e}",
            sigma_min=float(ratio),
        )
    yp = solve_cauchy(A, lam, h, A.a, None, rtol, atol)
    rhs = -(B @ yp.boundary_data())
    c = np.linalg.solve(B @ V[0], rhs) * math.exp(-logs[0])
    y = solve_cauchy(A, lam, h, A.a, c, rtol, atol)
    bc = float(np.linalg.norm(B @ y.boundary_data()))
    h_norm = l2_norm_on(h, y.step_grid()) if h is not None else 0.0
    y.meta = {
        "lam": lam,
        "sigma_ratio": float(ratio),
        "boundary_residual": bc,
        "equation_residual": y.equation_residual() / h_norm if h_norm else y.equation_residual(),
        "spec": spec.to_dict(),
    }
    return y


class ConstantFamily:
    """``K(lam) = K``."""

    holomorphy = "constant"

    def __init__(self, K):
        self.K = np.asarray(K, dtype=complex)

    def __call__(self, lam):
        return self.K


class MobiusFamily:
    """``K(lam) = (a lam + b) / (c lam + d) * K0``."""

    holomorphy = "rational"

    def __init__(self, K0, a, b, c, d):
        self.K0 = np.asarray(K0, dtype=complex)
        self.coeffs = tuple(complex(v) for v in (a, b, c, d))

    def __call__(self, lam):
        a, b, c, d = self.coeffs
        den = c * lam + d
        if den == 0:
            raise ValidityError("family has a pole at this lam", lam=complex(lam))
        return (a * lam + b) / den * self.K0


class TabulatedFamily:
    """Linear interpolation between the two tabulated points nearest to ``lam``.

    Not certified holomorphic.
    """

    holomorphy = "user-asserted"

    def __init__(self, lams, Ks):
        self.lams = np.asarray(lams, dtype=complex)
        self.Ks = np.asarray(Ks, dtype=complex)
        if self.lams.size < 1 or self.Ks.shape[0] != self.lams.size:
            raise ValidityError("need one matrix per tabulated point")

    def __call__(self, lam):
        if self.lams.size == 1:
            return self.Ks[0]
        order = np.argsort(np.abs(self.lams - lam))
        i, j = order[0], order[1]
        d = self.lams[j] - self.lams[i]
        t = np.real((lam - self.lams[i]) * np.conj(d)) / abs(d) ** 2
        t = min(max(t, 0.0), 1.0)
        return (1 - t) * self.Ks[i] + t * self.Ks[j]


def generalized_resolvent_apply(A, Kfamily, T, lam, h, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Apply the generalised resolvent for a contraction-valued family ``K(lam)``.

    For ``Im lam < 0`` the domain condition uses the plus sign and for
    ``Im lam > 0`` the minus sign.  Only the bound ``||K(lam)|| <= 1`` is
    checked; holomorphy of the family is taken on trust unless it is constant
    or rational.
    """
    lam = complex(lam)
    if lam.imag == 0:
        raise SpectralDomainError("generalized resolvent needs Im lam != 0", lam=lam)
    if not callable(Kfamily):
        Kfamily = ConstantFamily(Kfamily)
    K = np.asarray(Kfamily(lam), dtype=complex)
    norm = float(np.linalg.norm(K, 2))
    if norm > 1 + CONTRACTION_TOL:
        raise ValidityError(f"||K(lam)|| = {norm!r} > 1", lam=lam, norm=norm)
    sign = "plus" if lam.imag < 0 else "minus"
    spec = ExtensionSpec(K, sign)
    y = resolvent_apply(A, spec, T, lam, h, rtol, atol)
    y.meta.update({
        "half_plane": "lower" if lam.imag < 0 else "upper",
        "sign": sign,
        "K_norm": norm,
        "holomorphy": getattr(Kfamily, "holomorphy", "user-asserted"),
    })
    return y


# -- L2 helpers -------------------------------------------------------------


def l2_distance(u, v):
    """``||u - v||`` for two single-column trajectories on the same interval."""
    grid = np.unique(np.concatenate([u.step_grid(), v.step_grid()]))
    val, _ = integrate_doubling(lambda t: np.abs(u(t)[:, 0] - v(t)[:, 0]) ** 2, grid)
    return math.sqrt(abs(val))


def l2_norm(u, grid=None):
    """``||u||`` for a trajectory, or for a callable on a given grid."""
    if grid is None:
        return _l2_norm(u)
    val, _ = integrate_doubling(lambda t: np.abs(np.asarray(u(t))) ** 2, grid)
    return math.sqrt(abs(val))
