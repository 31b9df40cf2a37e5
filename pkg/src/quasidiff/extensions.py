"""Extensions of the minimal operator parameterised by a matrix ``K``.

With the plus sign the domain is ``(K - I) Gamma_1 y + i (K + I) Gamma_2 y =
0`` and with the minus sign ``(K - I) Gamma_1 y - i (K + I) Gamma_2 y = 0``.
A contraction gives a maximal dissipative (plus) or accumulative (minus)
extension and a unitary ``K`` a self-adjoint one.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PresetError, ShapeError

UNITARY_TOL = 1e-10
CONTRACTION_TOL = 1e-12
SYMMETRY_TOL = 1e-10
_NORM_NOISE = 64 * np.finfo(float).eps

_SIGNS = ("plus", "minus")


@dataclass(frozen=True)
class Classification:
    is_contraction: bool
    is_unitary: bool
    is_symmetric_matrix: bool
    is_block_diagonal: object  # True / False, or None when not applicable (odd m)
    norm: float

    def flags(self):
        out = set()
        for name in ("is_contraction", "is_unitary", "is_symmetric_matrix"):
            if getattr(self, name):
                out.add(name[3:])
        if self.is_block_diagonal is True:
            out.add("block_diagonal")
        elif self.is_block_diagonal is None:
            out.add("block_diagonal_not_applicable")
        return out


def _as_square(K):
    K = np.asarray(K, dtype=complex)
    if K.ndim == 0:
        K = K.reshape(1, 1)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ShapeError(f"K must be square, got shape {K.shape}")
    return K


def classify(K, unitary_tol=UNITARY_TOL, contraction_tol=CONTRACTION_TOL):
    """Contraction / unitary / symmetric / block-diagonal flags of ``K``."""
    K = _as_square(K)
    m = K.shape[0]
    norm = float(np.linalg.norm(K, 2))
    contraction = norm <= 1 + contraction_tol
    # excesses at the rounding level of the SVD itself are not worth a warning
    if 1 + _NORM_NOISE < norm <= 1 + contraction_tol:
        warnings.warn(f"||K|| = {norm!r} exceeds 1 within tolerance; treated as a contraction")
    unitary = float(np.max(np.abs(K.conj().T @ K - np.eye(m)))) < unitary_tol
    symmetric = float(np.max(np.abs(K - K.T))) <= SYMMETRY_TOL
    if m % 2:
        block = None
    else:
        n = m // 2
        block = bool(np.all(K[:n, n:] == 0) and np.all(K[n:, :n] == 0))
    return Classification(contraction, unitary, symmetric, block, norm)


class ExtensionSpec:
    """``K`` with a sign; flags are computed once, ``K`` is read-only."""

    def __init__(self, K, sign="plus", name=None):
        K = _as_square(K).copy()
        if sign not in _SIGNS:
            raise ShapeError(f"sign must be 'plus' or 'minus', got {sign!r}")
        K.setflags(write=False)
        self.K = K
        self.m = K.shape[0]
        self.sign = sign
        self.name = name
        self.classification = classify(K)

    is_contraction = property(lambda self: self.classification.is_contraction)
    is_unitary = property(lambda self: self.classification.is_unitary)
    is_symmetric_matrix = property(lambda self: self.classification.is_symmetric_matrix)
    is_block_diagonal = property(lambda self: self.classification.is_block_diagonal)

    @property
    def sign_value(self):
        return 1 if self.sign == "plus" else -1

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"ExtensionSpec(m={self.m}, sign={self.sign}{label})"

    def to_dict(self):
        return {
            "K": [[[float(z.real), float(z.imag)] for z in row] for row in self.K],
            "sign": self.sign,
        }


def boundary_condition_matrix(spec, T):
    """``B = (K - I) G1 + i s (K + I) G2`` with ``s = +1`` or ``-1`` by sign."""
    if spec.m != T.m:
        raise ShapeError(f"K has size {spec.m} but the triplet has order {T.m}")
    eye = np.eye(spec.m)
    return (spec.K - eye) @ T.G1 + 1j * spec.sign_value * (spec.K + eye) @ T.G2


def _rank(M, rtol=1e-10):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


@dataclass(frozen=True)
class Comparison:
    same: bool
    rank_deficient: bool
    ranks: tuple

    def __bool__(self):
        return self.same


def same_extension(spec1, spec2, T, rtol=1e-10):
    """Whether two specifications give the same domain (equal row spaces of ``B``)."""
    if spec1.m != spec2.m:
        raise ShapeError("specifications of different size")
    B1 = boundary_condition_matrix(spec1, T)
    B2 = boundary_condition_matrix(spec2, T)
    r1, r2 = _rank(B1, rtol), _rank(B2, rtol)
    r12 = _rank(np.vstack([B1, B2]), rtol)
    return Comparison(r1 == r2 == r12, min(r1, r2) < spec1.m, (r1, r2, r12))


def separated(K_a, K_b, sign="plus"):
    """Block-diagonal ``K = diag(K_a, K_b)`` (even order only)."""
    K_a = _as_square(K_a)
    K_b = _as_square(K_b)
    if K_a.shape != K_b.shape:
        raise ShapeError("K_a and K_b must have the same size")
    n = K_a.shape[0]
    K = np.zeros((2 * n, 2 * n), dtype=complex)
    K[:n, :n] = K_a
    K[n:, n:] = K_b
    return ExtensionSpec(K, sign, name="custom_separated")


def quasi_periodic(theta, T, sign="plus"):
    """``K`` whose domain is ``D[k]y(b) = exp(i theta) D[k]y(a)`` for all ``k``."""
    m = T.m
    S = np.vstack([np.eye(m), np.exp(1j * theta) * np.eye(m)])
    g1, g2 = T.G1 @ S, T.G2 @ S
    P, N = g1 + 1j * g2, g1 - 1j * g2
    if sign == "minus":
        P, N = N, P
    if np.linalg.cond(P) > 1e12:
        other = "minus" if sign == "plus" else "plus"
        raise PresetError(
            f"quasi-periodic condition has no K with the {sign} sign; try sign={other!r}",
            theta=theta,
        )
    K = np.linalg.solve(P.T, N.T).T  # K = N P^{-1}
    return ExtensionSpec(K, sign, name=f"quasi_periodic({theta!r})")


def preset(name, m, T=None, sign="plus", theta=0.0, K_a=None, K_b=None):
    """Named extensions: ``dirichlet``, ``neumann``, ``quasi_periodic``, ``custom_separated``."""
    if name == "dirichlet":
        return ExtensionSpec(np.eye(m), sign, name="dirichlet")
    if name == "neumann":
        return ExtensionSpec(-np.eye(m), sign, name="neumann")
    if name == "custom_separated":
        if m % 2:
            raise PresetError("separated conditions need even order", m=m)
        if K_a is None or K_b is None:
            raise PresetError("custom_separated needs K_a and K_b")
        spec = separated(K_a, K_b, sign)
        if spec.m != m:
            raise ShapeError(f"blocks give size {spec.m}, expected {m}")
        return spec
    if name == "quasi_periodic":
        if T is None:
            from .triplet import build_triplet

            T = build_triplet(m)
        return quasi_periodic(theta, T, sign)
    raise PresetError(f"unknown preset {name!r}")


def matrix_from_pairs(rows):
    """``[[ [re, im], ... ], ...]`` to a complex array."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ShapeError("matrix entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
