import json

import numpy as np
import pytest

from quasidiff.coefficients import PiecewiseCoefficient as PC
from quasidiff.errors import (
    NotAnEigenvalueError,
    NotContractionError,
    NotUnitaryError,
    ResolventPoleError,
    SpectralDomainError,
    TooManyEigenvaluesError,
    ValidityError,
)
from quasidiff.extensions import ExtensionSpec, boundary_condition_matrix, preset
from quasidiff.shinzettl import build_sturm_liouville, free_matrix
from quasidiff.spectral import (
    ConstantFamily,
    MobiusFamily,
    ScanOptions,
    TabulatedFamily,
    characteristic_matrix,
    eigenfunction,
    eigenfunctions,
    eigenvalues_complex_box,
    eigenvalues_real_scan,
    generalized_resolvent_apply,
    l2_distance,
    l2_norm,
    resolvent_apply,
)
from quasidiff.triplet import build_triplet

from oracles import DELTA_ROOTS

T2 = build_triplet(2)
DIRICHLET = preset("dirichlet", 2)


@pytest.fixture(scope="module")
def free_pi():
    return free_matrix(2, 0, np.pi)


def delta_operator(alpha=2.0, c=0.5):
    return build_sturm_liouville(PC.constant(1.0, 0, 1), PC.heaviside(c, 0, 1, alpha))


def test_characteristic_matrix_detects_eigenvalue(free_pi):
    assert characteristic_matrix(free_pi, DIRICHLET, T2, 4.0).ratio < 1e-8
    M = characteristic_matrix(free_pi, DIRICHLET, T2, 2.5)
    assert M.ratio > 1e-3
    # closed form: M = B [I; Phi(pi)], det proportional to sin(sqrt(2.5) pi) / sqrt(2.5)
    k = np.sqrt(2.5)
    Phi = np.array([[np.cos(k * np.pi), np.sin(k * np.pi) / k],
                    [-k * np.sin(k * np.pi), np.cos(k * np.pi)]])
    B = boundary_condition_matrix(DIRICHLET, T2)
    np.testing.assert_allclose(np.asarray(M), B @ np.vstack([np.eye(2), Phi]), atol=1e-9)
    logabs, _ = M.logdet()
    assert logabs == pytest.approx(np.log(abs(np.linalg.det(np.asarray(M)))))


def test_characteristic_matrix_is_analytic():
    A = delta_operator()
    lam = 7.3 + 0.4j
    fd = [
        (np.asarray(characteristic_matrix(A, DIRICHLET, T2, lam + h))
         - np.asarray(characteristic_matrix(A, DIRICHLET, T2, lam - h))) / (2 * h)
        for h in (1e-5, 1e-6)
    ]
    # complex step in the imaginary direction gives the same derivative (Cauchy-Riemann)
    h = 1e-5
    fd_im = (np.asarray(characteristic_matrix(A, DIRICHLET, T2, lam + 1j * h))
             - np.asarray(characteristic_matrix(A, DIRICHLET, T2, lam - 1j * h))) / (2j * h)
    scale = np.max(np.abs(fd[0]))
    assert np.max(np.abs(fd[0] - fd[1])) < 1e-4 * scale
    assert np.max(np.abs(fd[0] - fd_im)) < 1e-4 * scale


def test_dirichlet_scan(free_pi):
    res = eigenvalues_real_scan(free_pi, DIRICHLET, T2, (0.5, 10.5))
    np.testing.assert_allclose(res.values.real, [1, 4, 9], atol=1e-8)
    assert [e.multiplicity for e in res] == [1, 1, 1]
    assert all(e.residual < 1e-8 for e in res)
    assert np.all(res.values.imag == 0)


def test_neumann_scan(free_pi):
    res = eigenvalues_real_scan(free_pi, preset("neumann", 2), T2, (-0.5, 10.5))
    np.testing.assert_allclose(res.values.real, [0, 1, 4, 9], atol=1e-8)


def test_delta_scan_matches_matching_equation():
    res = eigenvalues_real_scan(delta_operator(), DIRICHLET, T2, (0.5, 100.0))
    np.testing.assert_allclose(res.values.real, DELTA_ROOTS[(2.0, 0.5)][:3], atol=1e-8)


def test_weyl_count(free_pi):
    res = eigenvalues_real_scan(free_pi, DIRICHLET, T2, (0.5, 400.0), ScanOptions(grid=800))
    assert abs(len(res) - np.sqrt(400.0)) <= 2


def test_scan_independent_of_jobs():
    A = delta_operator(-5.0, 0.3)
    r1 = eigenvalues_real_scan(A, DIRICHLET, T2, (-5, 100), ScanOptions(jobs=1))
    r3 = eigenvalues_real_scan(A, DIRICHLET, T2, (-5, 100), ScanOptions(jobs=3))
    assert r1.to_csv() == r3.to_csv()


def test_periodic_multiplicities():
    A = free_matrix(2, 0, 2 * np.pi)
    qp = preset("quasi_periodic", 2, T2, theta=0.0)
    res = eigenvalues_real_scan(A, qp, T2, (-0.5, 10.0))
    np.testing.assert_allclose(res.values.real, [0, 1, 4, 9], atol=1e-8)
    assert [e.multiplicity for e in res] == [1, 2, 2, 2]


def test_box_agrees_with_real_scan(free_pi):
    box = eigenvalues_complex_box(free_pi, DIRICHLET, T2, {"re_lo": 0.5, "re_hi": 10.5,
                                                           "im_lo": -1.0, "im_hi": 1.3})
    np.testing.assert_allclose(box.values, [1, 4, 9], atol=1e-7)
    assert box.meta["winding_number"] == 3


def test_empty_box(free_pi):
    res = eigenvalues_complex_box(free_pi, DIRICHLET, T2, (1.5, 3.5, -1, 1))
    assert len(res) == 0 and res.meta["winding_number"] == 0


@pytest.mark.parametrize("sign", ["plus", "minus"])
def test_zero_contraction_half_plane(free_pi, sign):
    spec = ExtensionSpec(np.zeros((2, 2)), sign)
    box = (-5, 30, -3, 5) if sign == "plus" else (-5, 30, -5, 3)
    res = eigenvalues_complex_box(free_pi, spec, T2, box)
    assert len(res) > 0
    if sign == "plus":
        assert np.all(res.values.imag >= -1e-7)
    else:
        assert np.all(res.values.imag <= 1e-7)


def test_search_preconditions(free_pi):
    with pytest.raises(NotUnitaryError):
        eigenvalues_real_scan(free_pi, ExtensionSpec(np.zeros((2, 2))), T2, (0, 10))
    with pytest.raises(NotContractionError):
        eigenvalues_complex_box(free_pi, ExtensionSpec(2 * np.eye(2)), T2, (0, 10, -1, 1))
    with pytest.raises(SpectralDomainError):
        eigenvalues_real_scan(free_pi, DIRICHLET, T2, (10, 0))
    with pytest.raises(TooManyEigenvaluesError):
        eigenvalues_real_scan(free_pi, DIRICHLET, T2, (0.5, 30), ScanOptions(max_eigenvalues=2))


def test_output_formats(free_pi):
    res = eigenvalues_real_scan(free_pi, DIRICHLET, T2, (0.5, 5))
    lines = res.to_csv().splitlines()
    assert lines[0] == "re,im,mult,residual"
    assert len(lines) == 3
    data = json.loads(res.to_json())
    assert [e["mult"] for e in data["eigenvalues"]] == [1, 1]


def test_eigenfunction_is_sine(free_pi):
    y = eigenfunction(free_pi, DIRICHLET, T2, 1.0)
    t = np.linspace(0, np.pi, 17)
    assert np.max(np.abs(y(t)[:, 0] - np.sqrt(2 / np.pi) * np.sin(t))) < 1e-7
    B = boundary_condition_matrix(DIRICHLET, T2)
    assert np.linalg.norm(B @ y.boundary_data()) < 1e-8
    assert y.equation_residual() / l2_norm(y) < 1e-6
    assert l2_norm(y) == pytest.approx(1.0, abs=1e-10)


def test_eigenfunction_rejects_regular_point(free_pi):
    with pytest.raises(NotAnEigenvalueError):
        eigenfunction(free_pi, DIRICHLET, T2, 2.5)


def test_double_eigenvalue_eigenfunctions():
    A = free_matrix(2, 0, 2 * np.pi)
    qp = preset("quasi_periodic", 2, T2, theta=0.0)
    ys = eigenfunctions(A, qp, T2, 1.0)
    assert len(ys) == 2
    t = np.linspace(0, 2 * np.pi, 41)
    basis = np.column_stack([np.sin(t), np.cos(t)])
    for y in ys:
        coef, *_ = np.linalg.lstsq(basis, y(t)[:, 0], rcond=None)
        assert np.max(np.abs(basis @ coef - y(t)[:, 0])) < 1e-7
    gram = [[np.vdot(u(t)[:, 0], v(t)[:, 0]) for v in ys] for u in ys]
    inner = abs(np.sum(ys[0](t)[:, 0] * np.conj(ys[1](t)[:, 0]))) * (t[1] - t[0])
    assert inner < 1e-6
    assert np.allclose(np.diag(gram).real * (t[1] - t[0]), 1.0, atol=0.05)


def test_real_symmetric_extension_commutes_with_conjugation():
    A = delta_operator(-3.0, 0.4)
    spec = ExtensionSpec([[0, 1], [1, 0]])
    res = eigenvalues_real_scan(A, spec, T2, (-20, 150))
    B = boundary_condition_matrix(spec, T2)
    assert len(res) >= 3
    for lam in res.values[:3]:
        y = eigenfunction(A, spec, T2, lam.real)
        assert np.linalg.norm(B @ np.conj(y.boundary_data())) < 1e-8


def test_resolvent_closed_form(free_pi):
    y = resolvent_apply(free_pi, DIRICHLET, T2, 0.0, PC.constant(1.0, 0, np.pi))
    t = np.linspace(0, np.pi, 13)
    np.testing.assert_allclose(y(t)[:, 0], t * (np.pi - t) / 2, atol=1e-9)
    assert y.meta["boundary_residual"] < 1e-10


def test_resolvent_contract():
    A = delta_operator()
    h = PC.polynomial([1, -2, 3j], 0, 1)
    lam, mu = 3 + 2j, -1 - 1.5j
    y = resolvent_apply(A, DIRICHLET, T2, lam, h)
    assert y.meta["equation_residual"] < 1e-7
    h_norm = l2_norm(h, grid=np.linspace(0, 1, 9))
    assert l2_norm(y) <= h_norm / abs(lam.imag) * (1 + 1e-8)
    z = resolvent_apply(A, DIRICHLET, T2, mu, h)
    w = resolvent_apply(A, DIRICHLET, T2, lam, z.as_function(0))
    grid = np.unique(np.concatenate([y.step_grid(), z.step_grid(), w.step_grid()]))
    diff = lambda t: y(t)[:, 0] - z(t)[:, 0] - (lam - mu) * w(t)[:, 0]
    assert l2_norm(diff, grid) < 1e-6


def test_resolvent_pole(free_pi):
    with pytest.raises(ResolventPoleError) as info:
        resolvent_apply(free_pi, DIRICHLET, T2, 4.0, PC.constant(1.0, 0, np.pi))
    assert info.value.record()["error"] == "resolvent-pole"


def test_generalized_resolvent_constant_unitary():
    A = delta_operator()
    h = PC.polynomial([1, -2, 3j], 0, 1)
    lam = 3 + 2j
    y = resolvent_apply(A, DIRICHLET, T2, lam, h)
    g = generalized_resolvent_apply(A, ConstantFamily(np.eye(2)), T2, lam, h)
    t = np.linspace(0, 1, 33)
    assert np.max(np.abs(g(t) - y(t))) < 1e-10
    assert g.meta["sign"] == "minus" and g.meta["holomorphy"] == "constant"
    assert l2_distance(g, y) < 1e-10


def test_generalized_resolvent_zero_family():
    A = delta_operator()
    h = PC.polynomial([1, 1j], 0, 1)
    g = generalized_resolvent_apply(A, np.zeros((2, 2)), T2, -2 - 1j, h)
    assert g.meta["half_plane"] == "lower" and g.meta["sign"] == "plus"
    assert g.meta["equation_residual"] < 1e-7
    B = boundary_condition_matrix(ExtensionSpec(np.zeros((2, 2)), "plus"), T2)
    assert np.linalg.norm(B @ g.boundary_data()) < 1e-8


def test_mobius_families():
    A = delta_operator()
    h = PC.constant(1.0, 0, 1)
    lam = -2 - 1j
    # (lam - i) / (lam + i) has modulus above one in the lower half-plane
    bad = MobiusFamily(np.eye(2), 1, -1j, 1, 1j)
    assert abs(bad(lam)[0, 0]) > 1
    with pytest.raises(ValidityError):
        generalized_resolvent_apply(A, bad, T2, lam, h)
    good = MobiusFamily(np.eye(2), 1, 1j, 1, -1j)
    for z in (lam, -5 - 0.1j, 3 - 7j):
        assert abs(good(z)[0, 0]) <= 1
    g = generalized_resolvent_apply(A, good, T2, lam, h)
    assert g.meta["holomorphy"] == "rational" and g.meta["K_norm"] <= 1
    assert g.meta["equation_residual"] < 1e-7


def test_tabulated_family_is_user_asserted():
    A = delta_operator()
    fam = TabulatedFamily([-1j, -2j], [0.5 * np.eye(2), np.zeros((2, 2))])
    g = generalized_resolvent_apply(A, fam, T2, -1.5j, PC.constant(1.0, 0, 1))
    assert g.meta["holomorphy"] == "user-asserted"
    assert g.meta["K_norm"] == pytest.approx(0.25)


def test_generalized_resolvent_needs_nonreal_lambda():
    with pytest.raises(SpectralDomainError):
        generalized_resolvent_apply(delta_operator(), np.eye(2), T2, 2.0, PC.constant(1.0, 0, 1))
