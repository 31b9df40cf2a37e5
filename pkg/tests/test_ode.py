import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from quasidiff.coefficients import PiecewiseCoefficient as PC
from quasidiff.errors import DomainError
from quasidiff.ode import (
    DEFAULT_RTOL,
    build_a_lambda,
    dense_eval,
    fundamental_batch,
    fundamental_matrix,
    solve_cauchy,
    write_csv,
)
from quasidiff.shinzettl import (
    ShinZettlMatrix,
    build_sturm_liouville,
    build_two_term,
    free_matrix,
    ipow,
)

cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def delta_matrix(height=1.0, at=0.5):
    return build_sturm_liouville(PC.constant(1.0, 0, 1), PC.heaviside(at, 0, 1, height))


def test_zero_shift_keeps_matrix():
    A = free_matrix(2, 0, 1)
    assert build_a_lambda(A, 0.0).equals(A)


def test_shift_sits_in_bottom_left_corner():
    # l(y) = lam y means D[m]y = i**(-m) lam y, so the corner gains i**(-2) = -1
    A = free_matrix(2, 0, 1)
    M = build_a_lambda(A, 1.0).evaluate(0.3)
    assert M[1, 0] == -1
    B = build_two_term(4, 1, PC.polynomial([0.5, 1], 0, 1))
    diff = build_a_lambda(B, 2.0 - 1j).evaluate(0.7) - B.evaluate(0.7)
    expected = np.zeros((4, 4), complex)
    expected[3, 0] = ipow(-4) * (2.0 - 1j)
    np.testing.assert_array_equal(diff, expected)


def test_linear_solution():
    A = free_matrix(2, 0.5, 2.0)
    y = solve_cauchy(A, 0.0, alpha=[0, 1])
    t = np.linspace(0.5, 2.0, 7)
    np.testing.assert_allclose(y(t)[:, 0], t - 0.5, atol=1e-12)
    np.testing.assert_allclose(y(t)[:, 1], 1.0, atol=1e-12)


def test_sine_solution():
    y = solve_cauchy(free_matrix(2, 0, np.pi), 1.0, alpha=[0, 1])
    t = np.linspace(0, np.pi, 11)
    np.testing.assert_allclose(y(t)[:, 0], np.sin(t), atol=1e-9)
    np.testing.assert_allclose(y(t)[:, 1], np.cos(t), atol=1e-9)


def test_cauchy_point_inside_interval():
    y = solve_cauchy(free_matrix(2, 0, np.pi), 1.0, c=1.0, alpha=[np.sin(1.0), np.cos(1.0)])
    t = np.linspace(0, np.pi, 11)
    np.testing.assert_allclose(y(t)[:, 0], np.sin(t), atol=1e-9)
    with pytest.raises(DomainError):
        solve_cauchy(free_matrix(2, 0, 1), 1.0, c=2.0)


def test_delta_jump_condition():
    y = solve_cauchy(delta_matrix(), 0.0, alpha=[1, 0])
    eps = 1e-9
    left, right = y(0.5 - eps), y(0.5 + eps)
    np.testing.assert_allclose(left, right, atol=1e-7)
    # y' = D[1]y + Q y jumps by y(1/2) where Q steps from 0 to 1
    jump = (right[1] + right[0]) - left[1]
    assert jump == pytest.approx(y(0.5)[0], abs=1e-7)
    # exact solution: y = 1 on [0, 1/2], then y'' = 0 with y'(1/2+) = 1
    assert y(0.8)[0] == pytest.approx(1.3, abs=1e-9)


def test_fundamental_matrix_nilpotent():
    F = fundamental_matrix(free_matrix(2, 1.0, 3.0), 0.0)
    for t in (1.0, 1.7, 3.0):
        np.testing.assert_allclose(F(t), [[1, t - 1.0], [0, 1]], atol=1e-12)


def test_fundamental_matrix_rotation():
    F = fundamental_matrix(free_matrix(2, 0, np.pi), 1.0)
    np.testing.assert_allclose(F(np.pi), -np.eye(2), atol=1e-9)
    np.testing.assert_array_equal(F(0.0), np.eye(2))


def _smooth_matrix():
    a, b = 0.0, 1.5
    poly = lambda *c: PC.polynomial(c, a, b)
    rows = [
        [poly(0.3, 1j), poly(1.0, 0.2), None],
        [poly(-1, 0.5), poly(0.2j, -0.4), poly(2.0)],
        [poly(0.1, 0.1j), poly(1, 1), poly(-0.5, 0, 0.3)],
    ]
    return ShinZettlMatrix(rows, a, b)


@pytest.mark.parametrize("lam", [0.0, 2.5, -3 + 4j])
def test_liouville_determinant(lam):
    A = _smooth_matrix()
    F = fundamental_matrix(A, lam)
    tr = lambda t: np.trace(A.evaluate(t))
    integral = quad(lambda t: tr(t).real, 0, 1.5)[0] + 1j * quad(lambda t: tr(t).imag, 0, 1.5)[0]
    det = np.linalg.det(F(1.5))
    assert abs(det / np.exp(integral) - 1) < 1e-8


def test_dense_output_at_start_is_exact():
    alpha = np.array([0.3 - 1j, 2.0])
    y = solve_cauchy(delta_matrix(2.0), 3.0, alpha=alpha)
    np.testing.assert_array_equal(y(0.0), alpha)


def test_dense_output_at_midpoint():
    F = fundamental_matrix(free_matrix(2, 0.0, 2.0), 0.0)
    np.testing.assert_allclose(F(1.0)[:, 1], [1.0, 1.0], atol=1e-12)


def test_state_continuous_across_breakpoint():
    y = solve_cauchy(delta_matrix(3.0), 5.0, alpha=[1, 0.5])
    np.testing.assert_allclose(y(0.5), y(0.5 - 1e-10), atol=1e-8)
    state, top = dense_eval(y, 0.5, top=True)
    assert top == pytest.approx(ipow(-2) * 5.0 * state[0])


@pytest.mark.parametrize("lam", [1.0, 100.0, 10 + 5j, -50.0])
def test_midpoint_residual(lam):
    F = fundamental_matrix(delta_matrix(2.0), lam)
    assert F.midpoint_residual() < 10 * DEFAULT_RTOL


def test_singular_forcing():
    # -y'' = t**(-1/2), y(0) = y'(0) = 0  gives  y = -(4/3) t**(3/2)
    y = solve_cauchy(free_matrix(2, 0, 1), 0.0, f=PC.power(-0.5, 0, 1))
    np.testing.assert_allclose(y(1.0), [-4 / 3, -2.0], rtol=1e-9)
    np.testing.assert_allclose(y(0.25)[0], -4 / 3 * 0.125, rtol=1e-9)


def test_singular_leading_coefficient():
    # -(sqrt(t) y')' = 0 with D[1]y = sqrt(t) y' = 1 and y(0) = 0: y = 2 sqrt(t)
    A = build_sturm_liouville(PC.power(0.5, 0, 1), PC.zero(0, 1))
    y = solve_cauchy(A, 0.0, alpha=[0, 1])
    t = np.array([0.0, 0.01, 0.3, 1.0])
    np.testing.assert_allclose(y(t)[:, 0], 2 * np.sqrt(t), atol=1e-9)
    np.testing.assert_allclose(y(t)[:, 1], 1.0, atol=1e-9)


def test_batch_matches_single_and_rescales():
    A = delta_matrix(2.0)
    lams = np.array([0.0, 7.0, 3 - 2j])
    phi, logs = fundamental_batch(A, lams, jobs=2)
    for k, lam in enumerate(lams):
        np.testing.assert_allclose(np.exp(logs[k]) * phi[k], fundamental_matrix(A, lam)(1.0),
                                   rtol=1e-8, atol=1e-8)
    phi, logs = fundamental_batch(free_matrix(2, 0, np.pi), [-1e6, 1e4 + 1e4j])
    assert np.all(np.isfinite(phi)) and np.all(np.isfinite(logs))
    assert logs[0] > 700  # exp(1000 pi) would overflow without rescaling


def test_batch_independent_of_jobs():
    lams = np.linspace(-5, 200, 150)
    A = delta_matrix(-3.0, 0.3)
    p1, l1 = fundamental_batch(A, lams, jobs=1)
    p4, l4 = fundamental_batch(A, lams, jobs=4)
    np.testing.assert_array_equal(p1, p4)
    np.testing.assert_array_equal(l1, l4)


def test_write_csv(tmp_path):
    y = solve_cauchy(free_matrix(2, 0, 1), 0.0, alpha=[0, 1])
    path = tmp_path / "y.csv"
    write_csv(y, path, np.linspace(0, 1, 5))
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "Re w_1", "Im w_1", "Re w_2", "Im w_2"]
    assert float(rows[3][1]) == pytest.approx(0.5)


@settings(max_examples=15, deadline=None)
@given(cplx, cplx, cplx, cplx, cplx)
def test_linearity_in_initial_data(lam, a1, a2, b1, b2):
    A = delta_matrix(2.0)
    y1 = solve_cauchy(A, lam, alpha=[a1, a2])
    y2 = solve_cauchy(A, lam, alpha=[b1, b2])
    y12 = solve_cauchy(A, lam, alpha=[a1 + b1, a2 + b2])
    t = np.linspace(0, 1, 13)
    scale = 1 + np.max(np.abs(y12(t)))
    assert np.max(np.abs(y12(t) - y1(t) - y2(t))) < 10 * DEFAULT_RTOL * scale


def _bracket(y, z, t, m):
    wy, wz = y(t), z(t)
    return sum((-1) ** (k - 1) * wy[..., m - k] * np.conj(wz[..., k - 1]) for k in range(1, m + 1))


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.floats(-20, 20), st.lists(cplx, min_size=8, max_size=8))
def test_lagrange_bracket_is_constant(m, lam, data):
    Q = PC.heaviside(0.4, 0, 1, 1.5) + PC.polynomial([0.2, -1], 0, 1)
    A = build_sturm_liouville(PC.constant(1.0, 0, 1), Q) if m == 2 else build_two_term(m, 1, Q)
    y = solve_cauchy(A, lam, alpha=data[:m])
    z = solve_cauchy(A, lam, alpha=data[4:4 + m])
    t = np.linspace(0, 1, 17)
    vals = _bracket(y, z, t, m)
    scale = 1 + np.max(np.abs(y(t))) * np.max(np.abs(z(t)))
    assert np.max(np.abs(vals - vals[0])) < 1e-8 * scale


@pytest.mark.parametrize("lam", [4.0, 60 - 3j])
def test_halving_tolerance(lam):
    A = delta_matrix(2.0)
    rtol = 1e-8
    F1 = fundamental_matrix(A, lam, rtol, rtol)(1.0)
    F2 = fundamental_matrix(A, lam, rtol / 2, rtol / 2)(1.0)
    assert np.max(np.abs(F1 - F2)) < 100 * rtol * max(1.0, np.max(np.abs(F2)))
