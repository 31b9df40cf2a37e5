import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasidiff.coefficients import PiecewiseCoefficient as PC
from quasidiff.errors import ConstraintError, ParameterError
from quasidiff.ode import fundamental_matrix, solve_cauchy
from quasidiff.shinzettl import build_sturm_liouville, build_two_term, free_matrix, ipow
from quasidiff.triplet import (
    boundary_data,
    boundary_form,
    build_triplet,
    default_odd_coefficients,
    greens_identity_residual,
    integrate_doubling,
    lagrange_form,
    odd_coefficient_relations,
    realize_boundary_data,
)

cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def test_second_order_maps():
    T = build_triplet(2)
    np.testing.assert_array_equal(T.G1, [[0, 1, 0, 0], [0, 0, 0, -1]])
    np.testing.assert_array_equal(T.G2, [[1, 0, 0, 0], [0, 0, 1, 0]])


@pytest.mark.parametrize("m", range(2, 9))
def test_stacked_maps_invertible(m):
    T = build_triplet(m)
    assert T.condition_number < 10
    assert np.linalg.matrix_rank(T.stacked) == 2 * m


def test_even_order_rows_follow_pattern():
    T = build_triplet(4)
    bv = np.arange(1, 9)  # y(a), y'(a), y''(a), y'''(a), then at b
    # Gamma_1 y = (i^4 (-1) D3 y(a), i^4 D2 y(a) ... ) for a, then b with alternating sign
    np.testing.assert_array_equal(T.gamma1(bv), [-4, 3, 8, -7])
    np.testing.assert_array_equal(T.gamma2(bv), [1, 2, 5, 6])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_default_odd_coefficients_exact(n):
    rel = odd_coefficient_relations(*default_odd_coefficients(n), n)
    assert all(rel.values()), rel
    al, be, ga, de = default_odd_coefficients(n)
    assert al * ga.conj() + al.conj() * ga == (-1) ** n
    assert (ga + ga.conj()) == (-1) ** n  # 2 Re gamma with alpha = 1


def test_invalid_odd_coefficients():
    with pytest.raises(ConstraintError, match="alpha\\*conj\\(delta\\)"):
        build_triplet(3, (1, 1, 1, 1))
    with pytest.raises(ParameterError):
        build_triplet(1)
    with pytest.raises(ParameterError):
        build_triplet(4, (1, 1, 1, 1))


def test_custom_odd_coefficients_accepted():
    T = build_triplet(3, (1, 1, complex(-0.5, 2), complex(0.5, 2)))
    assert np.linalg.matrix_rank(T.stacked) == 6


def test_boundary_data_of_columns():
    A = free_matrix(2, 0, 2.0)
    F = fundamental_matrix(A, 0.0)
    bv = boundary_data(A, F)
    np.testing.assert_allclose(bv[:2], np.eye(2))
    np.testing.assert_allclose(bv[:, 1], [0, 1, 2.0, 1], atol=1e-12)
    y = solve_cauchy(A, 0.0, alpha=[1, 2])
    z = solve_cauchy(A, 0.0, alpha=[-3, 0.5])
    s = solve_cauchy(A, 0.0, alpha=[-2, 2.5])
    np.testing.assert_allclose(s.boundary_data(), y.boundary_data() + z.boundary_data(), atol=1e-12)


def test_lagrange_form_simple_cases():
    assert lagrange_form(np.zeros(4), np.zeros(4), 2) == 0
    bv = np.array([0, 1, 0, 1.0])
    assert lagrange_form(bv, bv, 2) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.lists(cplx, min_size=32, max_size=32))
def test_boundary_form_is_scaled_bracket(m, vals):
    T = build_triplet(m)
    by = np.array(vals[: 2 * m])
    bz = np.array(vals[16:16 + 2 * m])
    direct = np.vdot(T.G2 @ bz, T.G1 @ by) - np.vdot(T.G1 @ bz, T.G2 @ by)
    assert boundary_form(by, bz, T) == direct
    scale = 1 + np.linalg.norm(by) * np.linalg.norm(bz)
    assert abs(boundary_form(by, bz, T) - ipow(m) * lagrange_form(by, bz, m)) < 1e-13 * scale


def test_greens_identity_for_sine_and_cosine():
    A = free_matrix(2, 0, np.pi)
    y = solve_cauchy(A, 1.0, alpha=[0, 1])
    z = solve_cauchy(A, 1.0, alpha=[1, 0])
    res = greens_identity_residual(A, y, z)
    assert res.residual < 1e-8 and res.converged


def test_greens_identity_same_function():
    A = build_sturm_liouville(PC.constant(1.0, 0, 1), PC.heaviside(0.5, 0, 1, 2.0))
    y = solve_cauchy(A, 2 + 1j, f=PC.polynomial([1, 1j], 0, 1), alpha=[0.3, 1 - 1j])
    res = greens_identity_residual(A, y, y)
    assert res.residual < 1e-8
    assert abs(res.lhs.real) < 1e-8  # <ly, y> - <y, ly> is purely imaginary


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_greens_identity_random(m, seed):
    rng = np.random.default_rng(seed)
    Q = PC.heaviside(0.5, 0, 1, 2.0)
    A = build_sturm_liouville(PC.constant(1.0, 0, 1), Q) if m == 2 else build_two_term(m, 1, Q)
    T = build_triplet(m)
    data = lambda: rng.normal(size=m) + 1j * rng.normal(size=m)
    f = PC.polynomial(rng.normal(size=3) + 1j * rng.normal(size=3), 0, 1)
    y = solve_cauchy(A, complex(*rng.normal(size=2)), f, rng.uniform(0, 1), data())
    z = solve_cauchy(A, complex(*rng.normal(size=2)), None, 0.0, data())
    assert greens_identity_residual(A, y, z, T).residual < 1e-8


def test_quadrature_doubling():
    val, ok = integrate_doubling(np.sin, np.array([0, 1, np.pi]))
    assert ok and val == pytest.approx(2.0, rel=1e-13)


def test_realize_existing_data():
    A = build_sturm_liouville(PC.constant(1.0, 0, 1), PC.heaviside(0.5, 0, 1, 2.0))
    target = solve_cauchy(A, 3.0, alpha=[1, -2]).boundary_data()
    y = realize_boundary_data(A, target, rng=np.random.default_rng(0))
    assert np.max(np.abs(y.boundary_data() - target)) < 1e-8


def test_realize_zero_data():
    A = free_matrix(2, 0, 1)
    y = realize_boundary_data(A, np.zeros(4), rng=np.random.default_rng(0))
    assert np.max(np.abs(y.boundary_data())) < 1e-8


def test_realize_unit_vector():
    A = free_matrix(2, 0, 1)
    y = realize_boundary_data(A, [1, 0, 0, 0], rng=np.random.default_rng(0))
    np.testing.assert_allclose(y.boundary_data(), [1, 0, 0, 0], atol=1e-8)
    np.testing.assert_allclose(y(0.0), [1, 0], atol=1e-12)


@pytest.mark.parametrize("m", [3, 4, 5])
def test_realize_random_targets(m):
    rng = np.random.default_rng(m)
    target = rng.normal(size=2 * m) + 1j * rng.normal(size=2 * m)
    y = realize_boundary_data(free_matrix(m, 0, 1), target, rng=rng)
    assert np.max(np.abs(y.boundary_data() - target)) < 1e-8
