import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amp_lab import weights
from amp_lab.errors import BadExponentError, InvalidIntervalError, MeshMismatchError, TooCoarseError
from amp_lab.fem import (
    Functional,
    GridFunction,
    Mesh1D,
    SignClass,
    WeightFunction,
    e_lambda,
    grad_e_lambda,
    h_lambda,
    integral_abs_pow,
    integral_grad_pow,
    make_mesh,
    sign_classify,
    split_parts,
    weighted_pairing,
)

from conftest import sampled


def test_mesh_arithmetic():
    m = make_mesh(0, math.pi, 3)
    assert m.h == pytest.approx(math.pi / 4, rel=1e-15)
    np.testing.assert_allclose(m.interior, [math.pi / 4, math.pi / 2, 3 * math.pi / 4])
    assert make_mesh(0, 1, 2).h == pytest.approx(1 / 3)
    with pytest.raises(InvalidIntervalError):
        make_mesh(1, 0, 10)
    with pytest.raises(TooCoarseError):
        make_mesh(0, 1, 1)


def test_refine_is_nested():
    m = Mesh1D(0, 1, 5)
    r = m.refine()
    assert r.n == 11
    np.testing.assert_allclose(r.nodes[::2], m.nodes, atol=1e-15)


def test_zero_function_integrals():
    m = Mesh1D(0, 1, 7)
    z = GridFunction(m, np.zeros(7))
    f = weights.constant(m)
    assert integral_abs_pow(z, 2.5) == 0
    assert integral_grad_pow(z, 2.5) == 0
    assert weighted_pairing(f, z) == 0
    assert h_lambda(z, 3, 4.0) == 0
    assert e_lambda(z, 3, 4.0, f).e_lambda == 0
    np.testing.assert_array_equal(grad_e_lambda(z, 3, 4.0, WeightFunction(m, np.zeros(9),
                                                                          nonneg=False)).values, 0)


def _exact_p2_mass(u):
    # int of a squared linear function on each element: h (a^2 + ab + b^2) / 3
    a, b = u.full[:-1], u.full[1:]
    return u.mesh.h * np.sum(a * a + a * b + b * b) / 3


def test_sin_square_integral():
    m = Mesh1D(0, math.pi, 1000)
    u = sampled(m, np.sin)
    # the quadrature is exact for the interpolant; the interpolant itself is O(h^2) off
    assert integral_abs_pow(u, 2) == pytest.approx(_exact_p2_mass(u), rel=1e-13)
    assert abs(integral_abs_pow(u, 2) - math.pi / 2) < 2 * m.h ** 2


def test_single_hat():
    m = Mesh1D(0, 1, 2)
    u = GridFunction(m, [1.0, 0.0])
    assert integral_abs_pow(u, 2) == pytest.approx(2 * m.h / 3, rel=1e-14)
    # slopes 3 and -3 on two elements of width 1/3
    assert integral_grad_pow(u, 2) == pytest.approx(2 * 9 / 3, rel=1e-14)


def test_grad_integral_of_sin():
    m = Mesh1D(0, math.pi, 1000)
    assert integral_grad_pow(sampled(m, np.sin), 2) == pytest.approx(math.pi / 2, abs=1e-5)


def test_pairings_from_closed_forms():
    m = Mesh1D(0, math.pi, 1000)
    assert weighted_pairing(weights.constant(m), sampled(m, np.sin)) == pytest.approx(2, abs=1e-5)
    f = weights.one_minus_sin(m)
    assert abs(weighted_pairing(f, sampled(m, lambda x: np.sin(2 * x)))) < 1e-5


def test_h_of_first_eigenfunction():
    m = Mesh1D(0, math.pi, 1000)
    u = sampled(m, np.sin)
    assert abs(h_lambda(u, 2, 1.0)) < 1e-4


def test_energy_is_dirichlet_energy_at_p2():
    m = Mesh1D(0, 1, 30)
    rng = np.random.default_rng(3)
    u = GridFunction(m, rng.standard_normal(30))
    f = weights.random_smooth(m, 1)
    val = e_lambda(u, 2, 0.0, f)
    assert val.e_lambda == pytest.approx(0.5 * integral_grad_pow(u, 2) - weighted_pairing(f, u),
                                         rel=1e-14)
    assert val.e_lambda == pytest.approx(val.h_lambda / 2 - val.pairing, rel=1e-14)


def test_p2_gradient_matches_direct_assembly():
    n = 25
    m = Mesh1D(0, 2, n)
    h = m.h
    rng = np.random.default_rng(0)
    u = rng.standard_normal(n)
    fv = rng.uniform(0.1, 2, n + 2)
    lam = 3.7
    K = (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / h
    M = (np.diag(np.full(n, 4.0)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)) * h / 6
    load = h / 6 * (fv[:-2] + 4 * fv[1:-1] + fv[2:])
    expected = (K - lam * M) @ u - load
    g = grad_e_lambda(GridFunction(m, u), 2, lam, WeightFunction(m, fv)).values
    np.testing.assert_allclose(g, expected, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_gradient_against_central_differences(p):
    rng = np.random.default_rng(int(10 * p))
    worst = 0.0
    for _ in range(30):
        n = int(rng.integers(4, 16))
        m = Mesh1D(0, float(rng.uniform(0.5, 4)), n)
        u = rng.standard_normal(n)
        f = WeightFunction(m, rng.uniform(0, 2, n + 2))
        lam = float(rng.uniform(-2, 10))
        F = Functional(m, p, lam, f)
        g = grad_e_lambda(GridFunction(m, u), p, lam, f).values
        fd = np.empty(n)
        for i in range(n):
            step = 1e-6 * (1 + abs(u[i]))
            up, um = u.copy(), u.copy()
            up[i] += step
            um[i] -= step
            fd[i] = (F.E(up) - F.E(um)) / (2 * step)
        worst = max(worst, np.max(np.abs(fd - g)) / np.max(np.abs(g)))
    assert worst <= 1e-5


def test_split_parts():
    m = Mesh1D(0, 1, 2)
    plus, minus = split_parts(GridFunction(m, [-1.0, 2.0]))
    np.testing.assert_array_equal(plus.values, [0, 2])
    np.testing.assert_array_equal(minus.values, [-1, 0])
    u = GridFunction(m, [1.0, 2.0])
    plus, minus = split_parts(u)
    np.testing.assert_array_equal(plus.values, u.values)
    np.testing.assert_array_equal(minus.values, 0)


def test_split_grad_defect_confined_to_sign_change_elements():
    # nodal splitting flattens the slope on an element where u changes sign, so
    # the parts can lose at most the contribution of those elements
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = Mesh1D(0, 1, 9)
        u = GridFunction(m, rng.standard_normal(9))
        plus, minus = split_parts(u)
        a, b = u.full[:-1], u.full[1:]
        crossing = a * b < 0
        for p in (1.5, 2, 3):
            whole = integral_grad_pow(u, p)
            parts = integral_grad_pow(plus, p) + integral_grad_pow(minus, p)
            element = m.h * np.abs((b - a) / m.h) ** p
            assert parts <= whole * (1 + 1e-12)
            assert whole - parts <= np.sum(element[crossing]) * (1 + 1e-12) + 1e-14


def test_decomposition_exact_at_nodal_sign_change():
    m = Mesh1D(0, math.pi, 199)
    u = sampled(m, lambda x: np.sin(2 * x) * (1 + 0.3 * x))  # zero at the midpoint node
    plus, minus = split_parts(u)
    for p in (1.5, 2.0, 3.0):
        lam = 2.3
        total = h_lambda(plus, p, lam) + h_lambda(minus, p, lam)
        assert h_lambda(u, p, lam) == pytest.approx(total, rel=1e-13)


def test_sign_classify():
    m = Mesh1D(0, math.pi, 50)
    assert sign_classify(GridFunction(m, np.ones(50)), 1e-6) is SignClass.POSITIVE
    assert sign_classify(GridFunction(m, -np.ones(50))) is SignClass.NEGATIVE
    assert sign_classify(sampled(m, lambda x: np.sin(2 * x))) is SignClass.SIGN_CHANGING
    assert sign_classify(GridFunction(m, np.zeros(50))) is SignClass.INDETERMINATE
    with pytest.raises(ValueError):
        sign_classify(GridFunction(m, np.ones(50)), 1.5)


def test_bad_exponent_and_mesh_mismatch():
    m = Mesh1D(0, 1, 4)
    u = GridFunction(m, np.ones(4))
    with pytest.raises(BadExponentError):
        integral_abs_pow(u, 1.0)
    with pytest.raises(MeshMismatchError):
        GridFunction(m, np.ones(5))
    with pytest.raises(MeshMismatchError):
        weighted_pairing(weights.constant(Mesh1D(0, 1, 5)), u)


def test_weight_rejects_negative_samples():
    m = Mesh1D(0, 1, 3)
    with pytest.raises(ValueError):
        WeightFunction(m, [0, 1, -1, 1, 0])
    with pytest.raises(ValueError):
        WeightFunction(m, np.zeros(5))


def test_grid_function_is_immutable():
    u = GridFunction(Mesh1D(0, 1, 3), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        u.values[0] = 5.0


vectors = st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=12)


@settings(max_examples=60, deadline=None)
@given(vectors, st.floats(-5, 5, allow_nan=False), st.sampled_from([1.5, 2.0, 3.0, 4.5]))
def test_homogeneity(vals, c, p):
    m = Mesh1D(0, 1, len(vals))
    u = GridFunction(m, vals)
    for integral in (integral_abs_pow, integral_grad_pow):
        base = integral(u, p)
        assert integral(c * u, p) == pytest.approx(abs(c) ** p * base, rel=1e-12, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(vectors, st.floats(-3, 3, allow_nan=False), st.floats(-3, 3, allow_nan=False))
def test_pairing_bilinear(vals, alpha, beta):
    m = Mesh1D(0, 2, len(vals))
    u = GridFunction(m, vals)
    v = GridFunction(m, np.cos(np.arange(len(vals))))
    f = weights.random_smooth(m, 2)
    lhs = weighted_pairing(f, alpha * u + beta * v)
    rhs = alpha * weighted_pairing(f, u) + beta * weighted_pairing(f, v)
    scale = abs(alpha) * weighted_pairing(f, GridFunction(m, np.abs(vals))) + 10 * abs(beta)
    assert abs(lhs - rhs) <= 1e-13 * (scale + 1)
