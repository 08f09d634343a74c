import dataclasses
import math

import numpy as np
import pytest

from amp_lab import weights
from amp_lab.errors import GeometryInfeasibleError, NotApplicableError
from amp_lab.fem import Functional, Mesh1D, SignClass, sign_classify, weighted_pairing
from amp_lab.lambda_star import (
    lambda_star,
    minimizer_is_solution_check,
    vanishing_construction,
    vanishing_sequence_weight,
)
from amp_lab.spectrum import first_eigenpair


@pytest.fixture(scope="module")
def mesh():
    return Mesh1D(0, math.pi, 799)


@pytest.fixture(scope="module")
def star_one_minus_sin(mesh, opts):
    return lambda_star(2.0, weights.one_minus_sin(mesh), mesh, opts)


def test_phi1_weight_gives_lambda2(mesh, opts):
    f = weights.sine(mesh)
    res = lambda_star(2.0, f, mesh, opts)
    assert res.value == pytest.approx(4.0, abs=1e-2)
    assert res.at_lambda2
    with pytest.raises(NotApplicableError):
        minimizer_is_solution_check(res, 2.0, f, mesh, opts)


def test_one_minus_sin_below_lambda2(star_one_minus_sin):
    res = star_one_minus_sin
    assert res.lambda1 < res.value < 3.5 < res.lambda2
    assert not res.at_lambda2
    assert res.constraint_residual < 1e-10
    assert sign_classify(res.minimizer) is SignClass.SIGN_CHANGING


def test_minimizer_is_unit_normalized_and_feasible(star_one_minus_sin, mesh):
    F = Functional(mesh, 2.0, 0.0, weights.one_minus_sin(mesh))
    u = star_one_minus_sin.minimizer.values
    assert F.mass(u) == pytest.approx(1.0, rel=1e-12)
    assert F.rayleigh(u) == pytest.approx(star_one_minus_sin.value, rel=1e-12)
    assert abs(F.pairing(u)) < 1e-10


def test_best_start_wins(star_one_minus_sin):
    res = star_one_minus_sin
    assert res.value == min(res.start_values.values())


def test_rescaled_minimizer_solves(star_one_minus_sin, mesh, opts):
    f = weights.one_minus_sin(mesh)
    rep = minimizer_is_solution_check(star_one_minus_sin, 2.0, f, mesh, opts)
    assert rep.pde_residual <= 1e-6 * rep.residual_scale
    assert abs(rep.energy) <= 1e-6 * rep.energy_scale
    assert rep.sign_class is SignClass.SIGN_CHANGING
    assert rep.passed()


def test_rescaling_round_trip(star_one_minus_sin, mesh, opts):
    f = weights.one_minus_sin(mesh)
    rep = minimizer_is_solution_check(star_one_minus_sin, 2.0, f, mesh, opts)
    fed = dataclasses.replace(star_one_minus_sin, minimizer=rep.solution)
    again = minimizer_is_solution_check(fed, 2.0, f, mesh, opts)
    assert again.sign == 1
    assert again.scale == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_bracket_for_other_exponents(p, opts):
    mesh = Mesh1D(0, math.pi, 301)
    res = lambda_star(p, weights.one_minus_sin(mesh, 0.05), mesh, opts)
    assert res.lambda1 < res.value <= res.lambda2 + 1e-8


def test_constant_weight_p3_reaches_lambda2(opts):
    # a symmetric weight is orthogonal to the antisymmetric phi_2
    mesh = Mesh1D(0, 1, 301)
    res = lambda_star(3.0, weights.constant(mesh), mesh, opts)
    assert res.value == pytest.approx(res.lambda2, rel=1e-8)


def test_vanishing_construction_witness(opts):
    mesh = Mesh1D(0, math.pi, 1999)
    phi1 = first_eigenpair(2.0, mesh, opts).fn
    for k in (1, 3):
        c = vanishing_construction(k, mesh, phi1)
        assert c.a_n > 0
        assert abs(weighted_pairing(c.weight, c.witness)) < 1e-12
        assert np.all(c.bump.values <= 0)
        assert np.all(c.core.values >= 0)
    with pytest.raises(ValueError):
        vanishing_sequence_weight(0, mesh, phi1)


def test_vanishing_construction_needs_resolution(opts):
    mesh = Mesh1D(0, math.pi, 31)
    phi1 = first_eigenpair(2.0, mesh, opts).fn
    with pytest.raises(GeometryInfeasibleError):
        vanishing_construction(20, mesh, phi1)
