import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from amp_lab import weights
from amp_lab.errors import BadExponentError, InvalidIntervalError, MeshMismatchError
from amp_lab.estimators import AmpThreshold, EigenSolver, GroundStateSolver, LambdaStar
from amp_lab.fem import Mesh1D, SignClass


def test_params_round_trip_and_clone():
    est = GroundStateSolver(p=3.0, lam=2.0, n=101)
    params = est.get_params()
    assert params["p"] == 3.0 and params["lam"] == 2.0 and params["n"] == 101
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(lam=5.0)
    assert est.lam == 5.0


def test_eigen_solver_predicts_sine():
    est = EigenSolver(p=2.0, n=999).fit()
    assert est.eigenvalue_ == pytest.approx(1.0, abs=1e-4)
    x = np.linspace(0, math.pi, 7)
    y = est.predict(x)
    scale = y[3]
    np.testing.assert_allclose(y / scale, np.sin(x), atol=1e-4)
    two = EigenSolver(p=2.0, n=999, index=2).fit()
    assert two.eigenvalue_ == pytest.approx(4.0, abs=1e-3)
    with pytest.raises(ValueError):
        EigenSolver(index=3).fit()


def test_lambda_star_accepts_callable_and_values():
    mesh = Mesh1D(0, math.pi, 401)
    by_callable = LambdaStar(n=401).fit(lambda x: 1 - np.sin(x) + 0.05)
    by_values = LambdaStar(n=401).fit(weights.one_minus_sin(mesh, 0.05).values)
    assert by_callable.value_ == pytest.approx(by_values.value_, rel=1e-12)
    assert by_callable.predict([0.0, math.pi]).tolist() == [0.0, 0.0]
    with pytest.raises(MeshMismatchError):
        LambdaStar(n=401).fit(np.ones(10))


def test_ground_state_solver():
    est = GroundStateSolver(p=3.0, lam=0.5, n=201).fit(lambda x: 1 + 0 * x)
    assert est.sign_class_ is SignClass.POSITIVE
    assert est.energy_ < 0
    assert np.all(est.predict(np.linspace(0.1, 3.0, 5)) > 0)


def test_amp_threshold_predicts_window():
    est = AmpThreshold(p=2.0, n=401).fit(lambda x: 1 - np.sin(x) + 0.05)
    inside = 0.5 * (est.estimate_.lambda1 + est.lambda_f_)
    assert est.predict([0.5, inside, est.lambda_f_ + 0.5]).tolist() == [False, True, False]


def test_validation_errors():
    with pytest.raises(NotFittedError):
        EigenSolver().predict([1.0])
    with pytest.raises(BadExponentError):
        EigenSolver(p=1.0).fit()
    with pytest.raises(InvalidIntervalError):
        EigenSolver(a=1.0, b=0.0).fit()
    est = EigenSolver(n=51).fit()
    with pytest.raises(ValueError):
        est.predict([5.0])
    with pytest.raises(ValueError):
        est.predict([[0.1, 0.2]])
