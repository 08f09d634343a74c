"""scikit-learn style wrappers around the solvers.

Hyperparameters (p, interval, mesh size, tolerances) go to the constructor;
``fit`` takes the forcing weight f (WeightFunction, callable, or nodal
values at all n + 2 nodes) and stores results in trailing-underscore
attributes; ``predict`` evaluates the fitted grid function at points x.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _validation as v
from .amp import lambda_f_estimate
from .lambda_star import lambda_star
from .options import SolverOptions
from .solver import solve_ground_state, spectral_context
from .spectrum import any_second_eigenpair, first_eigenpair


class _MeshEstimator(BaseEstimator):
    def _mesh(self):
        v.check_p(self.p)
        return v.check_mesh(self.a, self.b, self.n)

    def _options(self):
        return SolverOptions(tol=self.tol, seed=self.seed)

    def _predict_grid(self, u, x):
        x = v.check_points(x, u.mesh)
        return u(x)


class EigenSolver(_MeshEstimator):
    """First (index=1) or second (index=2) Dirichlet eigenpair.

    ``fit`` ignores its arguments; they exist for pipeline compatibility.
    """

    def __init__(self, p=2.0, a=0.0, b=np.pi, n=400, index=1, tol=1e-10, seed=0):
        self.p = p
        self.a = a
        self.b = b
        self.n = n
        self.index = index
        self.tol = tol
        self.seed = seed

    def fit(self, X=None, y=None):
        mesh = self._mesh()
        if self.index not in (1, 2):
            raise ValueError(f"index must be 1 or 2, got {self.index!r}")
        solve = first_eigenpair if self.index == 1 else any_second_eigenpair
        self.pair_ = solve(float(self.p), mesh, self._options())
        self.eigenvalue_ = self.pair_.value
        self.eigenfunction_ = self.pair_.fn
        return self

    def predict(self, x):
        check_is_fitted(self, "pair_")
        return self._predict_grid(self.eigenfunction_, x)


class LambdaStar(_MeshEstimator):
    """Constrained Rayleigh minimum lambda*_f of the weight passed to ``fit``."""

    def __init__(self, p=2.0, a=0.0, b=np.pi, n=400, tol=1e-10, seed=0):
        self.p = p
        self.a = a
        self.b = b
        self.n = n
        self.tol = tol
        self.seed = seed

    def fit(self, X, y=None):
        mesh = self._mesh()
        f = v.check_weight(X, mesh)
        self.result_ = lambda_star(float(self.p), f, mesh, self._options())
        self.value_ = self.result_.value
        self.minimizer_ = self.result_.minimizer
        return self

    def predict(self, x):
        check_is_fitted(self, "result_")
        return self._predict_grid(self.minimizer_, x)


class GroundStateSolver(_MeshEstimator):
    """Ground state of the forced problem at ``lam``, window chosen automatically."""

    def __init__(self, p=2.0, lam=0.5, a=0.0, b=np.pi, n=400, tol=1e-10, solve_tol=1e-9,
                 seed=0):
        self.p = p
        self.lam = lam
        self.a = a
        self.b = b
        self.n = n
        self.tol = tol
        self.solve_tol = solve_tol
        self.seed = seed

    def _options(self):
        return SolverOptions(tol=self.tol, solve_tol=self.solve_tol, seed=self.seed)

    def fit(self, X, y=None):
        mesh = self._mesh()
        f = v.check_weight(X, mesh)
        opts = self._options()
        self.context_ = spectral_context(float(self.p), f, mesh, opts)
        self.solution_ = solve_ground_state(float(self.lam), self.context_, opts)
        self.sign_class_ = self.solution_.sign_class
        self.energy_ = self.solution_.energy
        return self

    def predict(self, x):
        check_is_fitted(self, "solution_")
        return self._predict_grid(self.solution_.u, x)


class AmpThreshold(_MeshEstimator):
    """Anti-maximum principle threshold lambda_f of the weight passed to ``fit``.

    ``predict(lam)`` returns True where lam lies in the certified Negative
    window (lambda_1, lambda_f].
    """

    def __init__(self, p=2.0, a=0.0, b=np.pi, n=400, tol=1e-10, bisect_rel=1e-4, seed=0):
        self.p = p
        self.a = a
        self.b = b
        self.n = n
        self.tol = tol
        self.bisect_rel = bisect_rel
        self.seed = seed

    def _options(self):
        return SolverOptions(tol=self.tol, bisect_rel=self.bisect_rel, seed=self.seed)

    def fit(self, X, y=None):
        mesh = self._mesh()
        f = v.check_weight(X, mesh)
        self.estimate_ = lambda_f_estimate(float(self.p), f, mesh, self._options())
        self.lambda_f_ = self.estimate_.lambda_f
        return self

    def predict(self, lam):
        check_is_fitted(self, "estimate_")
        lam = np.asarray(lam, dtype=float)
        return (lam > self.estimate_.lambda1) & (lam <= self.lambda_f_)
