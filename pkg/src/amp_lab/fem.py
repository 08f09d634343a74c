"""Piecewise-linear finite elements on a uniform 1D mesh.

Functions in W^{1,p}_0(a, b) are represented by their interior nodal values;
the two boundary values are structurally zero and never stored. Weights ``f``
are sampled at every node, boundary included, because they need not vanish
there.

Integrals of ``|u|^p`` and ``f u`` use 4-point Gauss-Legendre per element;
``|u'|^p`` is integrated exactly since ``u'`` is constant per element.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import solve_banded

from .errors import (
    BadExponentError,
    InvalidIntervalError,
    MeshMismatchError,
    TooCoarseError,
)

_gx, _gw = np.polynomial.legendre.leggauss(4)
GAUSS_XI = 0.5 * (_gx + 1.0)
GAUSS_W = 0.5 * _gw
del _gx, _gw


@dataclass(frozen=True)
class Mesh1D:
    a: float
    b: float
    n: int
    h: float = field(init=False)

    def __post_init__(self):
        if not self.b > self.a:
            raise InvalidIntervalError(f"need b > a, got a={self.a}, b={self.b}")
        if int(self.n) != self.n or self.n < 2:
            raise TooCoarseError(f"need at least 2 interior nodes, got n={self.n}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "h", (self.b - self.a) / (self.n + 1))

    @property
    def nodes(self):
        """All n + 2 node coordinates, boundary included."""
        return self.a + self.h * np.arange(self.n + 2)

    @property
    def interior(self):
        return self.nodes[1:-1]

    @property
    def length(self):
        return self.b - self.a

    def refine(self):
        """Nested refinement n -> 2n + 1 (every old node stays a node)."""
        return Mesh1D(self.a, self.b, 2 * self.n + 1)


def make_mesh(a, b, n):
    return Mesh1D(a, b, n)


def _frozen_array(values, length, what):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise MeshMismatchError(f"{what} needs {length} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} values must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridFunction:
    mesh: Mesh1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _frozen_array(self.values, self.mesh.n, "GridFunction"))

    @classmethod
    def from_callable(cls, mesh, fn):
        return cls(mesh, fn(mesh.interior))

    @property
    def full(self):
        """Nodal values with the zero boundary values attached."""
        return _with_boundary(self.values)

    def with_values(self, values):
        return GridFunction(self.mesh, values)

    def __neg__(self):
        return GridFunction(self.mesh, -self.values)

    def __mul__(self, c):
        return GridFunction(self.mesh, float(c) * self.values)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same_mesh(self.mesh, other.mesh)
        return GridFunction(self.mesh, self.values + other.values)

    def __sub__(self, other):
        _check_same_mesh(self.mesh, other.mesh)
        return GridFunction(self.mesh, self.values - other.values)

    def __call__(self, x):
        """Evaluate the piecewise-linear interpolant at points ``x``."""
        return np.interp(x, self.mesh.nodes, self.full, left=0.0, right=0.0)


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Nodal samples of a weight ``f`` at all n + 2 nodes."""

    mesh: Mesh1D
    values: np.ndarray
    nonneg: bool = True

    def __post_init__(self):
        values = _frozen_array(self.values, self.mesh.n + 2, "WeightFunction")
        object.__setattr__(self, "values", values)
        if self.nonneg:
            if np.any(values < 0):
                raise ValueError("nonnegative weight has a negative sample")
            if not np.any(values > 0):
                raise ValueError("weight must not vanish identically")

    @classmethod
    def from_callable(cls, mesh, fn, nonneg=True):
        return cls(mesh, fn(mesh.nodes), nonneg=nonneg)

    def __mul__(self, c):
        return WeightFunction(self.mesh, float(c) * self.values, nonneg=self.nonneg and c > 0)

    __rmul__ = __mul__

    def __call__(self, x):
        return np.interp(x, self.mesh.nodes, self.values)

    def strictly_positive(self):
        return bool(np.all(self.values > 0))


@dataclass(frozen=True)
class FunctionalValue:
    dirichlet_power: float
    mass_power: float
    pairing: float
    h_lambda: float
    e_lambda: float


class SignClass(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    SIGN_CHANGING = "SignChanging"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


def _check_exponent(p):
    if not p > 1:
        raise BadExponentError(f"exponent p must exceed 1, got {p}")


def _check_same_mesh(m1, m2):
    if m1 != m2:
        raise MeshMismatchError(f"mesh mismatch: {m1} vs {m2}")


def _with_boundary(values):
    full = np.zeros(values.shape[0] + 2)
    full[1:-1] = values
    return full


def signed_power(x, q):
    """``sign(x) |x|^q``, defined as 0 at 0."""
    return np.sign(x) * np.abs(x) ** q


# ---------------------------------------------------------------------------
# array kernels: ``u`` holds interior values, ``h`` the spacing


def _at_gauss(full):
    return np.outer(full[:-1], 1.0 - GAUSS_XI) + np.outer(full[1:], GAUSS_XI)


def mass_power_values(u, h, p):
    return h * float(np.sum((np.abs(_at_gauss(_with_boundary(u))) ** p) @ GAUSS_W))


def dirichlet_power_values(u, h, p):
    s = np.diff(_with_boundary(u)) / h
    return h * float(np.sum(np.abs(s) ** p))


def dirichlet_grad_values(u, h, p):
    """Gradient of ``(1/p) * int |u'|^p`` with respect to interior values."""
    phi = signed_power(np.diff(_with_boundary(u)) / h, p - 1.0)
    return phi[:-1] - phi[1:]


def mass_grad_values(u, h, p):
    """Gradient of ``(1/p) * int |u|^p`` with respect to interior values."""
    c = h * signed_power(_at_gauss(_with_boundary(u)), p - 1.0) * GAUSS_W
    left = c @ (1.0 - GAUSS_XI)
    right = c @ GAUSS_XI
    return right[:-1] + left[1:]


def load_values(f_full, h):
    """Load vector ``int f * hat_i`` for piecewise-linear ``f`` (exact)."""
    return h / 6.0 * (f_full[:-2] + 4.0 * f_full[1:-1] + f_full[2:])


def dirichlet_hessian_bands(u, h, p, floor=0.0):
    """Tridiagonal Hessian of ``(1/p) int |u'|^p`` as (diag, offdiag).

    ``floor`` bounds element slopes away from zero (relative to the largest
    slope) so the weights ``|u'|^{p-2}`` stay finite and positive.
    """
    s = np.abs(np.diff(_with_boundary(u)) / h)
    smax = s.max() if s.size else 0.0
    if smax == 0.0:
        s = np.ones_like(s)
    elif floor > 0:
        s = np.maximum(s, floor * smax)
    w = (p - 1.0) * s ** (p - 2.0) / h
    return w[:-1] + w[1:], -w[1:-1]


def mass_hessian_bands(u, h, p, floor=0.0):
    """Tridiagonal Hessian of ``(1/p) int |u|^p`` as (diag, offdiag)."""
    uq = np.abs(_at_gauss(_with_boundary(u)))
    umax = uq.max() if uq.size else 0.0
    if umax == 0.0:
        uq = np.ones_like(uq)
    elif floor > 0:
        uq = np.maximum(uq, floor * umax)
    c = (p - 1.0) * h * uq ** (p - 2.0) * GAUSS_W
    ll = c @ (1.0 - GAUSS_XI) ** 2
    rr = c @ GAUSS_XI ** 2
    lr = c @ (GAUSS_XI * (1.0 - GAUSS_XI))
    return rr[:-1] + ll[1:], lr[1:-1]


def stiffness_bands(n, h):
    return np.full(n, 2.0 / h), np.full(n - 1, -1.0 / h)


def mass_bands(n, h):
    return np.full(n, 4.0 * h / 6.0), np.full(n - 1, h / 6.0)


def tridiag_solve(diag, off, rhs):
    ab = np.zeros((3, diag.shape[0]))
    ab[0, 1:] = off
    ab[1] = diag
    ab[2, :-1] = off
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def tridiag_matvec(diag, off, x):
    y = diag * x
    y[:-1] += off * x[1:]
    y[1:] += off * x[:-1]
    return y


# ---------------------------------------------------------------------------
# public operations on grid functions


def integral_abs_pow(u, p, mesh=None):
    _check_exponent(p)
    mesh = mesh or u.mesh
    _check_same_mesh(u.mesh, mesh)
    return mass_power_values(u.values, mesh.h, p)


def integral_grad_pow(u, p, mesh=None):
    _check_exponent(p)
    mesh = mesh or u.mesh
    _check_same_mesh(u.mesh, mesh)
    return dirichlet_power_values(u.values, mesh.h, p)


def weighted_pairing(f, u, mesh=None):
    """``int f u dx`` by Gauss quadrature of the two interpolants."""
    mesh = mesh or u.mesh
    _check_same_mesh(u.mesh, mesh)
    _check_same_mesh(f.mesh, mesh)
    fq = _at_gauss(f.values)
    uq = _at_gauss(u.full)
    return mesh.h * float(np.sum((fq * uq) @ GAUSS_W))


def h_lambda(u, p, lam, mesh=None):
    return integral_grad_pow(u, p, mesh) - lam * integral_abs_pow(u, p, mesh)


def e_lambda(u, p, lam, f, mesh=None):
    dp = integral_grad_pow(u, p, mesh)
    mp = integral_abs_pow(u, p, mesh)
    pr = weighted_pairing(f, u, mesh)
    h = dp - lam * mp
    return FunctionalValue(dirichlet_power=dp, mass_power=mp, pairing=pr,
                           h_lambda=h, e_lambda=h / p - pr)


def grad_e_lambda(u, p, lam, f, mesh=None):
    """Nodal gradient of E_lambda: the weak residual tested with each hat."""
    _check_exponent(p)
    mesh = mesh or u.mesh
    _check_same_mesh(u.mesh, mesh)
    _check_same_mesh(f.mesh, mesh)
    h = mesh.h
    g = (dirichlet_grad_values(u.values, h, p) - lam * mass_grad_values(u.values, h, p)
         - load_values(f.values, h))
    return GridFunction(mesh, g)


def split_parts(u):
    return (GridFunction(u.mesh, np.maximum(u.values, 0.0)),
            GridFunction(u.mesh, np.minimum(u.values, 0.0)))


def classify_values(values, delta_rel=1e-8):
    if not 0 < delta_rel < 1:
        raise ValueError("delta_rel must lie in (0, 1)")
    vmax = np.max(np.abs(values)) if values.size else 0.0
    if vmax == 0.0:
        return SignClass.INDETERMINATE
    tau = delta_rel * vmax
    if np.all(values > tau):
        return SignClass.POSITIVE
    if np.all(values < -tau):
        return SignClass.NEGATIVE
    if np.any(values > tau) and np.any(values < -tau):
        return SignClass.SIGN_CHANGING
    return SignClass.INDETERMINATE


def sign_classify(u, delta_rel=1e-8):
    return classify_values(u.values, delta_rel)


def count_sign_changes(values, delta_rel=1e-8):
    """Number of sign alternations among nodes exceeding the noise threshold."""
    tau = delta_rel * np.max(np.abs(values))
    signs = np.sign(values[np.abs(values) > tau])
    return int(np.count_nonzero(np.diff(signs)))


class Functional:
    """E_lambda and friends on raw interior arrays for one (mesh, p, lambda, f).

    Iterative solvers evaluate these thousands of times, so the load vector is
    computed once and no GridFunction wrapping happens in the hot path.
    """

    def __init__(self, mesh, p, lam, f=None):
        _check_exponent(p)
        if f is not None:
            _check_same_mesh(f.mesh, mesh)
        self.mesh = mesh
        self.h = mesh.h
        self.p = float(p)
        self.lam = float(lam)
        self.f = f
        self.load = (load_values(f.values, mesh.h) if f is not None
                     else np.zeros(mesh.n))

    def with_lambda(self, lam):
        return Functional(self.mesh, self.p, lam, self.f)

    def dirichlet(self, u):
        return dirichlet_power_values(u, self.h, self.p)

    def mass(self, u):
        return mass_power_values(u, self.h, self.p)

    def H(self, u):
        return self.dirichlet(u) - self.lam * self.mass(u)

    def pairing(self, u):
        return float(self.load @ u)

    def E(self, u):
        return self.H(u) / self.p - self.pairing(u)

    def grad_H(self, u):
        """Gradient of H/p, which is (p-1)-homogeneous and odd."""
        return (dirichlet_grad_values(u, self.h, self.p)
                - self.lam * mass_grad_values(u, self.h, self.p))

    def grad_E(self, u):
        return self.grad_H(u) - self.load

    def hessian_bands(self, u, floor=1e-6):
        dd, do = dirichlet_hessian_bands(u, self.h, self.p, floor)
        md, mo = mass_hessian_bands(u, self.h, self.p, floor)
        return dd - self.lam * md, do - self.lam * mo

    def preconditioner_bands(self, u):
        """SPD tridiagonal metric: the weighted stiffness at ``u``.

        For p < 2 the slope floor sits near rounding level so the huge
        curvature at flat elements is kept; for p > 2 a coarser floor keeps
        the vanishing weights away from singularity.
        """
        if self.p == 2.0:
            return stiffness_bands(self.mesh.n, self.h)
        floor = 1e-12 if self.p < 2.0 else 1e-2
        return dirichlet_hessian_bands(u, self.h, self.p, floor)

    def precondition(self, u, g):
        d, o = self.preconditioner_bands(u)
        return tridiag_solve(d, o, g)

    def residual_floor(self, u):
        """Max-norm of grad_E perturbations caused by rounding ``u``.

        For p < 2, ``|s|^{p-2} s`` is only Hoelder continuous at s = 0, so a
        nearly flat element amplifies rounding of nodal values far beyond
        machine epsilon; tolerances below this floor are unattainable.
        """
        eps = np.finfo(float).eps
        umax = float(np.max(np.abs(u))) if u.size else 0.0
        s = np.abs(np.diff(_with_boundary(u))) / self.h
        ds = 4.0 * eps * umax / self.h
        stiff = float(np.max((s + ds) ** (self.p - 1.0) - s ** (self.p - 1.0)))
        scale = (float(np.max(s)) ** (self.p - 1.0)
                 + abs(self.lam) * self.h * umax ** (self.p - 1.0)
                 + float(np.max(np.abs(self.load))))
        return 4.0 * stiff + 16.0 * eps * scale

    def rayleigh(self, u):
        return self.dirichlet(u) / self.mass(u)
