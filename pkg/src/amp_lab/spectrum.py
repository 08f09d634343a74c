"""First and second Dirichlet eigenpairs of the 1D p-Laplacian.

The finite-element eigenvalues come from minimizing the discrete Rayleigh
quotient; ``shooting_eigenvalue`` is an independent ODE oracle that never
touches the mesh.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import BracketFailureError, MidpointNotANodeError, NoConvergenceError
from .fem import (
    Functional,
    GridFunction,
    Mesh1D,
    SignClass,
    _check_exponent,
    classify_values,
    count_sign_changes,
    dirichlet_grad_values,
    mass_grad_values,
)
from .options import DEFAULT_OPTIONS

_ARMIJO_C = 1e-4


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    fn: GridFunction
    index: int
    iterations: int
    residual: float
    p: float

    def summary(self):
        return {"p": self.p, "index": self.index, "value": self.value,
                "residual": self.residual, "iterations": self.iterations}


def lp_normalize(F, u):
    return u / F.mass(u) ** (1.0 / F.p)


def rayleigh_gradient(F, u):
    """Gradient of R(u) = int|u'|^p / int|u|^p at ``u``."""
    m = F.mass(u)
    R = F.dirichlet(u) / m
    g = dirichlet_grad_values(u, F.h, F.p) - R * mass_grad_values(u, F.h, F.p)
    return R, (F.p / m) * g


def minimize_rayleigh(F, u0, tol, max_iter, constraint=None, symmetry=None):
    """Preconditioned descent on the Rayleigh quotient over the L^p sphere.

    With ``constraint`` (a vector ``c``), iterates stay on ``c . u = 0``: the
    step direction is projected in the preconditioner metric, and each new
    iterate is additionally projected in the Euclidean metric to remove drift.
    ``symmetry`` ("even" or "odd") restricts iterates to functions that are
    symmetric or antisymmetric about the midpoint; the first eigenfunction is
    even and the second is odd.

    The stopping test uses ``max(tol, floor)`` where ``floor`` is the rounding
    floor of the residual (only relevant for p < 2).
    Returns ``(u, R, residual, iterations)``.
    """
    cc = None if constraint is None else float(constraint @ constraint)

    def project(v):
        if symmetry == "even":
            v = 0.5 * (v + v[::-1])
        elif symmetry == "odd":
            v = 0.5 * (v - v[::-1])
        return v if constraint is None else v - (constraint @ v / cc) * constraint

    def floor(v):
        # mirrored iterates keep the flat middle element exactly flat
        return 0.0 if symmetry == "even" else (F.p / F.mass(v)) * F.residual_floor(v)

    u = lp_normalize(F, project(u0))
    R, g = rayleigh_gradient(F, u)
    alpha = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        Pg = F.precondition(u, g)
        if constraint is not None:
            Pc = F.precondition(u, constraint)
            Pg = Pg - (constraint @ Pg) / (constraint @ Pc) * Pc
            g = project(g)
        residual = float(np.max(np.abs(g)))
        if residual <= max(tol, floor(u)):
            return u, R, residual, it - 1
        # P approximates the Hessian of int|u'|^p / p, so m/p makes alpha = 1
        # the inverse-iteration step when p = 2
        d = -(F.mass(u) / F.p) * Pg
        slope = float(g @ d)
        # scale-free initial step: the direction is tied to the scale of u
        alpha = min(1.0, 4.0 * alpha)
        noise = 8.0 * np.finfo(float).eps * abs(R)
        while True:
            trial = lp_normalize(F, project(u + alpha * d))
            R_trial = F.rayleigh(trial)
            if R_trial <= R + _ARMIJO_C * alpha * slope + noise:
                break
            alpha *= 0.5
            if alpha < 1e-14:
                raise NoConvergenceError(
                    "line search failed in Rayleigh descent",
                    {"iterations": it, "residual": residual, "value": R})
        u = trial
        R, g = rayleigh_gradient(F, u)
    g = project(g)
    residual = float(np.max(np.abs(g)))
    if residual <= max(tol, floor(u)):
        return u, R, residual, max_iter
    raise NoConvergenceError(
        f"Rayleigh descent did not reach residual {tol} in {max_iter} iterations",
        {"iterations": max_iter, "residual": residual, "value": R, "u": u})


def parabola_start(mesh):
    x = mesh.interior
    return (x - mesh.a) * (mesh.b - x)


def first_eigenpair(p, mesh, opts=DEFAULT_OPTIONS):
    _check_exponent(p)
    F = Functional(mesh, p, 0.0)
    u, R, res, it = minimize_rayleigh(F, parabola_start(mesh), opts.tol, opts.max_iter,
                                      symmetry="even")
    if u.sum() < 0:
        u = -u
    return EigenPair(value=R, fn=GridFunction(mesh, u), index=1, iterations=it,
                     residual=res, p=float(p))


def half_mesh(mesh):
    if mesh.n % 2 == 0:
        raise MidpointNotANodeError(
            f"second eigenpair needs odd n so the midpoint is a node, got n={mesh.n}")
    return Mesh1D(mesh.a, 0.5 * (mesh.a + mesh.b), (mesh.n - 1) // 2)


def second_eigenpair(p, mesh, opts=DEFAULT_OPTIONS):
    """Antisymmetric extension of the first eigenpair of the left half."""
    half = first_eigenpair(p, half_mesh(mesh), opts)
    v = half.fn.values
    full = np.concatenate([v, [0.0], -v[::-1]])
    F = Functional(mesh, p, 0.0)
    full = lp_normalize(F, full)
    R, g = rayleigh_gradient(F, full)
    return EigenPair(value=R, fn=GridFunction(mesh, full), index=2,
                     iterations=half.iterations, residual=float(np.max(np.abs(g))),
                     p=float(p))


def odd_eigenpair(p, mesh, opts=DEFAULT_OPTIONS):
    """Second eigenpair for any n: Rayleigh minimization over odd functions.

    Used where the mesh midpoint is not a node; for odd n it reproduces
    ``second_eigenpair`` up to solver tolerance.
    """
    _check_exponent(p)
    F = Functional(mesh, p, 0.0)
    x = mesh.interior
    u0 = np.sin(2.0 * np.pi * (x - mesh.a) / mesh.length)
    u, R, res, it = minimize_rayleigh(F, u0, opts.tol, opts.max_iter, symmetry="odd")
    if u[0] < 0:
        u = -u
    return EigenPair(value=R, fn=GridFunction(mesh, u), index=2, iterations=it,
                     residual=res, p=float(p))


def any_second_eigenpair(p, mesh, opts=DEFAULT_OPTIONS):
    if mesh.n % 2:
        return second_eigenpair(p, mesh, opts)
    return odd_eigenpair(p, mesh, opts)


def check_eigenpair(pair, delta_rel=1e-8):
    """Structural invariants of an eigenpair; returns a list of violations."""
    problems = []
    F = Functional(pair.fn.mesh, pair.p, pair.value)
    u = pair.fn.values
    if abs(F.mass(u) - 1.0) > 1e-12:
        problems.append("not L^p-normalized")
    if pair.value <= 0:
        problems.append("nonpositive eigenvalue")
    cls = classify_values(u, delta_rel)
    if pair.index == 1 and cls is not SignClass.POSITIVE:
        problems.append(f"first eigenfunction is {cls}")
    if pair.index == 2 and (cls is not SignClass.SIGN_CHANGING
                            or count_sign_changes(u, delta_rel) != 1):
        problems.append("second eigenfunction does not have exactly two nodal domains")
    return problems


# ---------------------------------------------------------------------------
# shooting oracle


def pi_p(p):
    """Half-period of the generalized sine: 2 pi / (p sin(pi/p))."""
    return 2.0 * math.pi / (p * math.sin(math.pi / p))


def closed_form_eigenvalue(p, L, k):
    return (p - 1.0) * (k * pi_p(p) / L) ** p


def _kth_zero_time(p, lam, k, t_max):
    """Time of the k-th positive zero of u, or inf if it occurs after t_max.

    Integrates u' = sign(w)|w|^{1/(p-1)}, w' = -lam |u|^{p-2} u from
    u = 0, w = 1, starting from the Taylor state at a tiny t0 so the initial
    zero of u is not reported as an event.
    """
    q = 1.0 / (p - 1.0)
    t0 = 1e-9
    y0 = [t0, 1.0 - lam * t0 ** p / p]

    def rhs(t, y):
        u, w = y
        return [math.copysign(abs(w) ** q, w),
                -lam * math.copysign(abs(u) ** (p - 1.0), u)]

    def crossing(t, y):
        return y[0]

    crossing.terminal = k
    sol = solve_ivp(rhs, (t0, t_max), y0, method="DOP853", events=crossing,
                    rtol=1e-13, atol=1e-15)
    zeros = sol.t_events[0]
    return zeros[k - 1] if zeros.size >= k else math.inf


def shooting_eigenvalue(p, L, k, tol=1e-10):
    """k-th Dirichlet eigenvalue on (0, L) by shooting + bracketed root finding."""
    _check_exponent(p)
    if not L > 0 or int(k) != k or k < 1:
        raise ValueError("need L > 0 and integer k >= 1")
    t_max = 2.0 * L

    def miss(lam):
        return min(_kth_zero_time(p, lam, k, t_max), t_max) - L

    lo, hi = 1.0, 1.0
    while miss(hi) > 0:
        hi *= 4.0
        if hi > 1e15:
            raise BracketFailureError("no k-th zero before L in the scanned range")
    lo = hi / 4.0
    while miss(lo) < 0:
        lo /= 4.0
        if lo < 1e-15:
            raise BracketFailureError("k-th zero never moves past L")
    return brentq(miss, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
