"""Solvers for -(|u'|^{p-2}u')' = lam |u|^{p-2}u + f with zero boundary values.

Each lambda window has its own variational characterization of the ground
state:

* lam < lambda_1: global minimum of the coercive energy;
* lambda_1 < lam < lambda*_f: minimum of E over the part of the Nehari
  manifold where H < 0 (the fiber maximum);
* lambda*_f < lam < lambda_2: minimum of E over the sign-changing Nehari set,
  where each sign part is fiber-scaled separately;
* p = 2: the unique solution of a tridiagonal linear system.

Variational iterates are finally polished by ``residual_refine``.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    BasinEscapeError,
    DivergenceError,
    FiberingInfeasibleError,
    NearResonanceError,
    NoAdmissibleStartError,
    NoConvergenceError,
    NotSubcriticalError,
    OutOfWindowError,
    PositivityViolationError,
    WatchdogError,
)
from .fem import (
    Functional,
    GridFunction,
    SignClass,
    _check_exponent,
    classify_values,
    mass_bands,
    stiffness_bands,
    tridiag_matvec,
    tridiag_solve,
)
from .options import DEFAULT_OPTIONS

_ARMIJO_C = 1e-4
_EPS = np.finfo(float).eps
_HESS_FLOOR = 1e-12


def _stalled(slope, F, u):
    """Predicted decrease below the rounding level of E: nothing left to gain."""
    return -slope <= 64.0 * _EPS * (abs(F.E(u)) + abs(F.pairing(u)))


class Method(str, Enum):
    DIRECT_MIN = "DirectMin"
    LINEAR_P2 = "LinearP2"
    NEHARI_MIN = "NehariMin"
    SIGN_CHANGING_NEHARI_MIN = "SignChangingNehariMin"
    REFINED = "Refined"
    LAMBDA_STAR_RESCALED = "LambdaStarRescaled"

    def __str__(self):
        return self.value


class StationaryKind(str, Enum):
    GLOBAL_MIN = "GlobalMin"
    GLOBAL_MAX = "GlobalMax"


@dataclass(frozen=True)
class FiberingResult:
    t_u: float
    energy_at_t: float
    stationary_kind: StationaryKind
    h_value: float
    pairing_value: float


def fiber_values(h_value, pairing_value, p):
    """Stationary point of t -> t^p H / p - t P for t > 0.

    t_u = |P/H|^{1/(p-1)}, and the energy there is
    (1/p - 1) |P|^{p/(p-1)} / |H|^{1/(p-1)} * sign(H).
    """
    if not h_value * pairing_value > 0:
        raise FiberingInfeasibleError(
            f"fibering needs H * pairing > 0, got H={h_value}, pairing={pairing_value}")
    q = 1.0 / (p - 1.0)
    aH, aP = abs(h_value), abs(pairing_value)
    t = aP ** q / aH ** q
    energy = (1.0 / p - 1.0) * aP ** (p * q) / aH ** q * math.copysign(1.0, h_value)
    kind = StationaryKind.GLOBAL_MIN if h_value > 0 else StationaryKind.GLOBAL_MAX
    return FiberingResult(t_u=t, energy_at_t=energy, stationary_kind=kind,
                          h_value=h_value, pairing_value=pairing_value)


def fibering_scale(u, p, lam, f, mesh=None):
    mesh = mesh or u.mesh
    F = Functional(mesh, p, lam, f)
    return fiber_values(F.H(u.values), F.pairing(u.values), p)


@dataclass(frozen=True, eq=False)
class Solution:
    u: GridFunction
    p: float
    lam: float
    energy: float
    pde_residual: float
    nehari_residual: float
    sign_class: SignClass
    method: Method
    pairing: float = 0.0
    h_value: float = 0.0
    iterations: int = 0
    history: tuple = field(default_factory=tuple)

    def summary(self):
        return {"p": self.p, "lambda": self.lam, "energy": self.energy,
                "pde_residual": self.pde_residual, "nehari_residual": self.nehari_residual,
                "sign_class": self.sign_class.value, "method": self.method.value,
                "pairing": self.pairing, "h_value": self.h_value,
                "iterations": self.iterations}


def make_solution(F, u, method, opts, iterations=0, history=()):
    g = F.grad_E(u)
    H, P = F.H(u), F.pairing(u)
    return Solution(
        u=GridFunction(F.mesh, u), p=F.p, lam=F.lam, energy=H / F.p - P,
        pde_residual=float(np.max(np.abs(g))), nehari_residual=abs(H - P),
        sign_class=classify_values(u, opts.delta_rel), method=method, pairing=P,
        h_value=H, iterations=iterations, history=tuple(history))


def effective_tol(F, u, tol):
    """The requested tolerance, raised to the rounding floor when needed."""
    return max(tol, F.residual_floor(u))


# ---------------------------------------------------------------------------
# p = 2


def discrete_eigenvalues_p2(mesh, kmax=None):
    """Eigenvalues of the P1 stiffness/mass pencil on a uniform mesh."""
    k = np.arange(1, (kmax or mesh.n) + 1)
    theta = k * np.pi / (mesh.n + 1)
    return 6.0 / mesh.h ** 2 * (1.0 - np.cos(theta)) / (2.0 + np.cos(theta))


def linear_solve_p2(lam, f, mesh=None, opts=DEFAULT_OPTIONS):
    """Solve (K - lam M) u = load exactly (tridiagonal)."""
    mesh = mesh or f.mesh
    eig = discrete_eigenvalues_p2(mesh)
    k = int(np.argmin(np.abs(eig - lam)))
    if abs(eig[k] - lam) <= 1e-6 * max(1.0, abs(lam)):
        raise NearResonanceError(
            f"lambda={lam} is within 1e-6 of discrete eigenvalue {eig[k]} (k={k + 1})")
    F = Functional(mesh, 2.0, lam, f)
    kd, ko = stiffness_bands(mesh.n, mesh.h)
    md, mo = mass_bands(mesh.n, mesh.h)
    u = tridiag_solve(kd - lam * md, ko - lam * mo, F.load)
    return make_solution(F, u, Method.LINEAR_P2, opts, iterations=1)


# ---------------------------------------------------------------------------
# refinement


def _newton_direction(F, u, g, mirror):
    diag, off = F.hessian_bands(u, _HESS_FLOOR if F.p < 2.0 else 1e-6)
    with np.errstate(all="ignore"):
        try:
            d = -tridiag_solve(diag, off, g)
        except (np.linalg.LinAlgError, ValueError):
            d = None
    if d is None or not np.all(np.isfinite(d)):
        d = -F.precondition(u, g)
    return 0.5 * (d + d[::-1]) if mirror else d


def residual_refine(u0, p, lam, f, mesh=None, opts=DEFAULT_OPTIONS, method=Method.REFINED,
                    max_iter=200, check_basin=True, mirror=False):
    """Drive grad E to ``opts.solve_tol`` by damped Newton on ||grad E||_2.

    The Hessian is tridiagonal; its |.|^{p-2} weights are floored so that it
    stays finite for p < 2 and nonsingular for p > 2. Steps are accepted only
    if they decrease ||grad E||_2, so the recorded history is monotone. Raises
    BasinEscapeError if the sign class of the iterate changes.
    """
    mesh = mesh or u0.mesh
    u_start = u0.values if isinstance(u0, GridFunction) else np.asarray(u0, float)
    if mirror:
        u_start = 0.5 * (u_start + u_start[::-1])
    F = Functional(mesh, p, lam, f)
    start_class = classify_values(u_start, opts.delta_rel)
    u = u_start.copy()
    g = F.grad_E(u)
    norm = float(np.linalg.norm(g))
    history = [norm]
    it = 0
    polish = 0
    for it in range(1, max_iter + 1):
        if float(np.max(np.abs(g))) <= effective_tol(F, u, opts.solve_tol):
            # a few extra full Newton steps while they still pay off, so
            # sums of nodal residuals (the Nehari defect) are small as well
            polish += 1
            if polish > 3:
                break
        d = _newton_direction(F, u, g, mirror)
        if polish:
            trial = u + d
            g_trial = F.grad_E(trial)
            n_trial = float(np.linalg.norm(g_trial))
            if not n_trial <= 0.25 * norm:
                break
            u, g, norm = trial, g_trial, n_trial
            history.append(norm)
            continue
        alpha = 1.0
        while True:
            trial = u + alpha * d
            g_trial = F.grad_E(trial)
            n_trial = float(np.linalg.norm(g_trial))
            if n_trial <= (1.0 - _ARMIJO_C * alpha) * norm:
                break
            alpha *= 0.5
            if alpha < 1e-12:
                break
        if alpha < 1e-12:
            # Newton stalled: stop at the rounding floor or give up
            if float(np.max(np.abs(g))) <= 1e3 * effective_tol(F, u, opts.solve_tol):
                break
            raise DivergenceError(
                f"residual refinement stalled at residual {np.max(np.abs(g)):.3e}")
        u, g, norm = trial, g_trial, n_trial
        history.append(norm)
    else:
        raise NoConvergenceError(
            f"residual refinement did not converge in {max_iter} steps",
            {"residual": float(np.max(np.abs(g)))})
    sol = make_solution(F, u, method, opts, iterations=it, history=history)
    if check_basin and sol.sign_class is not start_class:
        raise BasinEscapeError(
            f"refinement moved the iterate from {start_class} to {sol.sign_class}")
    return sol


# ---------------------------------------------------------------------------
# variational phases


def is_mirror_symmetric(f, rel=1e-13):
    """f equals its reflection about the midpoint up to rounding."""
    v = f.values
    return bool(np.max(np.abs(v - v[::-1])) <= rel * max(float(np.max(np.abs(v))), 1e-300))


def _descend_energy(F, u, tol, max_iter, mirror=False):
    """Preconditioned Armijo descent on E (coercive case).

    ``mirror`` keeps iterates symmetric about the midpoint, which is exact
    when the minimizer is unique and f is symmetric.
    """
    sym = (lambda v: 0.5 * (v + v[::-1])) if mirror else (lambda v: v)
    u = sym(u)
    E = F.E(u)
    g = F.grad_E(u)
    alpha = 1.0
    for it in range(1, max_iter + 1):
        if float(np.max(np.abs(g))) <= tol:
            return u, it - 1
        d = -F.precondition(u, g)
        slope = float(g @ d)
        if _stalled(slope, F, u):
            return u, it
        alpha = min(1.0, 4.0 * alpha)
        noise = 8.0 * _EPS * (abs(E) + abs(F.pairing(u)))
        while True:
            trial = sym(u + alpha * d)
            E_trial = F.E(trial)
            if E_trial <= E + _ARMIJO_C * alpha * slope + noise:
                break
            alpha *= 0.5
            if alpha < 1e-14:
                return u, it
        u, E = trial, E_trial
        g = F.grad_E(u)
    return u, max_iter


def solve_subcritical(p, lam, f, mesh=None, opts=DEFAULT_OPTIONS, lambda1=None, u0=None):
    """Unique positive solution for lam < lambda_1 (energy minimizer)."""
    _check_exponent(p)
    mesh = mesh or f.mesh
    if lambda1 is None:
        from .spectrum import first_eigenpair

        lambda1 = first_eigenpair(p, mesh, opts).value
    if not lam < lambda1:
        raise NotSubcriticalError(f"lambda={lam} is not below lambda_1={lambda1}")
    if p == 2.0:
        return linear_solve_p2(lam, f, mesh, opts)
    F = Functional(mesh, p, lam, f)
    start = (u0.values if isinstance(u0, GridFunction) else u0)
    if start is None or classify_values(start) is not SignClass.POSITIVE:
        start = np.full(mesh.n, 0.0)
    mirror = is_mirror_symmetric(f)
    u, it = _descend_energy(F, start, opts.solve_tol, 5000, mirror=mirror)
    try:
        sol = residual_refine(u, p, lam, f, mesh, opts, method=Method.DIRECT_MIN,
                              check_basin=False, mirror=mirror)
    except (DivergenceError, NoConvergenceError):
        if float(np.max(np.abs(F.grad_E(u)))) > effective_tol(F, u, opts.solve_tol):
            raise
        sol = make_solution(F, u, Method.DIRECT_MIN, opts)
    return Solution(**{**sol.__dict__, "iterations": it + sol.iterations})


def _parts(u):
    return np.maximum(u, 0.0), np.minimum(u, 0.0)


def _watchdog(F, plus, minus, lambda2, opts):
    """Both sign parts with H <= 0 below lambda_2 contradicts the spectrum."""
    if lambda2 is None or not np.any(plus) or not np.any(minus):
        return
    if F.lam < lambda2 * (1.0 - opts.margin_rel) and F.H(plus) <= 0 and F.H(minus) <= 0:
        raise WatchdogError(
            "iterate has both sign parts with H <= 0 below lambda_2",
            {"lambda": F.lam, "lambda2": lambda2, "H_plus": F.H(plus),
             "H_minus": F.H(minus)})


def _to_nehari(F, u):
    """Fiber-scale ``u`` onto N_lam, or None if the fiber has no critical point."""
    H, P = F.H(u), F.pairing(u)
    if not H * P > 0:
        return None
    return fiber_values(H, P, F.p).t_u * u


def _nehari_minus_admissible(F, u):
    return F.H(u) < 0 and F.pairing(u) < 0


def nehari_minimize(p, lam, f, mesh=None, opts=DEFAULT_OPTIONS, u0=None, phi1=None,
                    window=None, lambda2=None, star=None, descent_iter=20_000):
    """Ground state for lambda_1 < lam < lambda*_f as min of E on N_lam^-.

    ``window`` = (lambda_1, lambda*_f), if given, is enforced. The reduced
    functional J(u) = max_t E(t u) is 0-homogeneous and its gradient at a
    point of N_lam equals grad E, so preconditioned descent on E followed by
    fiber projection decreases J.

    For p != 2, J can have a second local minimum near the direction of the
    lambda*_f minimizer (its energy tends to 0 as lam -> lambda*_f). When
    ``star`` (a LambdaStarResult) and ``phi1`` are given, descent also runs
    from the best admissible tilt +-u* - c phi_1 and the lower minimum wins.
    """
    _check_exponent(p)
    mesh = mesh or f.mesh
    if window is not None and not window[0] < lam < window[1]:
        raise OutOfWindowError(f"lambda={lam} outside ({window[0]}, {window[1]})")
    F = Functional(mesh, p, lam, f)

    starts = []
    if u0 is not None:
        warm = u0.values if isinstance(u0, GridFunction) else np.asarray(u0)
        if _nehari_minus_admissible(F, warm):
            starts.append(_to_nehari(F, warm))
    x = mesh.interior
    for cand in ([] if phi1 is None else [-phi1.values]) + [
            -np.sin(np.pi * (x - mesh.a) / mesh.length)]:
        if _nehari_minus_admissible(F, cand):
            starts.append(_to_nehari(F, cand))
            break
    if star is not None and phi1 is not None and p != 2.0:
        tilt = _tilted_start(F, star.minimizer.values, phi1.values)
        if tilt is not None:
            starts.append(tilt)
    if not starts:
        raise NoAdmissibleStartError(
            f"no start with H < 0 and int f u < 0 at lambda={lam}")

    # p = 2 has a unique solution, so the first start suffices
    best, error = None, None
    for start in starts[:1] if p == 2.0 else starts:
        try:
            sol = _manifold_descent(F, start, _to_nehari_minus, _in_nehari_minus, lambda2,
                                    opts, Method.NEHARI_MIN, descent_iter)
        except NoConvergenceError as exc:
            error = exc
            continue
        if best is None or sol.energy < best.energy:
            best = sol
    if best is None:
        raise error
    return best


def _tilted_start(F, ustar, phi1):
    """Lowest-J admissible point of the family +-u* - c phi_1, fibered."""
    best, best_J = None, math.inf
    for sign in (1.0, -1.0):
        for c in np.geomspace(1e-9, 3.0, 80):
            v = sign * ustar - c * phi1
            if _nehari_minus_admissible(F, v):
                w = _to_nehari(F, v)
                J = F.E(w)
                if J < best_J:
                    best, best_J = w, J
    return best


def _to_nehari_minus(F, u):
    return _to_nehari(F, u) if _nehari_minus_admissible(F, u) else None


def _in_nehari_minus(sol):
    return sol.h_value < 0 and sol.pairing < 0


def _split_defect(F, u):
    """|E(u) - E(u+) - E(u-)|: nodal sign parts overlap on crossing elements."""
    plus, minus = _parts(u)
    return abs(F.E(u) - F.E(plus) - F.E(minus))


def _try_refine(F, u, J, valid, opts, method, max_iter):
    """Newton polish of a manifold iterate, kept only if it is the same minimum.

    The refined point must pass ``valid`` and must not raise the energy
    above the current manifold value ``J`` (a minimizer lies below every
    iterate of a descent that converges to it). The comparison allows for
    the split defect, since the projected set built from nodal sign parts
    is not exactly the set of functions whose parts satisfy the Nehari
    constraints.
    """
    try:
        sol = residual_refine(u, F.p, F.lam, F.f, F.mesh, opts, method=method,
                              max_iter=max_iter, check_basin=False)
    except (BasinEscapeError, DivergenceError, NoConvergenceError):
        return None
    slack = 1e-9 * abs(J) + 1e-14 + 2.0 * _split_defect(F, u)
    if not valid(sol) or sol.energy > J + slack:
        return None
    return sol


def _manifold_descent(F, v, project, valid, lambda2, opts, method, descent_iter,
                      newton_every=25):
    """Preconditioned descent of E over a projected set, with Newton finishing.

    ``project`` maps a trial point back to the set (or returns None when the
    trial left the admissible region, which halves the step). Close to the
    window ends the reduced functional is flat and descent is only linearly
    convergent, so every ``newton_every`` steps a guarded Newton polish is
    tried.
    """
    J = F.E(v)
    g = F.grad_E(v)
    alpha = 1.0
    it = 0
    for it in range(1, descent_iter + 1):
        if it % newton_every == 0:
            sol = _try_refine(F, v, J, valid, opts, method, 30)
            if sol is not None:
                return Solution(**{**sol.__dict__, "iterations": it + sol.iterations})
        d = -F.precondition(v, g)
        slope = float(g @ d)
        if slope >= 0 or _stalled(slope, F, v):
            break
        alpha = min(1.0, 4.0 * alpha)
        noise = 8.0 * _EPS * abs(J)
        accepted = False
        while alpha >= 1e-14:
            trial = v + alpha * d
            _watchdog(F, *_parts(trial), lambda2, opts)
            trial = project(F, trial)
            if trial is not None:
                J_trial = F.E(trial)
                if J_trial <= J + _ARMIJO_C * alpha * slope + noise:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            break
        v, J = trial, J_trial
        g = F.grad_E(v)
    sol = _try_refine(F, v, J, valid, opts, method, 200)
    if sol is None:
        raise NoConvergenceError(
            f"{method} descent did not reach a refinable minimizer",
            {"iterations": it, "residual": float(np.max(np.abs(g))), "energy": J})
    return Solution(**{**sol.__dict__, "iterations": it + sol.iterations})


def _m_project(F, w):
    """Fiber-scale each sign part of ``w`` onto N_lam; None if not admissible.

    The positive part must have H > 0 (fiber minimum) and the negative part
    H < 0 (fiber maximum).
    """
    plus, minus = _parts(w)
    if not np.any(plus) or not np.any(minus):
        return None
    Hp, Pp = F.H(plus), F.pairing(plus)
    Hm, Pm = F.H(minus), F.pairing(minus)
    if not (Hp > 0 and Pp > 0 and Hm < 0 and Pm < 0):
        return None
    return fiber_values(Hp, Pp, F.p).t_u * plus + fiber_values(Hm, Pm, F.p).t_u * minus


def shifted_nodal_start(F, lam1):
    """phi_2-like start whose nodal point is moved until it fibers into M_lam.

    A narrow positive hump (H > 0) next to a wide negative hump (H < 0);
    with the nodal point at the midpoint this is phi_2 itself, which is not
    admissible below lambda_2.
    """
    mesh = F.mesh
    x = (mesh.interior - mesh.a) / mesh.length
    for frac in np.linspace(0.45, 0.05, 41):
        for mirror in (False, True):
            xx = 1.0 - x if mirror else x
            pos = np.where(xx < frac, np.sin(np.pi * xx / frac), 0.0)
            neg = np.where(xx > frac, -np.sin(np.pi * (xx - frac) / (1.0 - frac)), 0.0)
            w = _m_project(F, pos + neg)
            if w is not None:
                return w
    return None


def sign_changing_nehari_minimize(p, lam, f, mesh=None, opts=DEFAULT_OPTIONS, u0=None,
                                  star=None, window=None, lambda2=None,
                                  descent_iter=20_000):
    """Ground state for lambda*_f < lam < lambda_2 as min of E on M_lam.

    ``star`` is a LambdaStarResult whose minimizer parts give the canonical
    start; ``window`` = (lambda*_f, lambda_2) is enforced when given.
    """
    _check_exponent(p)
    mesh = mesh or f.mesh
    if window is not None and not window[0] < lam < window[1]:
        raise OutOfWindowError(f"lambda={lam} outside ({window[0]}, {window[1]})")
    if not np.all(f.values[1:-1] > 0):
        raise PositivityViolationError("sign-changing ground states need f > 0 at all nodes")
    F = Functional(mesh, p, lam, f)

    starts = []
    if u0 is not None:
        starts.append(u0.values if isinstance(u0, GridFunction) else np.asarray(u0))
    if star is not None:
        starts.append(star.minimizer.values)
        starts.append(-star.minimizer.values)
    best = None
    for s in starts:
        w = _m_project(F, s)
        if w is not None and (best is None or F.E(w) < F.E(best)):
            best = w
    if best is None:
        best = shifted_nodal_start(F, None)
    if best is None:
        raise NoAdmissibleStartError(f"no admissible sign-changing start at lambda={lam}")

    return _manifold_descent(F, best, _m_project, _in_m, lambda2, opts,
                             Method.SIGN_CHANGING_NEHARI_MIN, descent_iter)


def _in_m(sol):
    return sol.sign_class is SignClass.SIGN_CHANGING


# ---------------------------------------------------------------------------
# window selection


@dataclass(frozen=True, eq=False)
class SpectralContext:
    """Spectral data shared by all solves for one (p, f, mesh)."""

    p: float
    f: object
    mesh: object
    phi1: object  # EigenPair
    phi2: object  # EigenPair
    star: object  # LambdaStarResult

    @property
    def lambda1(self):
        return self.phi1.value

    @property
    def lambda2(self):
        return self.phi2.value

    @property
    def lambda_star(self):
        return self.star.value


def spectral_context(p, f, mesh=None, opts=DEFAULT_OPTIONS):
    from .lambda_star import lambda_star
    from .spectrum import any_second_eigenpair, first_eigenpair

    _check_exponent(p)
    mesh = mesh or f.mesh
    phi1 = first_eigenpair(p, mesh, opts)
    phi2 = any_second_eigenpair(p, mesh, opts)
    star = lambda_star(p, f, mesh, opts, lambda1=phi1.value, phi2=phi2)
    return SpectralContext(p=float(p), f=f, mesh=mesh, phi1=phi1, phi2=phi2, star=star)


def window_of(lam, ctx, opts=DEFAULT_OPTIONS, star_margin=None):
    """Name of the solver window containing ``lam`` (or of the excluded zone).

    ``star_margin`` overrides the relative exclusion zone around lambda*_f.
    """
    m = opts.margin_rel
    ms = m if star_margin is None else star_margin
    l1, l2, ls = ctx.lambda1, ctx.lambda2, ctx.lambda_star
    if ctx.p == 2.0:
        return "linear"
    if lam < l1 * (1.0 - m):
        return "subcritical"
    if lam <= l1 * (1.0 + m):
        return "near-lambda1"
    if lam >= l2 * (1.0 - m):
        return "above-lambda2"
    if ctx.star.at_lambda2 or lam < ls * (1.0 - ms):
        return "nehari"
    if lam <= ls * (1.0 + ms):
        return "near-lambda-star"
    return "sign-changing"


def solve_ground_state(lam, ctx, opts=DEFAULT_OPTIONS, u0=None, check=True,
                       star_margin=None):
    """Ground state at ``lam`` with the solver of its window.

    With ``check`` the structural rules of ``solution_violations`` are
    enforced and a violation raises WatchdogError.
    """
    window = window_of(lam, ctx, opts, star_margin)
    p, f, mesh = ctx.p, ctx.f, ctx.mesh
    if window == "linear":
        sol = linear_solve_p2(lam, f, mesh, opts)
    elif window == "subcritical":
        sol = solve_subcritical(p, lam, f, mesh, opts, lambda1=ctx.lambda1, u0=u0)
    elif window == "nehari":
        sol = nehari_minimize(p, lam, f, mesh, opts, u0=u0, phi1=ctx.phi1.fn,
                              lambda2=ctx.lambda2, star=ctx.star)
    elif window == "sign-changing":
        sol = sign_changing_nehari_minimize(p, lam, f, mesh, opts, u0=u0, star=ctx.star,
                                            lambda2=ctx.lambda2)
    else:
        raise OutOfWindowError(f"lambda={lam} is in the excluded zone '{window}'")
    if check:
        problems = solution_violations(sol, ctx, opts)
        if problems:
            raise WatchdogError("; ".join(problems), {"lambda": lam, "solution": sol.summary()})
    return sol


def energy_scale(F, u):
    return float(np.abs(F.load) @ np.abs(u))


def solution_violations(sol, ctx, opts=DEFAULT_OPTIONS):
    """Structural rules every computed solution must obey; returns violations."""
    problems = []
    m = opts.margin_rel
    lam = sol.lam
    F = Functional(ctx.mesh, ctx.p, lam, ctx.f)
    u = sol.u.values
    if lam > ctx.lambda1 * (1.0 + m) and sol.sign_class is SignClass.POSITIVE:
        problems.append("positive solution above lambda_1")
    if (abs(sol.pairing) <= opts.solve_tol * energy_scale(F, u)
            and sol.sign_class is not SignClass.SIGN_CHANGING):
        problems.append("zero pairing without a sign change")
    if (ctx.lambda1 * (1.0 + m) < lam < ctx.lambda_star * (1.0 - m)
            and not sol.h_value < 0):
        problems.append("H >= 0 below lambda*_f")
    return problems
