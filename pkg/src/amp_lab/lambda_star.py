"""The constrained Rayleigh minimum lambda*_f and its minimizer.

lambda*_f is the infimum of int|u'|^p / int|u|^p over nonzero u with
int f u = 0. The feasible set is a hyperplane in nodal coordinates (the
normal is the load vector of f), so the problem reduces to Rayleigh descent
with a linear constraint.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GeometryInfeasibleError,
    InfeasibleConstraintError,
    NoConvergenceError,
    NotApplicableError,
)
from .fem import (
    Functional,
    GridFunction,
    SignClass,
    WeightFunction,
    _check_exponent,
    classify_values,
    load_values,
    weighted_pairing,
)
from .options import DEFAULT_OPTIONS
from .spectrum import any_second_eigenpair, first_eigenpair, minimize_rayleigh


@dataclass(frozen=True, eq=False)
class LambdaStarResult:
    value: float
    minimizer: GridFunction
    constraint_residual: float
    rayleigh_residual: float
    iterations: int
    p: float
    lambda1: float
    lambda2: float
    start_values: dict = field(default_factory=dict)
    at_lambda2: bool = False

    def summary(self):
        return {"p": self.p, "value": self.value, "lambda1": self.lambda1,
                "lambda2": self.lambda2, "constraint_residual": self.constraint_residual,
                "iterations": self.iterations, "rayleigh_residual": self.rayleigh_residual,
                "at_lambda2": self.at_lambda2, "start_values": self.start_values}


def _starts(phi2, load, rng, mesh):
    """Initial points: the alpha*phi2^+ + phi2^- combination, phi2, random."""
    plus = np.maximum(phi2, 0.0)
    minus = np.minimum(phi2, 0.0)
    cp, cm = load @ plus, load @ minus
    if cp == 0.0:
        combo = plus
    elif cm == 0.0:
        combo = minus
    else:
        combo = (-cm / cp) * plus + minus
    x = (mesh.interior - mesh.a) / mesh.length
    k = np.arange(1, 9)
    coeffs = rng.standard_normal(k.size) / k
    rand = np.sin(np.pi * np.outer(x, k)) @ coeffs
    return {"phi2_parts": combo, "phi2": phi2, "random": rand}


def lambda_star(p, f, mesh=None, opts=DEFAULT_OPTIONS, lambda1=None, phi2=None):
    """Multi-start constrained Rayleigh minimization; best start wins.

    ``lambda1`` and ``phi2`` (an EigenPair) may be supplied to avoid
    recomputing the spectrum on the same mesh.
    """
    _check_exponent(p)
    mesh = mesh or f.mesh
    load = load_values(f.values, mesh.h)
    if not np.any(load != 0.0):
        raise InfeasibleConstraintError("weight vanishes after discretization")
    if lambda1 is None:
        lambda1 = first_eigenpair(p, mesh, opts).value
    if phi2 is None:
        phi2 = any_second_eigenpair(p, mesh, opts)
    lambda2 = phi2.value

    F = Functional(mesh, p, 0.0, f)
    rng = np.random.default_rng(opts.seed)
    starts = _starts(phi2.fn.values, load, rng, mesh)
    tol = opts.star_gtol * (1.0 + lambda2)

    def run(item):
        name, u0 = item
        try:
            return name, minimize_rayleigh(F, u0, tol, opts.max_iter, constraint=load)
        except NoConvergenceError as exc:
            return name, exc

    if opts.jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(opts.jobs) as pool:
            outcomes = list(pool.map(run, starts.items()))
    else:
        outcomes = [run(item) for item in starts.items()]

    done = {name: out for name, out in outcomes if not isinstance(out, Exception)}
    if not done:
        raise NoConvergenceError("no start converged for lambda*_f",
                                 {name: out.diagnostics for name, out in outcomes})
    best = min(done, key=lambda name: done[name][1])
    u, R, residual, _ = done[best]
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    minimizer = GridFunction(mesh, u)
    return LambdaStarResult(
        value=R,
        minimizer=minimizer,
        constraint_residual=abs(weighted_pairing(f, minimizer)),
        rayleigh_residual=residual,
        iterations=sum(out[3] for out in done.values()),
        p=float(p),
        lambda1=lambda1,
        lambda2=lambda2,
        start_values={name: out[1] for name, out in done.items()},
        at_lambda2=R >= lambda2 * (1.0 - opts.margin_rel),
    )


@dataclass(frozen=True, eq=False)
class CheckReport:
    """Outcome of rescaling a lambda*_f minimizer into a solution."""

    solution: GridFunction
    scale: float
    sign: int
    pde_residual: float
    residual_scale: float
    energy: float
    energy_scale: float
    rayleigh_gap: float
    sign_class: SignClass

    def passed(self, rel_tol=1e-6, rayleigh_tol=1e-6):
        return (self.pde_residual <= rel_tol * self.residual_scale
                and abs(self.energy) <= rel_tol * self.energy_scale
                and self.sign_class is SignClass.SIGN_CHANGING
                and self.rayleigh_gap <= rayleigh_tol)

    def summary(self):
        return {"scale": self.scale, "sign": self.sign, "pde_residual": self.pde_residual,
                "residual_scale": self.residual_scale, "energy": self.energy,
                "energy_scale": self.energy_scale, "rayleigh_gap": self.rayleigh_gap,
                "sign_class": self.sign_class.value}


def minimizer_is_solution_check(res, p, f, mesh=None, opts=DEFAULT_OPTIONS):
    """Rescale the minimizer u to v = s c u solving the problem at lambda*_f.

    The minimizer satisfies grad_H(u) = kappa * load for a Lagrange factor
    kappa; since grad_H is (p-1)-homogeneous and odd, v = sign(k)|k|^{-1/(p-1)} u
    solves grad_H(v) = load. kappa is fitted by least squares.
    """
    mesh = mesh or f.mesh
    if res.value >= res.lambda2 * (1.0 - opts.margin_rel):
        raise NotApplicableError(
            "lambda*_f equals lambda_2 within resolution; the minimizer need not "
            "rescale to a solution")
    F = Functional(mesh, p, res.value, f)
    u = res.minimizer.values
    g = F.grad_H(u)
    kappa = float(g @ F.load) / float(F.load @ F.load)
    sign = 1 if kappa > 0 else -1
    c = abs(kappa) ** (-1.0 / (p - 1.0))
    v = sign * c * u
    resid = float(np.max(np.abs(F.grad_E(v))))
    return CheckReport(
        solution=GridFunction(mesh, v),
        scale=c,
        sign=sign,
        pde_residual=resid,
        residual_scale=float(np.max(np.abs(F.load))),
        energy=F.E(v),
        energy_scale=float(np.abs(F.load) @ np.abs(v)),
        rayleigh_gap=abs(F.rayleigh(v) - res.value),
        sign_class=classify_values(v, opts.delta_rel),
    )


# ---------------------------------------------------------------------------
# weights whose lambda*_f approaches lambda_1


@dataclass(frozen=True, eq=False)
class VanishingConstruction:
    weight: WeightFunction
    core: GridFunction  # level-truncated phi_1, compactly supported
    bump: GridFunction  # nonpositive, unit int|xi'|^p
    beta: float
    a_n: float

    @property
    def witness(self):
        """The feasible function core + beta * bump."""
        return self.core + self.beta * self.bump


def vanishing_construction(n_index, mesh, phi1, p=2.0):
    """Weight f_n = 1 on supp v_n, a_n on a small bump region, 0 elsewhere.

    v_n = (phi1 - phi1(a + b_n))^+ with b_n = L / (4 n_index), and the bump
    xi_n <= 0 sits in the middle half of (a, a + b_n). a_n > 0 makes
    v_n + xi_n / n_index orthogonal to f_n.
    """
    if int(n_index) != n_index or n_index < 1:
        raise ValueError("n_index must be a positive integer")
    x = mesh.interior
    phi = phi1.values / np.max(phi1.values)
    cut = mesh.a + mesh.length / (4.0 * n_index)
    level = np.interp(cut, mesh.nodes, phi1.full / np.max(phi1.values))
    core = np.maximum(phi - level, 0.0)

    lo, hi = cut - mesh.a, cut - mesh.a
    in_bump = (x > mesh.a + 0.25 * lo) & (x < mesh.a + 0.75 * hi)
    idx = np.flatnonzero(in_bump)
    core_idx = np.flatnonzero(core > 0)
    if idx.size < 3 or core_idx.size < 3 or core_idx[0] - idx[-1] < 4:
        raise GeometryInfeasibleError(
            f"mesh too coarse to separate the bump from the truncated phi_1 at n={n_index}")
    t = (x[idx] - x[idx[0] - 1]) / (x[idx[-1] + 1] - x[idx[0] - 1])
    bump = np.zeros(mesh.n)
    bump[idx] = -np.sin(np.pi * t) ** 2
    F = Functional(mesh, p, 0.0)
    bump /= F.dirichlet(bump) ** (1.0 / p)
    beta = 1.0 / n_index

    # closures of the supports in full-node indexing (interior i -> node i + 1)
    f_core = np.zeros(mesh.n + 2)
    f_core[core_idx[0]:core_idx[-1] + 3] = 1.0
    f_bump = np.zeros(mesh.n + 2)
    f_bump[idx[0]:idx[-1] + 3] = 1.0
    w = core + beta * bump
    a_n = (load_values(f_core, mesh.h) @ w) / -(load_values(f_bump, mesh.h) @ w)
    if not a_n > 0:
        raise GeometryInfeasibleError("could not balance the weight with a positive a_n")
    weight = WeightFunction(mesh, f_core + a_n * f_bump)
    return VanishingConstruction(weight=weight, core=GridFunction(mesh, core),
                                 bump=GridFunction(mesh, bump), beta=beta, a_n=a_n)


def vanishing_sequence_weight(n_index, mesh, phi1, p=2.0):
    return vanishing_construction(n_index, mesh, phi1, p).weight
