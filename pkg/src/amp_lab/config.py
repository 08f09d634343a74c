"""Run configuration: plain ``key = value`` files plus command-line overrides."""

import math
import shlex
from dataclasses import dataclass, fields, replace

import numpy as np

from . import weights
from .errors import BadExponentError, ConfigError, MeshMismatchError
from .options import SolverOptions

F_KINDS = ("constant", "one_minus_sin", "one_minus_sin_plus", "phi1", "nodal_file",
           "vanishing_sequence", "random")


@dataclass(frozen=True)
class RunConfig:
    p: float = 2.0
    a: float = 0.0
    b: float = math.pi
    n: int = 400
    f: tuple = ("one_minus_sin",)
    lam: float = None
    lambda_grid: tuple = None
    points: int = 50
    index: int = 1
    tol: float = 1e-10
    shooting_tol: float = 1e-10
    solve_tol: float = 1e-9
    star_gtol: float = 1e-9
    bisect_rel: float = 1e-4
    margin_rel: float = 1e-3
    delta_rel: float = 1e-8
    max_iter: int = 200000
    seed: int = 0
    jobs: int = 1
    output_dir: str = None

    def __post_init__(self):
        if not self.p > 1:
            raise BadExponentError(f"p must be > 1, got {self.p}")
        for name in ("tol", "shooting_tol", "solve_tol", "star_gtol", "bisect_rel",
                     "margin_rel", "delta_rel"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.lambda_grid is not None and np.any(np.diff(self.lambda_grid) <= 0):
            raise ValueError("lambda_grid must be strictly increasing")
        check_f_spec(self.f)

    def options(self):
        return SolverOptions(tol=self.tol, max_iter=self.max_iter,
                             shooting_tol=self.shooting_tol, solve_tol=self.solve_tol,
                             star_gtol=self.star_gtol, bisect_rel=self.bisect_rel,
                             margin_rel=self.margin_rel, delta_rel=self.delta_rel,
                             seed=self.seed, jobs=self.jobs)

    def with_(self, **changes):
        return replace(self, **changes)


def check_f_spec(spec):
    """Validate a weight spec such as ('constant', '1') or ('phi1',)."""
    if not spec or spec[0] not in F_KINDS:
        raise ValueError(f"unknown weight kind {spec[0] if spec else ''!r}; "
                         f"expected one of {', '.join(F_KINDS)}")
    kind, args = spec[0], spec[1:]
    need = {"constant": 1, "one_minus_sin_plus": 1, "nodal_file": 1,
            "vanishing_sequence": 1}.get(kind, 0)
    if kind == "random":
        if len(args) > 1:
            raise ValueError("random takes at most a seed")
    elif len(args) != need:
        raise ValueError(f"weight kind {kind} takes {need} argument(s), got {len(args)}")
    if kind in ("constant", "one_minus_sin_plus"):
        c = float(args[0])
        if not (math.isfinite(c) and c >= 0):
            raise ValueError(f"{kind} needs a finite constant >= 0")
    if kind in ("vanishing_sequence", "random") and args:
        if int(args[0]) != float(args[0]):
            raise ValueError(f"{kind} needs an integer")
    return tuple(spec)


def build_weight(spec, mesh, p, opts):
    """WeightFunction on ``mesh`` described by ``spec``."""
    kind, args = spec[0], spec[1:]
    if kind == "constant":
        return weights.constant(mesh, float(args[0]))
    if kind == "one_minus_sin":
        return weights.one_minus_sin(mesh)
    if kind == "one_minus_sin_plus":
        return weights.one_minus_sin(mesh, float(args[0]))
    if kind == "random":
        return weights.random_smooth(mesh, int(args[0]) if args else opts.seed)
    if kind == "nodal_file":
        from .io import weight_from_table

        with open(args[0]) as fh:
            f = weight_from_table(fh.read())
        if f.mesh != mesh:
            raise MeshMismatchError(
                f"{args[0]} is on ({f.mesh.a}, {f.mesh.b}) with n={f.mesh.n}, "
                f"run mesh is ({mesh.a}, {mesh.b}) with n={mesh.n}")
        return f
    from .spectrum import first_eigenpair

    phi1 = first_eigenpair(p, mesh, opts).fn
    if kind == "phi1":
        return weights.from_grid(phi1)
    from .lambda_star import vanishing_sequence_weight

    return vanishing_sequence_weight(int(args[0]), mesh, phi1, p)


def describe_weight(spec):
    return " ".join(spec)


# ---------------------------------------------------------------------------
# file parsing


def _grid(text):
    """'lo:hi:count' or a comma/space separated list."""
    if ":" in text:
        lo, hi, count = text.split(":")
        return tuple(np.linspace(float(lo), float(hi), int(count)).tolist())
    return tuple(float(t) for t in text.replace(",", " ").split())


_CONVERT = {
    "p": float, "a": float, "b": float, "n": int, "f": lambda s: tuple(shlex.split(s)),
    "lambda": float, "lambda_grid": _grid, "points": int, "index": int, "tol": float,
    "shooting_tol": float, "solve_tol": float, "star_gtol": float, "bisect_rel": float,
    "margin_rel": float, "delta_rel": float, "max_iter": int, "seed": int, "jobs": int,
    "output_dir": str,
}
_FIELD = {"lambda": "lam"}


def _convert(key, raw):
    if key == "b" and raw.strip().lower() == "pi":
        return math.pi
    value = _CONVERT[key](raw)
    if key == "n" and value < 2:
        raise ValueError("n must be >= 2")
    if key == "p" and not value > 1:
        raise ValueError("p must be > 1")
    if key == "f":
        check_f_spec(value)
    if key in ("tol", "shooting_tol", "solve_tol", "star_gtol", "bisect_rel",
               "margin_rel", "delta_rel") and not value > 0:
        raise ValueError(f"{key} must be positive")
    if key == "lambda_grid" and (len(value) == 0 or np.any(np.diff(value) <= 0)):
        raise ValueError("lambda_grid must be nonempty and strictly increasing")
    return value


def parse_config_text(text):
    """Parse ``key = value`` lines into a dict of RunConfig field values."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _CONVERT:
            raise ConfigError(f"unknown key {key!r}", lineno)
        try:
            values[_FIELD.get(key, key)] = _convert(key, raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"malformed value for {key}: {raw!r} ({exc})", lineno) from None
    return values


def parse_config(path):
    with open(path) as fh:
        values = parse_config_text(fh.read())
    return RunConfig(**values)


def merge(base, overrides):
    """Apply non-None command-line overrides on top of ``base``."""
    known = {f.name for f in fields(RunConfig)}
    changes = {k: val for k, val in overrides.items() if val is not None and k in known}
    return base.with_(**changes)
