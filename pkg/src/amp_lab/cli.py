"""Command-line entry point: ``amp-lab <subcommand> [flags]``.

Every subcommand writes a JSON result and a plain-text summary into the
output directory (``--output-dir``, else the config file, else the
AMP_LAB_OUTPUT_DIR environment variable, else ./amp_lab_output).
Exit status: 0 success, 1 computational failure, 2 usage error.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, build_weight, check_f_spec, describe_weight, merge, parse_config
from .errors import (
    AmpLabError,
    BadExponentError,
    ConfigError,
    InvalidIntervalError,
    MeshMismatchError,
    TooCoarseError,
)
from .fem import Mesh1D
from .io import dump_json, write_grid

USAGE_ERRORS = (ConfigError, BadExponentError, InvalidIntervalError, TooCoarseError,
                MeshMismatchError)


class UsageError(Exception):
    pass


def _common(parser):
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--p", type=float)
    parser.add_argument("--a", type=float)
    parser.add_argument("--b", type=float)
    parser.add_argument("--n", type=int)
    parser.add_argument("--f", nargs="+", metavar="SPEC",
                        help="weight: constant C | one_minus_sin | one_minus_sin_plus C | "
                             "phi1 | nodal_file PATH | vanishing_sequence K | random [SEED]")
    parser.add_argument("--tol", type=float)
    parser.add_argument("--solve-tol", dest="solve_tol", type=float)
    parser.add_argument("--bisect-rel", dest="bisect_rel", type=float)
    parser.add_argument("--margin-rel", dest="margin_rel", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--output-dir", dest="output_dir")


def build_parser():
    parser = argparse.ArgumentParser(prog="amp-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="first or second eigenpair")
    _common(p)
    p.add_argument("--index", type=int, choices=(1, 2))

    p = sub.add_parser("lambda-star", help="constrained Rayleigh minimum lambda*_f")
    _common(p)

    p = sub.add_parser("solve", help="ground state at one lambda")
    _common(p)
    p.add_argument("--lambda", dest="lam", type=float)

    p = sub.add_parser("lambda-f", help="anti-maximum principle threshold lambda_f")
    _common(p)

    p = sub.add_parser("branch", help="energy branch over a lambda grid (CSV)")
    _common(p)
    p.add_argument("--lambda-grid", dest="lambda_grid",
                   help="LO:HI:COUNT or comma separated values")
    p.add_argument("--points", type=int, help="size of the default grid")
    p.add_argument("--cold", action="store_true",
                   help="no warm starts (points may run in parallel with --jobs)")

    p = sub.add_parser("example", help="worked example with f = 1 - sin x on (0, pi)")
    _common(p)

    p = sub.add_parser("verify", help="theorem verification battery")
    _common(p)
    p.add_argument("--points", type=int, help="branch points used by the battery")
    return parser


def resolve_config(args):
    base = parse_config(args.config) if args.config else RunConfig()
    overrides = {k: getattr(args, k, None) for k in
                 ("p", "a", "b", "n", "tol", "solve_tol", "bisect_rel", "margin_rel", "seed",
                  "jobs", "output_dir", "index", "lam", "points")}
    if args.f is not None:
        try:
            overrides["f"] = check_f_spec(tuple(args.f))
        except ValueError as exc:
            raise UsageError(f"--f: {exc}") from None
    grid = getattr(args, "lambda_grid", None)
    if grid is not None:
        from .config import _grid

        try:
            overrides["lambda_grid"] = _grid(grid)
        except ValueError as exc:
            raise UsageError(f"--lambda-grid: {exc}") from None
    try:
        cfg = merge(base, overrides)
    except ValueError as exc:
        # name the first flag that breaks the config on its own
        for key, value in overrides.items():
            try:
                merge(base, {key: value})
            except ValueError:
                raise UsageError(f"--{key.replace('_', '-')}: {exc}") from None
        raise UsageError(str(exc)) from None
    if cfg.output_dir is None:
        cfg = cfg.with_(output_dir=os.environ.get("AMP_LAB_OUTPUT_DIR", "amp_lab_output"))
    return cfg


def _summary_text(title, items):
    lines = [title]
    for key, value in items.items():
        if isinstance(value, (dict, list)):
            continue
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _emit(out, name, payload, title, echo):
    dump_json(payload, out / f"{name}.json")
    text = _summary_text(title, payload)
    (out / f"{name}_summary.txt").write_text(text)
    echo(text.rstrip("\n"))


def _run(cmd, cfg, args, echo):
    opts = cfg.options()
    mesh = Mesh1D(cfg.a, cfg.b, cfg.n)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = {"p": cfg.p, "a": cfg.a, "b": cfg.b, "n": cfg.n, "f": describe_weight(cfg.f),
              "seed": cfg.seed}

    if cmd == "eigen":
        from .spectrum import any_second_eigenpair, first_eigenpair

        pair = (first_eigenpair if cfg.index == 1 else any_second_eigenpair)(cfg.p, mesh, opts)
        payload = {**header, **pair.summary()}
        payload.pop("f")
        write_grid(pair.fn, out / f"eigen{cfg.index}", pair.summary())
        _emit(out, "eigen", payload, f"eigenpair {cfg.index}", echo)
        return 0

    f = build_weight(cfg.f, mesh, cfg.p, opts)

    if cmd == "lambda-star":
        from .errors import NotApplicableError
        from .lambda_star import lambda_star, minimizer_is_solution_check

        res = lambda_star(cfg.p, f, mesh, opts)
        payload = {**header, **res.summary()}
        try:
            payload["minimizer_check"] = minimizer_is_solution_check(res, cfg.p, f, mesh,
                                                                     opts).summary()
        except NotApplicableError as exc:
            payload["minimizer_check"] = {"applicable": False, "reason": str(exc)}
        write_grid(res.minimizer, out / "lambda_star_minimizer", res.summary())
        _emit(out, "lambda_star", payload, "lambda*_f", echo)
        return 0

    if cmd == "solve":
        from .solver import solve_ground_state, spectral_context

        if cfg.lam is None:
            raise UsageError("solve needs --lambda (or 'lambda' in the config)")
        ctx = spectral_context(cfg.p, f, mesh, opts)
        sol = solve_ground_state(cfg.lam, ctx, opts)
        meta = {k: sol.summary()[k] for k in ("p", "lambda", "energy", "pde_residual",
                                              "nehari_residual", "sign_class", "method")}
        write_grid(sol.u, out / "solution", meta)
        _emit(out, "solve", {**header, **sol.summary()}, "ground state", echo)
        return 0

    if cmd == "lambda-f":
        from .amp import lambda_f_estimate

        est = lambda_f_estimate(cfg.p, f, mesh, opts)
        _emit(out, "lambda_f", {**header, **est.summary()}, "lambda_f estimate", echo)
        return 0

    if cmd == "branch":
        from .amp import branch_to_csv, branch_trace, default_grid
        from .solver import spectral_context

        ctx = spectral_context(cfg.p, f, mesh, opts)
        grid = (np.array(cfg.lambda_grid) if cfg.lambda_grid is not None
                else default_grid(ctx, cfg.points, opts))
        points, _ = branch_trace(cfg.p, f, mesh, grid, opts, ctx=ctx,
                                 warm=not getattr(args, "cold", False))
        csv_path = out / "branch.csv"
        csv_path.write_text(branch_to_csv(points))
        failed = [pt.lam for pt in points if not pt.converged]
        payload = {**header, "points": len(points), "failed": failed,
                   "lambda1": ctx.lambda1, "lambda2": ctx.lambda2,
                   "lambda_star": ctx.lambda_star, "csv": csv_path.name,
                   "errors": {repr(pt.lam): pt.error for pt in points if pt.error}}
        _emit(out, "branch", payload, "energy branch", echo)
        return 0

    if cmd == "example":
        from .amp import paper_example_lambda0
        from .lambda_star import lambda_star
        from . import weights

        ex_mesh = Mesh1D(0.0, np.pi, cfg.n)
        lam0 = paper_example_lambda0(ex_mesh, opts)
        star = lambda_star(2.0, weights.one_minus_sin(ex_mesh), ex_mesh, opts).value
        ok = 3.0 < lam0 < 3.5 and star <= lam0 + 1e-3
        payload = {"n": cfg.n, "lambda0": lam0, "lambda_star": star,
                   "lambda0_in_3_3.5": 3.0 < lam0 < 3.5,
                   "lambda_star_le_lambda0": star <= lam0 + 1e-3, "passed": ok}
        _emit(out, "example", payload, "worked example, f = 1 - sin x", echo)
        return 0 if ok else 1

    if cmd == "verify":
        from .amp import verify_theorems

        rep = verify_theorems(cfg.p, f, mesh, opts, n_points=cfg.points)
        payload = {**header, **rep.as_dict()}
        dump_json(payload, out / "verify.json")
        lines = [f"verification p={cfg.p} f={describe_weight(cfg.f)} n={cfg.n}",
                 f"certifies: {rep.certifies}"]
        for e in rep.entries:
            state = "n/a " if not e.applicable else ("PASS" if e.passed else "FAIL")
            lines.append(f"{state} {e.check_id}")
        lines.append(f"overall: {'PASS' if rep.passed else 'FAIL'}")
        text = "\n".join(lines) + "\n"
        (out / "verify_summary.txt").write_text(text)
        echo(text.rstrip("\n"))
        return 0 if rep.passed else 1

    raise UsageError(f"unknown command {cmd}")


def run(argv=None, echo=print):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        return _run(args.command, cfg, args, echo)
    except (UsageError, *USAGE_ERRORS, FileNotFoundError) as exc:
        print(f"amp-lab {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except AmpLabError as exc:
        print(f"amp-lab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    sys.exit(run(argv))
