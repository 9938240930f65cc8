"""Command-line front end.

Exit codes: 0 success (including "no solution"), 1 runtime failure or a
failed ``verify``, 2 usage or config error, 3 positivity violation of A or
B, 4 config not of the exponential-case shape (``asymptotics`` only).
"""

import argparse
import csv
import json
import sys

from .ballnorms import BallDomain, NormSpec, closed_form_norm, norm_via_quadrature
from .bifurcation import ShapeError, compare_asymptotics, corollary4_exponent, log_grid, sweep
from .config import ConfigError, load_config, parse_config
from .reduction import (
    PositivityError,
    SolutionProfile,
    compute_ratios,
    make_profile,
    pde_residual,
    solve_single,
    verify_system_residual,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_POSITIVITY = 3
EXIT_SHAPE = 4

SYSTEM_TOL = 1e-9
PDE_TOL = 1e-10

CSV_HEADER = ["lambda", "count", "root_index", "s", "coefficient", "multiplicity", "residual"]
DEFAULT_LADDER = "1e2,1e3,1e4,1e5,1e6,1e7,1e8"


class UsageError(Exception):
    pass


def fmt(x):
    return format(x, ".17g")


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


# -- norms ------------------------------------------------------------------

def cmd_norms(args, out):
    if args.dimension < 1:
        raise UsageError("dimension must be ≥ 1")
    if args.radius <= 0:
        raise UsageError("radius must be positive")
    try:
        specs = [NormSpec.parse(text) for text in args.specs]
        domain = BallDomain(args.dimension, args.radius, args.center)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for spec in specs:
        closed = closed_form_norm(domain, spec)
        quad = norm_via_quadrature(domain, spec)
        rows.append((spec, closed, quad, abs(closed - quad) / closed))
    if args.json:
        json.dump(
            {
                "dimension": domain.dimension,
                "radius": domain.radius,
                "norms": [
                    {"kind": s.kind, "exponent": s.exponent, "closed_form": c,
                     "quadrature": q, "rel_diff": d}
                    for s, c, q, d in rows
                ],
            },
            out,
            indent=2,
        )
        out.write("\n")
        return EXIT_OK
    out.write(f"# N={domain.dimension} R={fmt(domain.radius)}\n")
    out.write("kind,exponent,closed_form,quadrature,rel_diff\n")
    for spec, closed, quad, diff in rows:
        out.write(f"{spec.kind},{fmt(spec.exponent)},{fmt(closed)},{fmt(quad)},{diff:.3e}\n")
    return EXIT_OK


# -- solve / verify ---------------------------------------------------------

def _root_record(problem, ratios, profile):
    return {
        "s": profile.s_root,
        "coefficient": profile.coefficient,
        "tuple": list(profile.tuple),
        "neumann_c": profile.neumann_c,
        "gamma_inverse": profile.gamma_inverse,
        "multiplicity": profile.multiplicity,
        "system_residual": verify_system_residual(problem, ratios, profile),
        "pde_residual": pde_residual(problem, ratios, profile),
    }


def cmd_solve(args, out):
    cfg = load_config(args.config)
    problem = cfg.problem(args.lam)
    ratios = compute_ratios(problem)
    profiles = solve_single(problem, ratios, cfg.solver_options())
    records = [_root_record(problem, ratios, p) for p in profiles]
    if args.json:
        json.dump(
            {
                "lambda": problem.lam,
                "config": cfg.to_dict(),
                "reference_norm": ratios.reference,
                "count": len(records),
                "roots": records,
            },
            out,
            indent=2,
        )
        out.write("\n")
        return EXIT_OK
    out.write(f"lambda = {fmt(problem.lam)}\n")
    out.write(f"||U||_p1 = {fmt(ratios.reference)}\n")
    out.write(f"count = {len(records)}\n")
    for i, rec in enumerate(records):
        out.write(f"root {i}: s = {fmt(rec['s'])} ({rec['multiplicity']})\n")
        out.write(f"  coefficient = {fmt(rec['coefficient'])}\n")
        out.write(f"  tuple = ({', '.join(fmt(v) for v in rec['tuple'])})\n")
        out.write(f"  neumann_c = {fmt(rec['neumann_c'])}\n")
        out.write(f"  system_residual = {rec['system_residual']:.3e}\n")
        out.write(f"  pde_residual = {rec['pde_residual']:.3e}\n")
    return EXIT_OK


def cmd_verify(args, out):
    try:
        with open(args.dump, encoding="utf-8") as fh:
            dump = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{args.dump}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.dump}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(dump, dict) or not {"lambda", "config", "roots"} <= set(dump):
        raise ConfigError(f"{args.dump}: not a solve --json dump (need lambda, config, roots)")
    cfg = parse_config(dump["config"])
    problem = cfg.problem(dump["lambda"])
    ratios = compute_ratios(problem)
    n_norms = len(ratios.all_ratios)
    ok = True
    out.write("root,s,system_residual,pde_residual,status\n")
    for i, rec in enumerate(dump["roots"]):
        try:
            s = float(rec["s"])
            values = tuple(float(v) for v in rec["tuple"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"roots[{i}]: needs numeric 's' and 'tuple'") from None
        if len(values) != n_norms or not s > 0:
            raise ConfigError(f"roots[{i}]: tuple must hold {n_norms} values and s must be positive")
        fresh = make_profile(problem, ratios, s, rec.get("multiplicity", "simple"))
        # check the numbers as recorded, not a recomputation from s
        recorded = SolutionProfile(
            s, values, fresh.coefficient, fresh.neumann_c, fresh.gamma_inverse,
            fresh.multiplicity, problem.lam,
        )
        sys_res = verify_system_residual(problem, ratios, recorded)
        pde_res = pde_residual(problem, ratios, fresh)
        passed = sys_res <= SYSTEM_TOL and pde_res <= PDE_TOL
        ok = ok and passed
        out.write(f"{i},{fmt(s)},{sys_res:.3e},{pde_res:.3e},{'ok' if passed else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_FAILURE


# -- sweep ------------------------------------------------------------------

def cmd_sweep(args, out):
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if not args.lambda_min < args.lambda_max:
        raise UsageError("--lambda-min must be below --lambda-max")
    cfg = load_config(args.config)
    problem = cfg.problem(1.0)
    grid = log_grid(args.lambda_min, args.lambda_max, args.points)
    points = sweep(problem, grid, cfg.solver_options(), workers=args.workers)
    ratios = compute_ratios(problem)
    try:
        fh = open(args.out, "w", newline="", encoding="utf-8")
    except OSError as exc:
        out.write(f"error: cannot write {args.out}: {exc.strerror}\n")
        return EXIT_FAILURE
    with fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for bp in points:
            lam = fmt(bp.lam)
            if bp.error is not None:
                writer.writerow([lam, -1, "", "", "", "error", ""])
                continue
            if not bp.profiles:
                writer.writerow([lam, 0, "", "", "", "", ""])
                continue
            lam_problem = problem.with_lambda(bp.lam)
            for k, p in enumerate(bp.profiles):
                residual = max(
                    verify_system_residual(lam_problem, ratios, p),
                    pde_residual(lam_problem, ratios, p),
                )
                writer.writerow(
                    [lam, bp.count, k, fmt(p.s_root), fmt(p.coefficient),
                     p.multiplicity, fmt(residual)]
                )
    n_err = sum(bp.error is not None for bp in points)
    out.write(f"wrote {args.out}: {len(points)} lambda values, {n_err} failed\n")
    return EXIT_OK


# -- asymptotics ------------------------------------------------------------

def cmd_asymptotics(args, out):
    cfg = load_config(args.config)
    problem = cfg.problem(1.0)
    r = corollary4_exponent(problem)
    if args.r is not None and args.r != r:
        raise ShapeError(f"--r {args.r:g} does not match the exponent of B ({r:g})")
    rows = compare_asymptotics(problem, args.lambdas, cfg.solver_options())
    if args.json:
        json.dump([row.__dict__ for row in rows], out, indent=2)
        out.write("\n")
        return EXIT_OK
    out.write(f"# r = {r:g}\n")
    out.write("lambda,s1_exact,s1_predicted,e1,s2_exact,s2_predicted,e2\n")
    for row in rows:
        out.write(
            ",".join(
                fmt(v) for v in (row.lam, row.s1_exact, row.s1_predicted, row.e1,
                                 row.s2_exact, row.s2_predicted, row.e2)
            )
            + "\n"
        )
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nonlocal-od",
        description="Solution counts and bifurcation diagrams for the Kirchhoff-type "
        "overdetermined problem on a ball.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norms", help="closed-form vs quadrature norms of the torsion function")
    p.add_argument("--dimension", "-N", type=int, required=True)
    p.add_argument("--radius", "-R", type=float, default=1.0)
    p.add_argument("--center", type=_float_list, default=None)
    p.add_argument("specs", nargs="+", metavar="SPEC", help="norm specs such as u:1 grad:2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("solve", help="all solutions at one lambda")
    p.add_argument("config")
    p.add_argument("--lambda", dest="lam", type=_positive_float, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="bifurcation diagram over a log-spaced lambda grid (CSV)")
    p.add_argument("config")
    p.add_argument("--lambda-min", type=_positive_float, required=True)
    p.add_argument("--lambda-max", type=_positive_float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", "-o", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("asymptotics", help="exact branch roots vs large-lambda expansions")
    p.add_argument("config")
    p.add_argument("--r", type=float, default=None, help="expected exponent of B")
    p.add_argument("--lambdas", type=_float_list, default=_float_list(DEFAULT_LADDER))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("verify", help="re-check residuals of a solve --json dump")
    p.add_argument("dump")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ConfigError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PositivityError as exc:
        print(f"{parser.prog} {args.command}: positivity violation: {exc}", file=sys.stderr)
        return EXIT_POSITIVITY
    except ShapeError as exc:
        print(f"{parser.prog} {args.command}: shape mismatch: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
