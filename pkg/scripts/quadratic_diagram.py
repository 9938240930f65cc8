"""Solution count and roots of the quadratic case (n1 - a)^2 + b over a lambda sweep."""

import argparse

from nonlocal_od.bifurcation import corollary2_count, log_grid, sweep
from nonlocal_od.reduction import NonlocalProblem, compute_ratios


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-a", type=float, default=1.0)
    parser.add_argument("-b", type=float, default=1.0)
    parser.add_argument("-N", type=int, default=2)
    parser.add_argument("-R", type=float, default=1.0)
    parser.add_argument("-p", type=float, default=1.0, help="exponent of the u-norm")
    parser.add_argument("--lambda-min", type=float, default=0.01)
    parser.add_argument("--lambda-max", type=float, default=100.0)
    parser.add_argument("--points", type=int, default=200)
    args = parser.parse_args()

    problem = NonlocalProblem.build(
        args.N, args.R, f"(n1 - {args.a!r})^2 + {args.b!r}", "n1", [f"u:{args.p}"], [f"u:{args.p}"]
    )
    norm = compute_ratios(problem).reference
    lo, hi = args.b / norm, (args.a ** 2 + args.b) / norm
    print(f"# thresholds {lo:.12g} and {hi:.12g}")
    print("lambda,count,expected,roots")
    mismatches = 0
    for point in sweep(problem, log_grid(args.lambda_min, args.lambda_max, args.points)):
        expected = corollary2_count(args.a, args.b, norm, point.lam)
        mismatches += point.count != expected
        roots = " ".join(f"{s:.10g}" for s, _, _ in point.roots)
        print(f"{point.lam:.10g},{point.count},{expected},{roots}")
    print(f"# {mismatches} mismatches against the closed-form classifier")
    return 1 if mismatches else 0


if __name__ == "__main__":
    raise SystemExit(main())
