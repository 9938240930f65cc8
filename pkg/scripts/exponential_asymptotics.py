"""Fold location and large-lambda branch errors for A = exp(n1), B = n1^r."""

import argparse

from nonlocal_od.bifurcation import compare_asymptotics, corollary4_threshold, find_folds
from nonlocal_od.reduction import NonlocalProblem, compute_ratios


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-r", type=float, nargs="+", default=[2.0, 3.0])
    parser.add_argument("-N", type=int, default=2)
    parser.add_argument("-R", type=float, default=1.0)
    parser.add_argument("--lambdas", default="1e2,1e3,1e4,1e5,1e6,1e7,1e8")
    args = parser.parse_args()
    lambdas = [float(x) for x in args.lambdas.split(",")]

    for r in args.r:
        problem = NonlocalProblem.build(args.N, args.R, "exp(n1)", f"n1^{r!r}", ["u:1"], ["grad:2"])
        ratios = compute_ratios(problem)
        lam_star = corollary4_threshold(r, ratios.reference, ratios.B_ratios[0] * ratios.reference)
        folds = find_folds(problem)
        print(f"# r = {r:g}: predicted fold {lam_star:.15g}, detected "
              + ", ".join(f"{f.lam:.15g} at s = {f.s:.12g}" for f in folds))
        print("lambda,s1,s1_pred,e1,s2,s2_pred,e2")
        for row in compare_asymptotics(problem, lambdas):
            print(f"{row.lam:g},{row.s1_exact:.12g},{row.s1_predicted:.12g},{row.e1:.3e},"
                  f"{row.s2_exact:.12g},{row.s2_predicted:.12g},{row.e2:.4f}")


if __name__ == "__main__":
    main()
