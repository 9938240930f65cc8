"""Closed-form torsion norms against adaptive quadrature over a parameter grid."""

import argparse
import itertools

from nonlocal_od.ballnorms import BallDomain, NormSpec, closed_form_norm, norm_via_quadrature


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="1,2,3,5,10")
    parser.add_argument("--radii", default="0.5,1,3")
    parser.add_argument("--exponents", default="0.5,1,2,3.7")
    args = parser.parse_args()
    dims = [int(x) for x in args.dims.split(",")]
    radii = [float(x) for x in args.radii.split(",")]
    exps = [float(x) for x in args.exponents.split(",")]

    print("N,R,kind,exponent,closed_form,quadrature,rel_diff")
    worst = 0.0
    for n, radius, kind, p in itertools.product(dims, radii, ("u", "grad"), exps):
        domain = BallDomain(n, radius)
        spec = NormSpec(kind, p)
        exact = closed_form_norm(domain, spec)
        quad = norm_via_quadrature(domain, spec)
        rel = abs(quad - exact) / exact
        worst = max(worst, rel)
        print(f"{n},{radius:g},{kind},{p:g},{exact:.17g},{quad:.17g},{rel:.3e}")
    print(f"# worst relative difference {worst:.3e}")


if __name__ == "__main__":
    main()
