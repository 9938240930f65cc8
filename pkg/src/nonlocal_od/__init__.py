"""Solution counts for a Kirchhoff-type overdetermined problem on balls.

Solutions of the nonlocal problem are multiples of the torsion function
of the ball, and their number equals the number of positive roots of a
scalar equation g(s) = lambda ||U||_{p1}.  This package evaluates the
norms involved, solves the scalar equation, and sweeps lambda.
"""

from .ballnorms import BallDomain, NormSpec, norm_via_quadrature, torsion_grad_norm, torsion_norm
from .bifurcation import compare_asymptotics, corollary2_solve, corollary4_threshold, sweep
from .exprdsl import eval_expression, parse_expression
from .reduction import NonlocalProblem, SolverOptions, compute_ratios, solve_single
from .specfun import beta, log_gamma, sphere_area

__version__ = "0.1.0"
