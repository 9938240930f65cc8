"""Bifurcation diagrams in lambda and the two closed-form examples.

Quadratic case: A(s, t) = (s - a)^2 + b, B(s, t) = s.  The reduced equation
is (s - a)^2 + b = lam ||U||_{p2}, giving 0, 1, 2, 1 positive roots as lam
increases through b/||U||_{p2} and (a^2 + b)/||U||_{p2}.

Exponential case: A(s, t) = e^s, B(s, t) = t^r with r > 1.  Here
g(s) = (||U||_{p1}/||grad U||_{q2})^r e^s s^{1-r} has a single minimum at
s = r - 1, so there are no roots below the fold value lam*, one at lam*
and two above.  For large lam the two roots satisfy e^s = s^{r-1} lam K
with K = ||grad U||_{q2}^r / ||U||_{p1}^{r-1}, which gives the two-term
expansions returned by :func:`corollary4_asymptotics`.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ballnorms import FUNCTION, GRADIENT
from .exprdsl import BinOp, Call, Num, Var
from .reduction import (
    SIMPLE,
    TANGENTIAL,
    SolverOptions,
    compute_ratios,
    g_array,
    g_eval,
    solve_single,
)
from .reduction import _refine_extremum

__all__ = [
    "BranchPoint",
    "AsymptoticEstimate",
    "AsymptoticRow",
    "Fold",
    "ShapeError",
    "sweep",
    "log_grid",
    "corollary2_solve",
    "corollary2_count",
    "corollary4_threshold",
    "corollary4_minimizer",
    "corollary4_count",
    "corollary4_exponent",
    "corollary4_K",
    "corollary4_asymptotics",
    "compare_asymptotics",
    "find_folds",
    "locate_transition",
]


class ShapeError(ValueError):
    """The problem is not of the exponential-case form e^{n1} / n1^r."""


@dataclass(frozen=True)
class BranchPoint:
    lam: float
    profiles: tuple = ()
    error: str = None

    @property
    def count(self):
        return -1 if self.error is not None else len(self.profiles)

    @property
    def roots(self):
        return [(p.s_root, p.coefficient, p.multiplicity) for p in self.profiles]


def log_grid(lam_min, lam_max, points):
    if not (0 < lam_min < lam_max):
        raise ValueError("need 0 < lambda_min < lambda_max")
    if int(points) != points or points < 2:
        raise ValueError("need at least 2 grid points")
    return [float(x) for x in np.geomspace(lam_min, lam_max, int(points))]


def _solve_point(args):
    problem, lam, options = args
    try:
        profiles = solve_single(problem.with_lambda(lam), options=options)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        return BranchPoint(lam, (), f"{type(exc).__name__}: {exc}")
    return BranchPoint(lam, tuple(profiles))


def sweep(problem, lambda_grid, options=None, workers=1):
    """Solve the reduced equation at every lambda of an increasing grid.

    Failures at individual lambda values are recorded on the returned
    :class:`BranchPoint` (``count == -1``) instead of stopping the sweep.
    """
    grid = [float(x) for x in lambda_grid]
    if any(not x > 0 for x in grid):
        raise ValueError("lambda values must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly increasing")
    jobs = [(problem, lam, options) for lam in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_solve_point, jobs))
    return [_solve_point(job) for job in jobs]


# -- quadratic case ---------------------------------------------------------

def corollary2_solve(a, b, norm_p2, lam, rtol=1e-12):
    """Positive roots of (s - a)^2 + b = lam ||U||_{p2} as (s, multiplicity).

    Equality with either threshold is decided with relative tolerance
    ``rtol`` so that e.g. lam = 8/pi, ||U|| = pi/8 counts as the fold.
    """
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    level = lam * norm_p2
    disc = level - b
    if abs(disc) <= rtol * max(level, b):
        return [(float(a), TANGENTIAL)]
    if disc < 0:
        return []
    root = math.sqrt(disc)
    lower, upper = a - root, a + root
    out = []
    if lower > rtol * a:
        out.append((lower, SIMPLE))
    out.append((upper, SIMPLE))
    return out


def corollary2_count(a, b, norm_p2, lam):
    """Solution count by regime: 0 below b, 1 at b, 2 up to a^2 + b, then 1."""
    level = lam * norm_p2
    if level < b:
        return 0
    if level == b:
        return 1
    if level < a * a + b:
        return 2
    return 1


# -- exponential case -------------------------------------------------------

def corollary4_threshold(r, norm_p1, norm_q2):
    """The fold value lam* below which the exponential case has no solution."""
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r!r}")
    level = (math.e / (r - 1)) ** (r - 1) * (norm_p1 / norm_q2) ** r
    return level / norm_p1


def corollary4_minimizer(r):
    """Where g attains its minimum, s = r - 1."""
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r!r}")
    return r - 1.0


def corollary4_count(r, norm_p1, norm_q2, lam, rtol=1e-12):
    lam_star = corollary4_threshold(r, norm_p1, norm_q2)
    if abs(lam - lam_star) <= rtol * lam_star:
        return 1
    return 0 if lam < lam_star else 2


def corollary4_K(r, norm_p1, norm_q2):
    return norm_q2 ** r / norm_p1 ** (r - 1)


@dataclass(frozen=True)
class AsymptoticEstimate:
    lam: float
    s1_predicted: float
    s2_predicted: float
    K: float


def corollary4_asymptotics(r, K, lam):
    """Two-term large-lambda predictions for the lower and upper roots.

    lower: x (1 + x / (r - 1)) with x = (lam K)^(-1/(r-1))
    upper: log lam + (r - 1) log log lam
    """
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r!r}")
    if not (K > 0 and lam * K > 1):
        raise ValueError(f"need lam * K > 1, got lam={lam!r}, K={K!r}")
    if not lam > math.e:
        raise ValueError(f"need lam > e so that log log lam > 0, got {lam!r}")
    x = (lam * K) ** (-1.0 / (r - 1))
    s1 = x * (1.0 + x / (r - 1))
    s2 = math.log(lam) + (r - 1) * math.log(math.log(lam))
    return AsymptoticEstimate(lam, s1, s2, K)


def corollary4_exponent(problem):
    """Return r if the problem is A = exp(n1) on a u-norm, B = n1^r on a
    grad-norm with r > 1; raise :class:`ShapeError` otherwise."""
    if len(problem.A_norms) != 1 or problem.A_norms[0].kind != FUNCTION:
        raise ShapeError("A must take exactly one u-norm argument")
    if len(problem.B_norms) != 1 or problem.B_norms[0].kind != GRADIENT:
        raise ShapeError("B must take exactly one grad-norm argument")
    if problem.A.root != Call("exp", Var(1)):
        raise ShapeError(f"A must be exp(n1), got {problem.A}")
    root = problem.B.root
    if not (
        isinstance(root, BinOp)
        and root.op == "^"
        and root.left == Var(1)
        and isinstance(root.right, Num)
    ):
        raise ShapeError(f"B must be n1^r for a numeric r, got {problem.B}")
    r = root.right.value
    if not r > 1:
        raise ShapeError(f"B exponent r must exceed 1, got {r!r}")
    return r


@dataclass(frozen=True)
class AsymptoticRow:
    lam: float
    s1_exact: float
    s1_predicted: float
    e1: float
    s2_exact: float
    s2_predicted: float
    e2: float


def compare_asymptotics(problem, lambdas, options=None):
    """Exact roots against the two-term expansions along a lambda ladder.

    e1 = |s1 - s1_pred| (lam K)^(1/(r-1)) and e2 = |s2 - s2_pred| / log log lam.
    Raises ValueError when some lambda does not give two roots.
    """
    r = corollary4_exponent(problem)
    ratios = compute_ratios(problem)
    norm_p1 = ratios.reference
    norm_q2 = ratios.B_ratios[0] * norm_p1
    K = corollary4_K(r, norm_p1, norm_q2)
    base = options or SolverOptions()
    rows = []
    for lam in lambdas:
        est = corollary4_asymptotics(r, K, lam)
        x = (lam * K) ** (-1.0 / (r - 1))
        # keep the lower root well inside the scan window
        opts = SolverOptions(
            s_min=min(base.s_min, 1e-3 * x),
            s_max=base.s_max,
            s_max_start=base.s_max_start,
            s_max_cap=base.s_max_cap,
            grid_points=base.grid_points,
            rtol=base.rtol,
            tangency_tol=base.tangency_tol,
        )
        profiles = solve_single(problem.with_lambda(lam), ratios, opts)
        if len(profiles) < 2:
            raise ValueError(
                f"expected two roots at lambda={lam!r}, found {len(profiles)}; "
                f"lambda is too close to the fold"
            )
        s1, s2 = profiles[0].s_root, profiles[-1].s_root
        rows.append(
            AsymptoticRow(
                lam,
                s1,
                est.s1_predicted,
                abs(s1 - est.s1_predicted) / x,
                s2,
                est.s2_predicted,
                abs(s2 - est.s2_predicted) / math.log(math.log(lam)),
            )
        )
    return rows


# -- fold detection ---------------------------------------------------------

@dataclass(frozen=True)
class Fold:
    lam: float
    s: float
    kind: str  # "min" or "max" of g


def find_folds(problem, s_min=1e-8, s_max=1e3, grid_points=4096):
    """Lambda values at which two branches meet.

    These are the interior local extrema of g (which does not depend on
    lambda), each refined and mapped to lam = g(s) / ||U||_{p1}.
    """
    ratios = compute_ratios(problem)
    grid = np.geomspace(s_min, s_max, grid_points)
    g = g_array(problem, ratios, grid)
    folds = []
    for i in range(1, len(grid) - 1):
        if g[i] < g[i - 1] and g[i] < g[i + 1]:
            sign, kind = 1.0, "min"
        elif g[i] > g[i - 1] and g[i] > g[i + 1]:
            sign, kind = -1.0, "max"
        else:
            continue
        s, value = _refine_extremum(
            lambda t: g_eval(problem, ratios, t), grid[i - 1], grid[i + 1], sign
        )
        folds.append(Fold(value / ratios.reference, s, kind))
    return folds


def locate_transition(problem, lam_lo, lam_hi, options=None, rtol=1e-12, max_iter=200):
    """Bisect in lambda for the point where the solution count changes.

    ``lam_lo`` and ``lam_hi`` must give different counts.  Returns the
    midpoint of the final bracket.
    """
    def count(lam):
        return len(solve_single(problem.with_lambda(lam), options=options))

    c_lo, c_hi = count(lam_lo), count(lam_hi)
    if c_lo == c_hi:
        raise ValueError(f"counts agree at both ends ({c_lo}); no transition bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lam_lo + lam_hi)
        if lam_hi - lam_lo <= rtol * mid:
            break
        if count(mid) == c_lo:
            lam_lo = mid
        else:
            lam_hi = mid
    return 0.5 * (lam_lo + lam_hi)
