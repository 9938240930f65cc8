"""Scalar reduction of the nonlocal overdetermined problem on a ball.

On B_R(x0) every solution of

    -A(norms of u) Lap u = lam B(norms of u),   u = 0 and du/dnu = c on the boundary

is a positive multiple of the torsion function U, u = (s / ||U||_{p1}) U,
where s > 0 solves the scalar equation

    g(s) = lam ||U||_{p1},   g(s) = s A(rho^A s) / B(rho^B s)

and rho^A, rho^B are the norms feeding A and B divided by ||U||_{p1}.
Roots of g are located by scanning a log-uniform grid, bracketing sign
changes and refining each bracket; local extrema of g that approach the
level are refined separately so that folds (tangential roots) and narrow
root pairs are not lost between grid points.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .ballnorms import FUNCTION, BallDomain, NormSpec, closed_form_norm
from .exprdsl import CoefficientExpr, eval_array, eval_expression, parse_expression

__all__ = [
    "SIMPLE",
    "TANGENTIAL",
    "PositivityError",
    "SearchBudgetError",
    "NonlocalProblem",
    "NormRatios",
    "SolverOptions",
    "SolutionProfile",
    "compute_ratios",
    "g_eval",
    "g_array",
    "solve_single",
    "make_profile",
    "recover_tuple",
    "verify_system_residual",
    "pde_residual",
]

log = logging.getLogger(__name__)

SIMPLE = "simple"
TANGENTIAL = "tangential"

_EPS = np.finfo(float).eps


class PositivityError(ArithmeticError):
    """A or B was not strictly positive at an evaluated point."""

    def __init__(self, which, s, value):
        self.which = which
        self.s = s
        self.value = value
        super().__init__(
            f"coefficient {which} = {value!r} is not positive at s = {s!r}; "
            f"A and B must be positive"
        )


class SearchBudgetError(RuntimeError):
    """The adaptive search interval hit its cap without g clearing the level."""


@dataclass(frozen=True)
class NonlocalProblem:
    domain: BallDomain
    A: CoefficientExpr
    B: CoefficientExpr
    A_norms: tuple
    B_norms: tuple
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "A_norms", tuple(self.A_norms))
        object.__setattr__(self, "B_norms", tuple(self.B_norms))
        if not self.A_norms:
            raise ValueError("A_norms must contain at least the reference norm")
        if not self.B_norms:
            raise ValueError("B_norms must not be empty")
        if self.A_norms[0].kind != FUNCTION:
            raise ValueError("the first A norm is the reference ||u||_p1 and must have kind 'u'")
        if self.A.arg_count != len(self.A_norms):
            raise ValueError(
                f"A takes {self.A.arg_count} argument(s) but {len(self.A_norms)} A norm(s) declared"
            )
        if self.B.arg_count != len(self.B_norms):
            raise ValueError(
                f"B takes {self.B.arg_count} argument(s) but {len(self.B_norms)} B norm(s) declared"
            )
        lam = float(self.lam)
        if not (lam > 0 and math.isfinite(lam)):
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def build(cls, dimension, radius, A, B, A_norms, B_norms, lam=1.0, center=None):
        """Convenience constructor from expression strings and ``"u:p"`` specs."""
        A_norms = [n if isinstance(n, NormSpec) else NormSpec.parse(n) for n in A_norms]
        B_norms = [n if isinstance(n, NormSpec) else NormSpec.parse(n) for n in B_norms]
        return cls(
            BallDomain(dimension, radius, center),
            parse_expression(A, len(A_norms)),
            parse_expression(B, len(B_norms)),
            A_norms,
            B_norms,
            lam,
        )

    def with_lambda(self, lam):
        return NonlocalProblem(self.domain, self.A, self.B, self.A_norms, self.B_norms, lam)


@dataclass(frozen=True)
class NormRatios:
    reference: float
    A_ratios: tuple
    B_ratios: tuple

    @property
    def all_ratios(self):
        return self.A_ratios + self.B_ratios


@dataclass(frozen=True)
class SolverOptions:
    s_min: float = 1e-8
    s_max: float = None  # None: expand from s_max_start by doubling
    s_max_start: float = 10.0
    s_max_cap: float = 1e9
    grid_points: int = 2048
    rtol: float = 1e-12
    tangency_tol: float = 1e-10

    def __post_init__(self):
        if not self.s_min > 0:
            raise ValueError("s_min must be positive")
        if self.s_max is not None and not self.s_max > self.s_min:
            raise ValueError("s_max must exceed s_min")
        if not self.s_max_cap > self.s_min:
            raise ValueError("s_max_cap must exceed s_min")
        if int(self.grid_points) != self.grid_points or self.grid_points < 3:
            raise ValueError("grid_points must be an integer >= 3")
        if not (self.rtol > 0 and self.tangency_tol >= 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class SolutionProfile:
    """One solution u = coefficient * U of the nonlocal problem."""

    s_root: float
    tuple: tuple  # (s1, ..., all A-norm values, then all B-norm values)
    coefficient: float
    neumann_c: float
    gamma_inverse: float
    multiplicity: str = SIMPLE
    lam: float = field(default=None, compare=False)


def compute_ratios(problem):
    domain = problem.domain
    reference = closed_form_norm(domain, problem.A_norms[0])
    a = tuple(closed_form_norm(domain, n) / reference for n in problem.A_norms)
    b = tuple(closed_form_norm(domain, n) / reference for n in problem.B_norms)
    # exact by definition, not up to rounding
    a = (1.0,) + a[1:]
    return NormRatios(reference, a, b)


def _coefficients(problem, ratios, s):
    a_val = eval_expression(problem.A, [r * s for r in ratios.A_ratios])
    if not a_val > 0:
        raise PositivityError("A", s, a_val)
    b_val = eval_expression(problem.B, [r * s for r in ratios.B_ratios])
    if not b_val > 0:
        raise PositivityError("B", s, b_val)
    return a_val, b_val


def g_eval(problem, ratios, s):
    """g(s) = s A(rho^A s) / B(rho^B s) for a single s > 0."""
    if not s > 0:
        raise ValueError(f"s must be positive, got {s!r}")
    a_val, b_val = _coefficients(problem, ratios, s)
    if math.isinf(a_val) and math.isinf(b_val):
        raise ArithmeticError(f"A and B both overflow at s = {s!r}")
    return s * a_val / b_val


def g_array(problem, ratios, s):
    """Vectorised g over an array of s values, with the same positivity checks."""
    s = np.asarray(s, float)
    a_val = eval_array(problem.A, [r * s for r in ratios.A_ratios])
    bad = np.flatnonzero(~(a_val > 0))
    if bad.size:
        raise PositivityError("A", float(s.flat[bad[0]]), float(a_val.flat[bad[0]]))
    b_val = eval_array(problem.B, [r * s for r in ratios.B_ratios])
    bad = np.flatnonzero(~(b_val > 0))
    if bad.size:
        raise PositivityError("B", float(s.flat[bad[0]]), float(b_val.flat[bad[0]]))
    if np.any(np.isinf(a_val) & np.isinf(b_val)):
        raise ArithmeticError("A and B both overflow on the search grid")
    with np.errstate(over="ignore"):
        return s * a_val / b_val


def _upper_end(problem, ratios, level, opts):
    if opts.s_max is not None:
        return float(opts.s_max)
    s_hi = max(opts.s_max_start, 2.0 * opts.s_min)
    while True:
        g_hi = g_eval(problem, ratios, s_hi)
        g_half = g_eval(problem, ratios, 0.5 * s_hi)
        if g_hi > 10.0 * level and g_hi > g_half:
            return s_hi
        if s_hi >= opts.s_max_cap:
            raise SearchBudgetError(
                f"g stayed below 10 x level ({10.0 * level:.6g}) or was not increasing "
                f"up to the cap s = {opts.s_max_cap:g}; pass an explicit s_max"
            )
        s_hi = min(2.0 * s_hi, opts.s_max_cap)


def _refine_extremum(fn, lo, hi, sign):
    """Locate the extremum of fn on [lo, hi] working in log s.

    sign = +1 looks for a minimum, -1 for a maximum.
    """
    res = minimize_scalar(
        lambda t: sign * fn(math.exp(t)),
        bounds=(math.log(lo), math.log(hi)),
        method="bounded",
        options={"xatol": 1e-12, "maxiter": 500},
    )
    s = math.exp(res.x)
    return s, fn(s)


def solve_single(problem, ratios=None, options=None):
    """All roots of g(s) = lam ||U||_{p1} in the search interval.

    Returns a list of :class:`SolutionProfile` sorted by s.  An empty list
    means the problem has no solution for this lambda.
    """
    opts = options or SolverOptions()
    ratios = ratios or compute_ratios(problem)
    level = problem.lam * ratios.reference
    s_lo = float(opts.s_min)
    s_hi = _upper_end(problem, ratios, level, opts)

    grid = np.geomspace(s_lo, s_hi, int(opts.grid_points))
    g_grid = g_array(problem, ratios, grid)
    d = g_grid - level
    nonneg = d >= 0

    def gap(s):
        return g_eval(problem, ratios, s) - level

    tan_tol = opts.tangency_tol * level
    roots = []  # (s, multiplicity)

    def refine(lo, hi):
        s = brentq(gap, lo, hi, xtol=1e-300, rtol=4 * _EPS, maxiter=500)
        resid = abs(gap(s))
        if resid > opts.rtol * level:
            log.warning("root at s=%.17g has residual %.3e above rtol", s, resid / level)
        roots.append((s, SIMPLE))

    for i in np.flatnonzero(nonneg[:-1] != nonneg[1:]):
        refine(grid[i], grid[i + 1])

    # interior grid extrema of g on one side of the level may hide a fold or
    # a root pair narrower than the grid spacing
    noise = 8 * _EPS * np.maximum(np.abs(g_grid), level)
    for i in range(1, len(grid) - 1):
        if not (nonneg[i - 1] == nonneg[i] == nonneg[i + 1]):
            continue
        left, here, right = abs(d[i - 1]), abs(d[i]), abs(d[i + 1])
        if not (left - here > noise[i] and right - here > noise[i]):
            continue
        sign = 1.0 if d[i] > 0 else -1.0
        s_e, gap_e = _refine_extremum(gap, grid[i - 1], grid[i + 1], sign)
        if abs(gap_e) <= tan_tol:
            roots.append((s_e, TANGENTIAL))
        elif (gap_e >= 0) != nonneg[i]:
            refine(grid[i - 1], s_e)
            refine(s_e, grid[i + 1])

    roots = _merge_roots(sorted(roots), gap, tan_tol)
    return [make_profile(problem, ratios, s, mult) for s, mult in roots]


def _merge_roots(roots, gap, tan_tol):
    # duplicates from brackets sharing an exact zero
    out = []
    for s, mult in roots:
        if out and abs(s - out[-1][0]) <= 1e-12 * s:
            if mult == TANGENTIAL:
                out[-1] = (out[-1][0], TANGENTIAL)
            continue
        out.append((s, mult))
    # a root pair straddling an extremum within the tangency tolerance is
    # one fold, counted once
    merged = []
    i = 0
    while i < len(out):
        if i + 1 < len(out) and out[i][1] == SIMPLE and out[i + 1][1] == SIMPLE:
            lo, hi = out[i][0], out[i + 1][0]
            mid = math.sqrt(lo * hi)
            sign = -1.0 if gap(mid) > 0 else 1.0
            s_e, gap_e = _refine_extremum(gap, lo, hi, sign)
            if abs(gap_e) <= tan_tol:
                merged.append((s_e, TANGENTIAL))
                i += 2
                continue
        merged.append(out[i])
        i += 1
    return merged


def make_profile(problem, ratios, s, multiplicity=SIMPLE):
    """Assemble the solution data attached to a root s of the scalar equation."""
    values = recover_tuple(s, ratios)
    n_a = len(ratios.A_ratios)
    a_val = eval_expression(problem.A, values[:n_a])
    b_val = eval_expression(problem.B, values[n_a:])
    if not a_val > 0:
        raise PositivityError("A", s, a_val)
    if not b_val > 0:
        raise PositivityError("B", s, b_val)
    coefficient = s / ratios.reference
    domain = problem.domain
    return SolutionProfile(
        s_root=s,
        tuple=values,
        coefficient=coefficient,
        neumann_c=-coefficient * domain.radius / domain.dimension,
        gamma_inverse=problem.lam * b_val / a_val,
        multiplicity=multiplicity,
        lam=problem.lam,
    )


def recover_tuple(profile, ratios):
    """Norm values (s1, s2, t1, t2, ...) of u = (s1/||U||) U.

    Accepts a profile or a bare root s1.  The order is every declared A
    norm followed by every declared B norm.
    """
    s = getattr(profile, "s_root", profile)
    return tuple(s * r for r in ratios.all_ratios)


def verify_system_residual(problem, ratios, profile):
    """Largest relative residual of the norm fixed-point system.

    Each declared norm value v_i must equal lam B / A * (the same norm of U).
    """
    values = profile.tuple
    n_a = len(ratios.A_ratios)
    a_val = eval_expression(problem.A, values[:n_a])
    b_val = eval_expression(problem.B, values[n_a:])
    if not a_val > 0:
        raise PositivityError("A", profile.s_root, a_val)
    if not b_val > 0:
        raise PositivityError("B", profile.s_root, b_val)
    factor = problem.lam * b_val / a_val
    worst = 0.0
    for v, r in zip(values, ratios.all_ratios):
        rhs = factor * r * ratios.reference
        worst = max(worst, abs(v - rhs) / abs(v))
    return worst


def pde_residual(problem, ratios, profile):
    """|A coefficient - lam B| / (lam B).

    Lap U = -1, so -A Lap u = A * coefficient everywhere in the ball and a
    single scalar comparison certifies the equation pointwise.
    """
    values = profile.tuple
    n_a = len(ratios.A_ratios)
    a_val = eval_expression(problem.A, values[:n_a])
    b_val = eval_expression(problem.B, values[n_a:])
    if not a_val > 0:
        raise PositivityError("A", profile.s_root, a_val)
    if not b_val > 0:
        raise PositivityError("B", profile.s_root, b_val)
    rhs = problem.lam * b_val
    return abs(a_val * values[0] / ratios.reference - rhs) / rhs
