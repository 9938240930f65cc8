"""Lebesgue norms of the torsion function of a ball.

The torsion function of B_R(x0) is U(x) = (R^2 - |x - x0|^2) / (2N), the
solution of -Lap U = 1 with zero boundary values.  Its L^p norm and the
L^q norm of its gradient have closed forms in terms of the Beta function;
``norm_via_quadrature`` recomputes both from the radial integral so the
closed forms can be checked independently.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import beta, sphere_area

__all__ = [
    "FUNCTION",
    "GRADIENT",
    "BallDomain",
    "NormSpec",
    "QuadratureError",
    "torsion_norm",
    "torsion_grad_norm",
    "closed_form_norm",
    "norm_via_quadrature",
    "adaptive_gauss",
]

FUNCTION = "u"
GRADIENT = "grad"

_KIND_ALIASES = {
    "u": FUNCTION,
    "function": FUNCTION,
    "grad": GRADIENT,
    "gradient": GRADIENT,
}


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance within budget."""


@dataclass(frozen=True)
class BallDomain:
    dimension: int
    radius: float
    center: tuple = field(default=None)

    def __post_init__(self):
        if isinstance(self.dimension, bool) or int(self.dimension) != self.dimension:
            raise ValueError(f"dimension must be an integer, got {self.dimension!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be ≥ 1")
        object.__setattr__(self, "dimension", int(self.dimension))
        r = float(self.radius)
        if not (r > 0 and math.isfinite(r)):
            raise ValueError(f"radius must be positive and finite, got {self.radius!r}")
        object.__setattr__(self, "radius", r)
        if self.center is None:
            center = (0.0,) * self.dimension
        else:
            center = tuple(float(c) for c in self.center)
        if len(center) != self.dimension:
            raise ValueError(
                f"center has {len(center)} coordinates, expected {self.dimension}"
            )
        object.__setattr__(self, "center", center)


@dataclass(frozen=True)
class NormSpec:
    """Which norm feeds a coefficient slot: ``u`` (L^p of U) or ``grad``."""

    kind: str
    exponent: float

    def __post_init__(self):
        kind = _KIND_ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise ValueError(f"norm kind must be 'u' or 'grad', got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        e = float(self.exponent)
        if not (e > 0 and math.isfinite(e)):
            raise ValueError(f"norm exponent must be positive, got {self.exponent!r}")
        object.__setattr__(self, "exponent", e)

    def __str__(self):
        return f"{self.kind}:{self.exponent:g}"

    @classmethod
    def parse(cls, text):
        """Build from ``"u:2"`` / ``"grad:1.5"`` shorthand."""
        kind, sep, exponent = text.partition(":")
        if not sep:
            raise ValueError(f"norm spec must look like 'u:p' or 'grad:q', got {text!r}")
        try:
            value = float(exponent)
        except ValueError:
            raise ValueError(f"bad exponent in norm spec {text!r}") from None
        return cls(kind.strip(), value)


def _check_exponent(value, name):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def torsion_norm(domain, p):
    """||U||_{L^p(B_R)} from the Beta-function identity (p-th root applied)."""
    p = _check_exponent(p, "p")
    n, r = domain.dimension, domain.radius
    log_pth_power = (
        p * math.log(1.0 / (2 * n))
        + math.log(0.5 * sphere_area(n))
        + (2 * p + n) * math.log(r)
        + math.log(beta(0.5 * n, p + 1.0))
    )
    return math.exp(log_pth_power / p)


def torsion_grad_norm(domain, q):
    """||grad U||_{L^q(B_R)} in closed form."""
    q = _check_exponent(q, "q")
    n, r = domain.dimension, domain.radius
    log_qth_power = (
        q * math.log(1.0 / n)
        + math.log(sphere_area(n) / (n + q))
        + (n + q) * math.log(r)
    )
    return math.exp(log_qth_power / q)


def closed_form_norm(domain, spec):
    if spec.kind == FUNCTION:
        return torsion_norm(domain, spec.exponent)
    return torsion_grad_norm(domain, spec.exponent)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _gauss(f, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _GL_NODES
    return half * float(np.dot(_GL_WEIGHTS, f(x)))


def adaptive_gauss(f, a, b, rtol=1e-12, max_intervals=4000):
    """Globally adaptive composite Gauss-Legendre quadrature of a vectorised f.

    Each panel's error is estimated by comparing the 12-point rule on the
    panel with the sum over its two halves; the worst panel is bisected
    until the summed estimate drops below ``rtol * |integral|``.
    """
    def panel(lo, hi):
        whole = _gauss(f, lo, hi)
        mid = 0.5 * (lo + hi)
        left, right = _gauss(f, lo, mid), _gauss(f, mid, hi)
        return left + right, abs(left + right - whole), lo, hi

    value, err, lo, hi = panel(a, b)
    heap = [(-err, lo, hi, value)]
    total, total_err = value, err
    while total_err > rtol * abs(total):
        if len(heap) >= max_intervals:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] after {max_intervals} panels "
                f"(error estimate {total_err:.3e}, value {total:.6e})"
            )
        neg_err, lo, hi, value = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureError(f"panel [{lo}, {hi}] cannot be bisected further")
        total -= value
        total_err += neg_err
        for sub in (panel(lo, mid), panel(mid, hi)):
            v, e, l, h = sub
            heapq.heappush(heap, (-e, l, h, v))
            total += v
            total_err += e
    # re-sum to shed the drift from incremental updates
    return math.fsum(item[3] for item in heap)


def norm_via_quadrature(domain, spec, rtol=1e-12, max_intervals=4000):
    """The same norm as ``closed_form_norm`` from the radial integral
    omega_{N-1} * int_0^R f(rho)^p rho^{N-1} drho."""
    n, r = domain.dimension, domain.radius
    e = spec.exponent
    if spec.kind == FUNCTION:
        def integrand(rho):
            return ((r * r - rho * rho) / (2 * n)) ** e * rho ** (n - 1)
    else:
        def integrand(rho):
            return (rho / n) ** e * rho ** (n - 1)
    integral = adaptive_gauss(integrand, 0.0, r, rtol=rtol, max_intervals=max_intervals)
    return (sphere_area(n) * integral) ** (1.0 / e)
