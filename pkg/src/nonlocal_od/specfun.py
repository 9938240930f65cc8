"""Real special functions used by the ball norm identities."""

import math

import numpy as np
from scipy.special import zeta, zetac

__all__ = ["log_gamma", "beta", "sphere_area"]

_EULER_GAMMA = 0.57721566490153286061
_TERMS = 60

# Taylor coefficients about the two zeros of log Gamma:
#   log Gamma(1 + z) = -gamma z + sum_{k>=2} (-1)^k zeta(k) z^k / k
#   log Gamma(2 + z) = (1 - gamma) z + sum_{k>=2} (-1)^k (zeta(k) - 1) z^k / k
_k = np.arange(2, _TERMS + 1)
_SIGN = np.where(_k % 2 == 0, 1.0, -1.0)
_COEF_AT_1 = [0.0, -_EULER_GAMMA] + list(_SIGN * zeta(_k.astype(float)) / _k)
_COEF_AT_2 = [0.0, 1.0 - _EULER_GAMMA] + list(_SIGN * zetac(_k.astype(float)) / _k)
del _k, _SIGN


def _horner(coefs, z):
    acc = 0.0
    for c in reversed(coefs):
        acc = acc * z + c
    return acc


def log_gamma(x):
    """Natural log of the Gamma function for ``x > 0``.

    Near x = 1 and x = 2, where log Gamma vanishes, power series keep the
    relative error at rounding level; elsewhere ``math.lgamma`` is used.
    """
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise ValueError(f"log_gamma requires a finite x > 0, got {x!r}")
    if 0.5 <= x < 1.5:
        return _horner(_COEF_AT_1, x - 1.0)
    if 1.5 <= x < 2.5:
        return _horner(_COEF_AT_2, x - 2.0)
    return math.lgamma(x)


def beta(x, y):
    """Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).

    Evaluated in log space so that large arguments (p + N/2 of a few
    hundred) do not overflow the individual Gamma factors.
    """
    x, y = float(x), float(y)
    if not (x > 0 and y > 0):
        raise ValueError(f"beta requires x > 0 and y > 0, got ({x!r}, {y!r})")
    return math.exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y))


def sphere_area(n):
    """Surface area of the unit sphere S^{n-1} in R^n.

    ``sphere_area(1) == 2`` counts the two points {-1, 1}.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {n!r}")
    n = int(n)
    if n == 1:
        return 2.0
    if n <= 170:
        return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)
    return 2.0 * math.exp(0.5 * n * math.log(math.pi) - log_gamma(0.5 * n))
