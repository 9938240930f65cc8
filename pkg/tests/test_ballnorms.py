import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from nonlocal_od.ballnorms import (
    BallDomain,
    NormSpec,
    QuadratureError,
    closed_form_norm,
    norm_via_quadrature,
    torsion_grad_norm,
    torsion_norm,
)
from nonlocal_od.specfun import sphere_area


def scipy_radial_norm(n, r, kind, e):
    """Independent oracle: scipy's QUADPACK on the radial integral."""
    if kind == "u":
        f = lambda rho: ((r * r - rho * rho) / (2 * n)) ** e * rho ** (n - 1)
    else:
        f = lambda rho: (rho / n) ** e * rho ** (n - 1)
    val, _ = quad(f, 0, r, epsabs=0, epsrel=1e-13, limit=200)
    return (sphere_area(n) * val) ** (1 / e)


@pytest.mark.parametrize(
    "n, r, p, expected",
    [
        (2, 1.0, 1.0, math.pi / 8),
        (3, 1.0, 1.0, 4 * math.pi / 45),
        (2, 2.0, 1.0, 2 * math.pi),
    ],
)
def test_torsion_norm_examples(n, r, p, expected):
    assert torsion_norm(BallDomain(n, r), p) == pytest.approx(expected, rel=1e-13)
    assert scipy_radial_norm(n, r, "u", p) == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize(
    "n, r, q, expected",
    [
        (2, 1.0, 2.0, math.sqrt(math.pi / 8)),
        (2, 1.0, 1.0, math.pi / 3),
        (1, 1.0, 1.0, 1.0),
    ],
)
def test_torsion_grad_norm_examples(n, r, q, expected):
    assert torsion_grad_norm(BallDomain(n, r), q) == pytest.approx(expected, rel=1e-13)
    assert scipy_radial_norm(n, r, "grad", q) == pytest.approx(expected, rel=1e-11)


def test_one_dimensional_function_norm():
    # int_{-1}^{1} ((1 - x^2)/2)^2 dx = (2 - 4/3 + 2/5) / 4 = 4/15
    val = norm_via_quadrature(BallDomain(1, 1.0), NormSpec("u", 2))
    assert val == pytest.approx(math.sqrt(4 / 15), rel=1e-10)
    assert torsion_norm(BallDomain(1, 1.0), 2) == pytest.approx(math.sqrt(4 / 15), rel=1e-13)


@pytest.mark.parametrize(
    "n, r, spec, rel",
    [(2, 1.0, NormSpec("u", 1), 1e-10), (5, 3.0, NormSpec("grad", 0.5), 1e-9)],
)
def test_quadrature_matches_closed_form(n, r, spec, rel):
    d = BallDomain(n, r)
    assert norm_via_quadrature(d, spec) == pytest.approx(closed_form_norm(d, spec), rel=rel)


def test_closed_form_vs_quadrature_grid():
    for n, r, e, kind in itertools.product(
        (1, 2, 3, 5, 10), (0.5, 1.0, 3.0), (0.5, 1.0, 2.0, 3.7), ("u", "grad")
    ):
        d, spec = BallDomain(n, r), NormSpec(kind, e)
        closed, numeric = closed_form_norm(d, spec), norm_via_quadrature(d, spec)
        assert abs(closed - numeric) <= 1e-8 * closed, (n, r, e, kind)


@given(
    n=st.integers(1, 12),
    r=st.floats(0.05, 20.0),
    e=st.floats(0.1, 8.0),
)
def test_scaling_law(n, r, e):
    unit, scaled = BallDomain(n, 1.0), BallDomain(n, r)
    assert torsion_norm(scaled, e) == pytest.approx(
        r ** ((2 * e + n) / e) * torsion_norm(unit, e), rel=1e-12
    )
    assert torsion_grad_norm(scaled, e) == pytest.approx(
        r ** ((n + e) / e) * torsion_grad_norm(unit, e), rel=1e-12
    )


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
def test_translation_invariance(center):
    moved, origin = BallDomain(3, 1.7, center), BallDomain(3, 1.7)
    for spec in (NormSpec("u", 1.3), NormSpec("grad", 2.2)):
        assert closed_form_norm(moved, spec) == closed_form_norm(origin, spec)
        assert norm_via_quadrature(moved, spec) == norm_via_quadrature(origin, spec)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_exponent_domain(bad):
    d = BallDomain(2, 1.0)
    with pytest.raises(ValueError):
        torsion_norm(d, bad)
    with pytest.raises(ValueError):
        torsion_grad_norm(d, bad)
    with pytest.raises(ValueError):
        NormSpec("u", bad)


def test_domain_validation():
    with pytest.raises(ValueError, match="dimension must be ≥ 1"):
        BallDomain(0, 1.0)
    with pytest.raises(ValueError):
        BallDomain(2, -1.0)
    with pytest.raises(ValueError):
        BallDomain(2, 1.0, (0.0,))
    assert BallDomain(3, 1.0).center == (0.0, 0.0, 0.0)


def test_norm_spec_parse():
    assert NormSpec.parse("grad:2") == NormSpec("gradient", 2.0)
    assert NormSpec.parse("u:0.5").kind == "u"
    for bad in ("u", "x:1", "u:abc", "grad:-1"):
        with pytest.raises(ValueError):
            NormSpec.parse(bad)


def test_quadrature_budget_exhaustion_is_reported():
    with pytest.raises(QuadratureError):
        norm_via_quadrature(BallDomain(3, 1.0), NormSpec("u", 0.5), rtol=1e-15, max_intervals=2)
