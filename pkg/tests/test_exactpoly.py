"""Unit tests for the exact rational polynomial layer."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipscheme import exactpoly
from ellipscheme.exactpoly import UniPoly

rationals = st.fractions(
    min_value=-100, max_value=100, max_denominator=64
)
polys = st.lists(rationals, min_size=0, max_size=9).map(UniPoly)


def test_parse_format_basics():
    p = UniPoly([1, 0, Fraction(-3, 2)])
    assert UniPoly.parse(p.format()) == p
    assert UniPoly.parse("0").is_zero()
    assert exactpoly.parse_rational("3/4") == Fraction(3, 4)
    assert exactpoly.format_rational(Fraction(-5, 3)) == "-5/3"


@given(polys)
@settings(max_examples=60, deadline=None)
def test_parse_format_round_trip(p):
    assert UniPoly.parse(p.format()) == p


@given(polys, polys, rationals)
@settings(max_examples=60, deadline=None)
def test_ring_axioms_at_points(a, b, x):
    assert (a + b)(x) == a(x) + b(x)
    assert (a - b)(x) == a(x) - b(x)
    assert (a * b)(x) == a(x) * b(x)
    assert (-a)(x) == -a(x)


@given(polys, polys)
@settings(max_examples=60, deadline=None)
def test_divmod_identity(a, b):
    if b.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.divmod(b)
        return
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@given(polys, rationals, rationals, rationals)
@settings(max_examples=60, deadline=None)
def test_compose_affine(p, alpha, beta, x):
    assert p.compose_affine(alpha, beta)(x) == p(alpha * x + beta)


def test_derivative_power_rule():
    p = UniPoly([0, 0, 0, 2])  # 2x^3
    assert p.derivative() == UniPoly([0, 0, 6])
    assert UniPoly.constant(5).derivative().is_zero()


def test_gcd_and_squarefree():
    x = UniPoly.variable()
    one = UniPoly.constant(1)
    p = (x - one) * (x - one) * (x + one)
    assert not exactpoly.is_squarefree(p)
    assert exactpoly.gcd(p, p.derivative()).degree == 1
    assert exactpoly.is_squarefree((x - one) * (x + one))


def _poly_with_known_roots(rng):
    """Squarefree polynomial of degree <= 12 with known rational roots."""
    n_lin = rng.randint(0, 6)
    roots = set()
    while len(roots) < n_lin:
        roots.add(Fraction(rng.randint(-40, 40), rng.randint(1, 8)))
    x = UniPoly.variable()
    p = UniPoly.constant(rng.choice([1, -1, 2, Fraction(1, 3)]))
    for r in roots:
        p = p * (x - UniPoly.constant(r))
    constants = set()
    while len(constants) < rng.randint(0, (12 - n_lin) // 2):
        constants.add(Fraction(rng.randint(1, 30), rng.randint(1, 4)))
    for c in constants:
        p = p * (x * x + UniPoly.constant(c))  # no real roots
    return p, sorted(roots)


def test_sturm_isolation_against_known_roots():
    rng = random.Random(20250825)
    for _ in range(200):
        p, roots = _poly_with_known_roots(rng)
        assert exactpoly.is_squarefree(p)
        intervals = exactpoly.sturm_isolate(p)
        assert len(intervals) == len(roots)
        assert exactpoly.count_real_roots(p) == len(roots)
        for iv, root in zip(intervals, roots):
            assert iv.lo <= root <= iv.hi
        for a, b in zip(intervals, intervals[1:]):
            assert a.hi <= b.lo


def test_refine_interval_narrows():
    x = UniPoly.variable()
    p = (x * x - UniPoly.constant(2)) * (x + UniPoly.constant(3))
    (iv,) = [
        iv for iv in exactpoly.sturm_isolate(p) if iv.lo >= 0
    ]
    fine = exactpoly.refine_interval(p, iv, Fraction(1, 1024))
    assert fine.width <= Fraction(1, 1024)
    assert fine.lo**2 <= 2 <= fine.hi**2


def test_sign_helpers():
    x = UniPoly.variable()
    p = x * x - UniPoly.constant(1)
    assert exactpoly.sign_at(p, 0) == -1
    assert exactpoly.sign_at(p, 2) == 1
    assert exactpoly.sign_on_interval(p, Fraction(-1, 2), Fraction(1, 2)) == -1


def test_ordered_real_roots_of_cubic():
    # x^3 - 7x + 6 = (x-1)(x-2)(x+3)
    roots = exactpoly.ordered_real_roots_of_cubic(
        Fraction(-7), Fraction(6)
    )
    assert len(roots) == 3
    for iv, expect in zip(roots, (-3, 1, 2)):
        assert iv.lo <= expect <= iv.hi
