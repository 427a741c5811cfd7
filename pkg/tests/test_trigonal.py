"""Tests for trigonal curve genericity and real-scheme analysis."""

import random
from fractions import Fraction

import pytest

from ellipscheme import classify, patchwork, trigonal
from ellipscheme.errors import BadNewtonPolygon, DegreeOverflow
from ellipscheme.exactpoly import UniPoly
from ellipscheme.trigonal import BivariatePoly, RealScheme, TrigonalCurve


def test_real_scheme_canonical_pair():
    s = RealScheme.ovals(4, 0)
    assert (s.a, s.b) == (0, 4)
    assert s.format() == "<0|4>"
    assert RealScheme.parse("<4|0>") == s
    assert RealScheme.parse("three-pseudo-lines").is_three_pseudo_lines
    assert s.total_ovals == 4
    with pytest.raises(ValueError):
        RealScheme.ovals(-1, 0)


def test_curve_parse_format_round_trip():
    c = TrigonalCurve(1, UniPoly([1, 2]), UniPoly([0, 0, Fraction(1, 3)]))
    assert TrigonalCurve.parse(c.format()) == c


def test_degree_overflow():
    with pytest.raises(DegreeOverflow):
        TrigonalCurve(1, UniPoly([0] * 5 + [1]), UniPoly.zero())


def test_depress_rejects_bad_newton_polygon():
    with pytest.raises(BadNewtonPolygon):
        trigonal.depress(BivariatePoly({(0, 4): Fraction(1)}), 1)
    with pytest.raises(BadNewtonPolygon):
        # x^3 coefficient depends on u
        trigonal.depress(
            BivariatePoly({(1, 3): Fraction(1), (0, 0): Fraction(1)}), 1
        )


def test_depress_substitution_identity():
    """raw(u0, x0 - a2(u0)/3) = c * (x0^3 + p(u0) x0 + q(u0))."""
    rng = random.Random(7)
    for _ in range(5):
        c = Fraction(rng.randint(1, 4))
        terms = {(0, 3): c}
        for j in range(3):
            for _ in range(rng.randint(1, 3)):
                terms[(rng.randint(0, 2 * (3 - j)), j)] = Fraction(
                    rng.randint(-9, 9)
                )
        raw = BivariatePoly(terms)
        curve = trigonal.depress(raw, 1)
        a2 = raw.coefficient_in_x(2).scale(1 / c)
        for _ in range(10):
            u0 = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
            x0 = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
            lhs = raw.at_u(u0)(x0 - a2(u0) / 3)
            rhs = c * (x0**3 + curve.p(u0) * x0 + curve.q(u0))
            assert lhs == rhs


def test_check_generic_flags():
    ok = trigonal.special_extremal(1)
    report = trigonal.check_generic(ok)
    assert report.is_generic
    bad = TrigonalCurve(1, UniPoly.zero(), UniPoly([0, 0, 0, 1]))
    report = trigonal.check_generic(bad)
    assert not report.is_generic
    assert not report.squarefree_ok


def test_three_pseudo_lines():
    for k in (1, 2):
        c = trigonal.special_extremal(k)
        assert trigonal.check_generic(c).is_generic
        s = trigonal.real_scheme(c)
        assert s.is_three_pseudo_lines
        delta = trigonal.discriminant(c)
        from ellipscheme import exactpoly

        assert exactpoly.count_real_roots(delta) == 0
        assert exactpoly.sign_at(delta, 0) == -1


def test_analyze_matches_patchwork_and_counts_zigzags():
    """The exact analysis of an emitted T-polynomial agrees with the
    combinatorial scheme; zigzag intervals carry no oval."""
    con = patchwork.mcurve_family(1, 0)
    cls = patchwork.classify_construction(con)
    lifting = patchwork.build_lifting(con.tri, con.history)
    poly = patchwork.emit_T_polynomial(
        patchwork.TPolynomialRequest(con.tri, con.signs, lifting, Fraction(1, 16))
    )
    curve = trigonal.depress(poly, 1)
    assert trigonal.check_generic(curve).is_generic
    analysis = trigonal.analyze(curve)
    assert analysis.scheme == cls.scheme
    assert len(analysis.ovals) == cls.plus_count + cls.minus_count
    # the pseudo-line doubles back at least once on a maximal curve
    assert len(analysis.zigzags) > 0
    # every delta-negative interval is an oval or a zigzag, never both
    delta = trigonal.discriminant(curve)
    intervals = trigonal._delta_negative_intervals(curve, delta)
    assert len(intervals) == len(analysis.ovals) + len(analysis.zigzags)


def test_oval_pair_side_is_none_exactly_for_zigzags():
    con = patchwork.mcurve_family(1, 0)
    lifting = patchwork.build_lifting(con.tri, con.history)
    poly = patchwork.emit_T_polynomial(
        patchwork.TPolynomialRequest(con.tri, con.signs, lifting, Fraction(1, 16))
    )
    curve = trigonal.depress(poly, 1)
    delta = trigonal.discriminant(curve)
    sides = [
        trigonal.oval_pair_side(curve, b)
        for b in trigonal._delta_negative_intervals(curve, delta)
    ]
    analysis = trigonal.analyze(curve)
    assert sides.count(None) == len(analysis.zigzags)
    assert len(sides) - sides.count(None) == len(analysis.ovals)


def test_cover_type_of_analyzed_scheme():
    c = trigonal.special_extremal(1)
    s = trigonal.real_scheme(c)
    types = classify.cover_type(s, 1)
    assert {t.serialize() for t in types} == {"V2+V2"}
