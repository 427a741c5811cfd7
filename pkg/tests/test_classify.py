"""Tests for the topological-type diagram and the theorem cross-check."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipscheme import classify
from ellipscheme.classify import DiagramPoint, TopType
from ellipscheme.trigonal import RealScheme


def test_type_serialize_parse_round_trip():
    for text in ("V10", "2S+S4", "S+V4", "V2+V2", "3S1"):
        t = TopType.parse(text)
        assert TopType.parse(t.serialize()) == t


def test_parse_rejects_odd_nonorientable_index():
    with pytest.raises(ValueError):
        TopType.parse("V3")


@given(st.integers(min_value=1, max_value=6))
@settings(max_examples=6, deadline=None)
def test_diagram_symmetry_and_m_row(k):
    points = classify.allowed_points(k)
    assert {DiagramPoint(-p.chi, p.h_star) for p in points} == points
    m_row = {p for p in points if p.h_star == 12 * k}
    assert m_row == {
        DiagramPoint(2 * (k + 4 * lam) - (10 * k - 8 * lam), 12 * k)
        for lam in range(k + 1)
    }


def test_point_zero_eight_has_two_types():
    for k in (1, 2, 3):
        pt = DiagramPoint(0, 8)
        assert pt in classify.allowed_points(k)
        assert len(classify.point_to_types(pt, k)) == 2


def test_extremal_count_and_membership():
    for k in (1, 2, 3):
        ext = classify.extremal_types(k)
        assert len(ext) == 2 * k + 2
        closure = classify.morse_closure(k)
        for t in ext:
            assert t in closure
            assert classify.is_extremal(t, k)


def test_k1_extremal_types():
    names = {t.serialize() for t in classify.extremal_types(1)}
    assert names == {"V10", "4S+V2", "S+V4", "V2+V2"}


def test_morse_moves_shrink_betti():
    t = TopType.parse("S+V4")
    h_star = classify.diagram_point(t).h_star
    moves = classify.morse_moves(t)
    assert {m.serialize() for m in moves} == {"S+V2", "V4"}
    for m in moves:
        assert classify.diagram_point(m).h_star == h_star - 2


def test_verify_theorem():
    for k in (1, 2, 3, 4):
        ok, report = classify.verify_theorem(k)
        assert ok, report


def test_cover_type_scheme_chi():
    fixture_schemes = {
        1: [(0, 4), (4, 0), (1, 1)],
        2: [(1, 9), (5, 5), (9, 1), (2, 6), (6, 2)],
    }
    for k, schemes in fixture_schemes.items():
        closure = classify.morse_closure(k)
        points = classify.allowed_points(k)
        for a, b in schemes:
            s = RealScheme.ovals(a, b)
            types = classify.cover_type(s, k)
            chis = sorted(classify.diagram_point(t).chi for t in types)
            d = 2 * abs(a - b)
            assert chis == sorted({-d, d})
            for t in types:
                assert t in closure
                assert classify.diagram_point(t) in points


def test_cover_type_three_pseudo_lines():
    assert {t.serialize() for t in classify.cover_type(RealScheme.pseudo_lines(), 1)} == {"V2+V2"}
    assert {t.serialize() for t in classify.cover_type(RealScheme.pseudo_lines(), 2)} == {"S1+S1"}


def test_diagram_json_is_valid():
    data = json.loads(classify.diagram_json(2))
    assert data["k"] == 2
    pts = {(p["chi"], p["h_star"]) for p in data["points"]}
    assert pts == {(p.chi, p.h_star) for p in classify.allowed_points(2)}


def test_diagram_ascii_mentions_axis():
    text = classify.diagram_ascii(1)
    assert "chi" in text and "h*" in text
