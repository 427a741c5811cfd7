"""Tests for triangulations, liftings, tracing, collapsing and fixtures."""

import itertools
import os
import shutil
from fractions import Fraction

import pytest

from ellipscheme import patchwork
from ellipscheme.errors import (
    NotIsolated,
    NotRefinementShaped,
    OutOfRange,
)
from ellipscheme.patchwork import (
    LatticeTriangulation,
    _tri,
    apply_refinement,
    build_lifting,
    certify_convexity,
    classify_construction,
    collapse_ovals,
    collapse_to,
    fan_triangulation,
    symmetrize,
    trace_curve,
    validate,
)


def test_fan_triangulation_validates():
    tri = fan_triangulation(1, [0, 2, 4, 6])
    assert validate(tri) == []
    assert len(tri.triangles) == 3


def test_validate_catches_area_mismatch():
    tri = LatticeTriangulation.build(
        1, [_tri((0, 0), (6, 0), (0, 3))][:1] * 1
    )
    assert validate(tri) == []
    bad = LatticeTriangulation.build(1, [_tri((0, 0), (4, 0), (0, 3))])
    assert any("area sum" in v for v in validate(bad))


def test_apply_refinement_interior_and_edge():
    state = [_tri((0, 0), (6, 0), (0, 3))]
    apply_refinement(state, _tri((0, 0), (6, 0), (0, 3)), (1, 1))
    assert len(state) == 3
    # edge split: (2,0)-(0,0) is not an edge of the current state
    with pytest.raises(NotRefinementShaped):
        apply_refinement(state, ((0, 0), (2, 2)), (1, 1))
    with pytest.raises(NotRefinementShaped):
        apply_refinement(state, _tri((0, 0), (6, 0), (0, 3)), (1, 1))


def test_edge_split_bisects_both_triangles():
    state = list(fan_triangulation(1, [0, 6]).triangles)
    apply_refinement(state, _tri((0, 0), (6, 0), (0, 3)), (2, 1))
    before = len(state)
    apply_refinement(state, ((0, 3), (2, 1)), (1, 2))
    # the edge apex-(2,1) is shared by two triangles; both are bisected
    assert len(state) == before + 2


def test_build_lifting_is_certified_and_dyadic():
    for k, lam in ((1, 0), (1, 1), (2, 0)):
        con = patchwork.mcurve_family(k, lam)
        lifting = build_lifting(con.tri, con.history)
        assert certify_convexity(list(con.tri.triangles), lifting) == []
        for v in con.tri.vertices:
            den = Fraction(lifting[v]).denominator
            assert den & (den - 1) == 0  # power of two
        # fan base values survive on unrefined bottom vertices
        refined = {v for _, v in con.history}
        for v in con.tri.vertices - refined:
            if v[1] == 0:
                assert lifting[v] == v[0] * v[0]
        assert lifting[(0, 3)] == 0


def test_symmetrize_and_segment_count():
    con = patchwork.mcurve_family(1, 0)
    sym = symmetrize(con.tri, con.signs)
    # four copies of each triangle
    assert len(sym.triangles) == 4 * len(con.tri.triangles)
    # sign rule at a sample vertex: s(i,j) * e1^i * e2^j
    for v, s in con.signs.items():
        i, j = v
        if i and j:
            assert sym.signs[(-i, j)] == s * (-1) ** i
            assert sym.signs[(i, -j)] == s * (-1) ** j
    curve = trace_curve(sym)
    mixed = sum(
        1
        for t in sym.triangles
        if len({sym.signs[v] for v in t}) == 2
    )
    assert sum(len(c.segments) for c in curve.components) == mixed


def test_family_schemes():
    expect = {
        ("m", 1, 0): (0, 4),
        ("m", 1, 1): (4, 0),
        ("m2", 1, 0): (1, 1),
        ("m", 2, 0): (1, 9),
        ("m", 2, 1): (5, 5),
        ("m", 2, 2): (9, 1),
        ("m2", 2, 0): (2, 6),
        ("m2", 2, 1): (6, 2),
    }
    for (family, k, lam), (a, b) in expect.items():
        con = (
            patchwork.mcurve_family(k, lam)
            if family == "m"
            else patchwork.m2curve_family(k, lam)
        )
        assert validate(con.tri) == []
        cls = classify_construction(con)
        assert cls.pseudo_lines == 1
        assert (cls.plus_count, cls.minus_count) == (a, b)
        assert cls.scheme.format() == f"<{min(a, b)}|{max(a, b)}>"


def test_family_lambda_range():
    with pytest.raises(OutOfRange):
        patchwork.mcurve_family(1, 2)
    with pytest.raises(OutOfRange):
        patchwork.m2curve_family(1, 1)


def test_collapse_to_chain():
    con = patchwork.mcurve_family(1, 1)
    for a in (4, 3, 2, 1, 0):
        cls = classify_construction(collapse_to(con, a, 0))
        assert (cls.plus_count, cls.minus_count) == (a, 0)
        assert cls.pseudo_lines == 1


def test_collapse_preserves_other_ovals():
    con = patchwork.mcurve_family(1, 1)
    cls = classify_construction(con)
    ids = {(o.base_vertex, o.sign) for o in cls.ovals}
    for r in (1, 2, 3):
        for sub in itertools.combinations(cls.ovals, r):
            try:
                cls2 = classify_construction(collapse_ovals(con, list(sub)))
            except OutOfRange:
                # the only unrealizable remainder: all three bottom-row
                # ovals (the (1,2) oval cannot be removed alone)
                assert {o.base_vertex for o in sub} == {(1, 2)}
                continue
            want = ids - {(o.base_vertex, o.sign) for o in sub}
            assert {(o.base_vertex, o.sign) for o in cls2.ovals} == want


def test_disjoint_collapses_commute():
    con = patchwork.mcurve_family(1, 1)
    cls = classify_construction(con)

    def oval_at(c, base):
        return next(
            o
            for o in classify_construction(c).ovals
            if o.base_vertex == base
        )

    for o1, o2 in itertools.combinations(cls.ovals, 2):
        try:
            c1 = collapse_ovals(con, [o1])
            c2 = collapse_ovals(con, [o2])
        except OutOfRange:
            continue
        c12 = collapse_ovals(c1, [oval_at(c1, o2.base_vertex)])
        c21 = collapse_ovals(c2, [oval_at(c2, o1.base_vertex)])
        both = collapse_ovals(con, [o1, o2])
        assert c12.signs == c21.signs == both.signs
        assert (
            sorted(c12.tri.triangles)
            == sorted(c21.tri.triangles)
            == sorted(both.tri.triangles)
        )


def test_collapse_narrow_oval_is_out_of_range():
    con = patchwork.mcurve_family(2, 0)
    cls = classify_construction(con)
    narrow = next(p for p in con.pieces if p.label == "t")
    target = next(
        o
        for o in cls.ovals
        if patchwork.oval_piece(o, [narrow]) is not None
    )
    with pytest.raises(OutOfRange):
        collapse_ovals(con, [target])


def test_collapse_requires_isolated_target():
    con = patchwork.mcurve_family(1, 1)
    cls = classify_construction(con)
    fake = patchwork.OvalComponent(
        cls.ovals[0].component, ((1, 1), (2, 1)), 1
    )
    with pytest.raises(NotIsolated):
        collapse_ovals(con, [fake])


def test_collapsed_construction_still_lifts_and_emits():
    con = collapse_to(patchwork.mcurve_family(1, 1), 2, 0)
    assert validate(con.tri) == []
    lifting = build_lifting(con.tri, con.history)
    poly = patchwork.emit_T_polynomial(
        patchwork.TPolynomialRequest(
            con.tri, con.signs, lifting, Fraction(1, 2)
        )
    )
    assert len(poly.terms) == len(con.tri.vertices)


def test_emit_T_polynomial_terms():
    con = patchwork.mcurve_family(1, 0)
    lifting = build_lifting(con.tri, con.history)
    poly = patchwork.emit_T_polynomial(
        patchwork.TPolynomialRequest(
            con.tri, con.signs, lifting, Fraction(1, 2)
        )
    )
    assert len(poly.terms) == len(con.tri.vertices)
    for (i, j), c in poly.terms.items():
        assert c != 0
        sign = 1 if c > 0 else -1
        assert sign == con.signs[(i, j)]


def test_fixture_round_trip_and_override(tmp_path, monkeypatch):
    for kind, name in patchwork.FIXTURE_FILES.items():
        fix = patchwork._load_piece(name)
        assert patchwork.parse_fixture(patchwork.format_fixture(fix)) == fix
        src = str(
            __import__("importlib.resources", fromlist=["files"]).files(
                "ellipscheme"
            )
            / "fixtures"
            / name
        )
        shutil.copy(src, tmp_path / name)
    monkeypatch.setenv("ELLIPSCHEME_FIXTURE_DIR", str(tmp_path))
    cls = classify_construction(patchwork.mcurve_family(1, 0))
    assert (cls.plus_count, cls.minus_count) == (0, 4)


def test_oracle_k1():
    report = patchwork.patchwork_oracle(patchwork.m2curve_family(1, 0))
    assert report.ok
    assert report.scheme == report.combinatorial
    assert 0 < report.stabilized_at < 1
