"""Acceptance suite.

Eight independent criteria; each test prints exactly one pass/fail line
(run pytest with -s to see them) and then asserts the same condition.
"""

import itertools
import random
import time
from fractions import Fraction

from ellipscheme import classify, exactpoly, patchwork, trigonal
from ellipscheme.classify import DiagramPoint
from ellipscheme.errors import OutOfRange
from ellipscheme.exactpoly import UniPoly
from ellipscheme.trigonal import RealScheme


def _report(n, name, ok):
    print(f"criterion {n} ({name}): {'pass' if ok else 'fail'}")
    assert ok, f"criterion {n} ({name}) failed"


def _all_families(ks=(1, 2)):
    for k in ks:
        for lam in range(k + 1):
            yield ("m", k, lam, patchwork.mcurve_family(k, lam))
        for lam in range(k):
            yield ("m2", k, lam, patchwork.m2curve_family(k, lam))


def test_criterion_1_theorem_verified():
    start = time.monotonic()
    ok = all(classify.verify_theorem(k)[0] for k in range(1, 9))
    ok = ok and time.monotonic() - start < 60
    _report(1, "verify_theorem k=1..8 under a minute", ok)


def test_criterion_2_diagram_shape():
    ok = True
    for k in range(1, 11):
        points = classify.allowed_points(k)
        ok = ok and {DiagramPoint(-p.chi, p.h_star) for p in points} == points
        m_row = {p for p in points if p.h_star == 12 * k}
        want = {
            DiagramPoint(2 * (k + 4 * lam) - (10 * k - 8 * lam), 12 * k)
            for lam in range(k + 1)
        }
        ok = ok and len(m_row) == k + 1 and m_row == want
        ok = ok and len(classify.point_to_types(DiagramPoint(0, 8), k)) == 2
    _report(2, "diagram symmetry, M-points, (0,8) ambiguity", ok)


def test_criterion_3_family_schemes():
    ok = True
    for family, k, lam, con in _all_families():
        cls = patchwork.classify_construction(con)
        if family == "m":
            want = (k - 1 + 4 * lam, 5 * k - 1 - 4 * lam)
        else:
            want = (k + 4 * lam, 5 * k - 4 - 4 * lam)
        ok = ok and (cls.plus_count, cls.minus_count) == want
        if family == "m":
            total = cls.plus_count + cls.minus_count + cls.pseudo_lines
            ok = ok and total == 6 * k - 1
        ok = ok and patchwork.validate(con.tri) == []
    _report(3, "m and m2 family schemes for k=1,2", ok)


def test_criterion_4_oracle():
    start = time.monotonic()
    cases = [
        patchwork.mcurve_family(1, 0),
        patchwork.mcurve_family(1, 1),
        patchwork.m2curve_family(1, 0),
        patchwork.mcurve_family(2, 0),
    ]
    ok = True
    for con in cases:
        report = patchwork.patchwork_oracle(con)
        halvings = report.stabilized_at.denominator.bit_length() - 1
        ok = ok and report.ok and halvings <= 40
        ok = ok and report.scheme == report.combinatorial
    ok = ok and time.monotonic() - start < 300
    _report(4, "oracle on all k=1 fixtures and one k=2 fixture", ok)


def test_criterion_5_collapse():
    con = patchwork.mcurve_family(1, 1)
    ok = True
    for a in range(5):
        cls = patchwork.classify_construction(patchwork.collapse_to(con, a, 0))
        ok = ok and (cls.plus_count, cls.minus_count) == (a, 0)
    cls = patchwork.classify_construction(con)
    for o1, o2 in itertools.combinations(cls.ovals, 2):
        try:
            c1 = patchwork.collapse_ovals(con, [o1])
            c2 = patchwork.collapse_ovals(con, [o2])
        except OutOfRange:
            continue

        def oval_at(c, base):
            return next(
                o
                for o in patchwork.classify_construction(c).ovals
                if o.base_vertex == base
            )

        c12 = patchwork.collapse_ovals(c1, [oval_at(c1, o2.base_vertex)])
        c21 = patchwork.collapse_ovals(c2, [oval_at(c2, o1.base_vertex)])
        both = patchwork.collapse_ovals(con, [o1, o2])
        ok = ok and c12.signs == c21.signs == both.signs
        ok = ok and sorted(c12.tri.triangles) == sorted(c21.tri.triangles)
        ok = ok and sorted(c21.tri.triangles) == sorted(both.tri.triangles)
    _report(5, "oval collapsing reaches every <a'|0> and commutes", ok)


def test_criterion_6_special_extremal():
    ok = True
    want_cover = {1: {"V2+V2"}, 2: {"S1+S1"}}
    for k in (1, 2):
        curve = trigonal.special_extremal(k)
        ok = ok and trigonal.check_generic(curve).is_generic
        delta = trigonal.discriminant(curve)
        ok = ok and exactpoly.count_real_roots(delta) == 0
        ok = ok and exactpoly.sign_at(delta, 0) == -1
        scheme = trigonal.real_scheme(curve)
        ok = ok and scheme.is_three_pseudo_lines
        cover = {t.serialize() for t in classify.cover_type(scheme, k)}
        ok = ok and cover == want_cover[k]
    _report(6, "special extremal curves with root-free discriminant", ok)


def test_criterion_7_cover_types():
    ok = True
    for family, k, lam, con in _all_families():
        cls = patchwork.classify_construction(con)
        a, b = cls.plus_count, cls.minus_count
        types = classify.cover_type(RealScheme.ovals(a, b), k)
        chis = sorted(classify.diagram_point(t).chi for t in types)
        ok = ok and chis == sorted({-2 * (a - b), 2 * (a - b)})
        closure = classify.morse_closure(k)
        points = classify.allowed_points(k)
        for t in types:
            ok = ok and t in closure
            ok = ok and classify.diagram_point(t) in points
    _report(7, "cover types of every fixture scheme fit the diagram", ok)


def _random_known_root_poly(rng):
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
        p = p * (x * x + UniPoly.constant(c))
    return p, sorted(roots)


def test_criterion_8_exact_arithmetic():
    rng = random.Random(824)
    ok = True
    for _ in range(200):
        p, roots = _random_known_root_poly(rng)
        ok = ok and exactpoly.is_squarefree(p)
        intervals = exactpoly.sturm_isolate(p)
        ok = ok and len(intervals) == len(roots)
        for iv, root in zip(intervals, roots):
            ok = ok and iv.lo <= root <= iv.hi
        for left, right in zip(intervals, intervals[1:]):
            ok = ok and left.hi <= right.lo
    for family, k, lam, con in _all_families():
        lifting = patchwork.build_lifting(con.tri, con.history)
        raw = patchwork.emit_T_polynomial(
            patchwork.TPolynomialRequest(
                con.tri, con.signs, lifting, Fraction(1, 16)
            )
        )
        curve = trigonal.depress(raw, k)
        c = raw.terms[(0, 3)]
        a2 = raw.coefficient_in_x(2).scale(1 / c)
        for _ in range(10):
            u0 = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
            x0 = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
            lhs = raw.at_u(u0)(x0 - a2(u0) / 3)
            rhs = c * (x0**3 + curve.p(u0) * x0 + curve.q(u0))
            ok = ok and lhs == rhs
    _report(8, "Sturm isolation and depression identities", ok)
