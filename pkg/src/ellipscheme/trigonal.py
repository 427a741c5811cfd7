"""Trigonal curves on even Hirzebruch surfaces and their real schemes.

A curve is stored in reduced form x^3 + p(u)x + q(u) = 0 with deg p <= 4k,
deg q <= 6k.  The real scheme (three pseudo-lines, or the unordered oval
pair <a|b>) is read off the sign of the discriminant 4p^3 + 27q^2 on the
real projective line, entirely in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import exactpoly
from .errors import (
    BadNewtonPolygon,
    DegenerateEndpoint,
    DegreeOverflow,
    NonGeneric,
    PerturbationFailed,
)
from .exactpoly import IsolatingInterval, UniPoly

PERTURBATION_CAP = 64


class BivariatePoly:
    """Sparse polynomial in (u, x) with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], Fraction]):
        cleaned = {}
        for (i, j), c in terms.items():
            c = Fraction(c)
            if c:
                cleaned[(int(i), int(j))] = c
        object.__setattr__(self, "terms", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("BivariatePoly is immutable")

    def __eq__(self, other):
        return isinstance(other, BivariatePoly) and self.terms == other.terms

    def x_degree(self) -> int:
        return max((j for (_, j) in self.terms), default=-1)

    def coefficient_in_x(self, j: int) -> UniPoly:
        """The coefficient of x^j, as a polynomial in u."""
        pairs = sorted((i, c) for (i, jj), c in self.terms.items() if jj == j)
        if not pairs:
            return UniPoly.zero()
        coeffs = [Fraction(0)] * (pairs[-1][0] + 1)
        for i, c in pairs:
            coeffs[i] = c
        return UniPoly(coeffs)

    def at_u(self, u0) -> UniPoly:
        """Specialize u = u0; returns a polynomial in x."""
        u0 = Fraction(u0)
        out: dict[int, Fraction] = {}
        for (i, j), c in self.terms.items():
            out[j] = out.get(j, Fraction(0)) + c * u0**i
        coeffs = [Fraction(0)] * (max(out, default=-1) + 1)
        for j, c in out.items():
            coeffs[j] = c
        return UniPoly(coeffs)


@dataclass(frozen=True)
class TrigonalCurve:
    """Reduced trigonal curve x^3 + p(u)x + q(u) = 0 on the Hirzebruch
    surface of degree 2k."""

    k: int
    p: UniPoly
    q: UniPoly

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.p.degree > 4 * self.k or self.q.degree > 6 * self.k:
            raise DegreeOverflow(
                f"deg p = {self.p.degree} (max {4 * self.k}), "
                f"deg q = {self.q.degree} (max {6 * self.k})"
            )

    def fiber_cubic(self, u0) -> UniPoly:
        """The cubic in x over the point u = u0."""
        return exactpoly.depressed_cubic(self.p(u0), self.q(u0))

    def format(self) -> str:
        return f"k={self.k}\np={self.p.format()}\nq={self.q.format()}\n"

    @classmethod
    def parse(cls, text: str) -> "TrigonalCurve":
        fields = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        try:
            k = int(fields["k"])
            p = UniPoly.parse(fields["p"])
            q = UniPoly.parse(fields["q"])
        except KeyError as e:
            raise ValueError(f"curve file is missing field {e.args[0]!r}") from None
        return cls(k, p, q)


@dataclass(frozen=True)
class RealScheme:
    """Either three pseudo-lines, or the unordered oval pair <a|b>.

    The pair is stored canonically with a <= b.
    """

    three_pseudo_lines: bool
    a: int = 0
    b: int = 0

    @classmethod
    def pseudo_lines(cls) -> "RealScheme":
        return cls(True)

    @classmethod
    def ovals(cls, a: int, b: int) -> "RealScheme":
        if a < 0 or b < 0:
            raise ValueError("oval counts are non-negative")
        return cls(False, min(a, b), max(a, b))

    @property
    def is_three_pseudo_lines(self) -> bool:
        return self.three_pseudo_lines

    @property
    def total_ovals(self) -> int:
        return 0 if self.three_pseudo_lines else self.a + self.b

    def format(self) -> str:
        if self.three_pseudo_lines:
            return "three-pseudo-lines"
        return f"<{self.a}|{self.b}>"

    @classmethod
    def parse(cls, text: str) -> "RealScheme":
        text = text.strip()
        if text == "three-pseudo-lines":
            return cls.pseudo_lines()
        inner = text.strip("<>⟨⟩ ")
        a, _, b = inner.partition("|")
        return cls.ovals(int(a), int(b))


@dataclass(frozen=True)
class GenericityReport:
    delta: UniPoly
    degree_ok: bool
    squarefree_ok: bool
    coprime_ok: bool

    @property
    def is_generic(self) -> bool:
        return self.degree_ok and self.squarefree_ok and self.coprime_ok


@dataclass(frozen=True)
class OvalBounds:
    """A maximal interval of the base circle where the discriminant is
    negative (the fiber has three real points there).

    Endpoints are isolating intervals of discriminant roots; for the cyclic
    interval through infinity, ``left`` is the largest root and ``right``
    the smallest.
    """

    left: IsolatingInterval
    right: IsolatingInterval
    spans_infinity: bool
    sample_u: Fraction


@dataclass(frozen=True)
class OvalInfo:
    bounds: OvalBounds
    side: str  # "lower" or "upper"
    group_sign: int  # +1 or -1


@dataclass(frozen=True)
class CurveAnalysis:
    report: GenericityReport
    scheme: RealScheme
    ovals: tuple[OvalInfo, ...]
    zigzags: tuple[OvalBounds, ...]


def depress(raw: BivariatePoly, k: int) -> TrigonalCurve:
    """Eliminate the x^2 terms of a trigonal equation.

    Writing raw = c*(x^3 + a2(u)x^2 + a1(u)x + a0(u)) with c a nonzero
    constant, the substitution x -> x - a2/3 gives the reduced form with
    p = a1 - a2^2/3 and q = a0 - a1*a2/3 + 2*a2^3/27.
    """
    if raw.x_degree() > 3:
        raise BadNewtonPolygon("terms above x^3 are outside the Newton triangle")
    lead = raw.coefficient_in_x(3)
    if lead.is_zero() or not lead.is_constant():
        raise BadNewtonPolygon("the x^3 coefficient must be a nonzero constant")
    c = lead.leading()
    a2 = raw.coefficient_in_x(2).scale(1 / c)
    a1 = raw.coefficient_in_x(1).scale(1 / c)
    a0 = raw.coefficient_in_x(0).scale(1 / c)
    third = Fraction(1, 3)
    p = a1 - (a2 * a2).scale(third)
    q = a0 - (a1 * a2).scale(third) + (a2 * a2 * a2).scale(Fraction(2, 27))
    if p.degree > 4 * k or q.degree > 6 * k:
        raise DegreeOverflow(
            f"depressed degrees deg p = {p.degree}, deg q = {q.degree} "
            f"exceed ({4 * k}, {6 * k})"
        )
    return TrigonalCurve(k, p, q)


def discriminant(c: TrigonalCurve) -> UniPoly:
    """4p^3 + 27q^2."""
    return (c.p**3).scale(4) + (c.q**2).scale(27)


def check_generic(c: TrigonalCurve) -> GenericityReport:
    """Degree, squarefreeness and pairwise-coprimality flags for p, q, delta.

    Squarefree delta implies the curve is nonsingular; full genericity
    additionally asks that p, q and delta have pairwise distinct roots.
    """
    delta = discriminant(c)
    degree_ok = delta.degree == 12 * c.k
    squarefree_ok = not delta.is_zero() and exactpoly.is_squarefree(delta)
    coprime_ok = (
        not c.p.is_zero()
        and not c.q.is_zero()
        and exactpoly.gcd(c.p, c.q).is_constant()
        and exactpoly.gcd(c.p, delta).is_constant()
        and exactpoly.gcd(c.q, delta).is_constant()
    )
    return GenericityReport(delta, degree_ok, squarefree_ok, coprime_ok)


def _delta_negative_intervals(
    c: TrigonalCurve, delta: UniPoly
) -> list[OvalBounds] | None:
    """Maximal delta-negative intervals of the base circle, or None when
    delta < 0 everywhere (the three-pseudo-line situation)."""
    roots = exactpoly.sturm_isolate(delta)
    lead_sign = 1 if delta.leading() > 0 else -1
    if not roots:
        return None if lead_sign < 0 else []
    # signs of delta on the complementary intervals, left ray first
    samples = [roots[0].lo]
    for left, right in zip(roots, roots[1:]):
        samples.append((left.hi + right.lo) / 2)
    samples.append(roots[-1].hi)
    signs = [exactpoly.sign_at(delta, s) for s in samples]
    assert all(s != 0 for s in signs)
    # simple roots force strict alternation
    assert all(s1 == -s2 for s1, s2 in zip(signs, signs[1:]))
    assert signs[0] == signs[-1] == lead_sign
    ovals = []
    for i in range(len(roots) - 1):
        if signs[i + 1] < 0:
            ovals.append(
                OvalBounds(roots[i], roots[i + 1], False, samples[i + 1])
            )
    if lead_sign < 0:
        # the two unbounded rays join into one negative interval through
        # infinity, bounded by the last and first roots
        ovals.append(OvalBounds(roots[-1], roots[0], True, roots[-1].hi + 1))
    return ovals


def _endpoint_pair_side(c: TrigonalCurve, delta: UniPoly, endpoint) -> str:
    """Which adjacent branch pair collides at a simple discriminant root.

    There the cubic has a double root d = -3q/(2p) and a simple root
    s = 3q/p, so d - s = -9q/(2p): the colliding pair is the upper one
    exactly when p*q < 0 at the endpoint.
    """
    try:
        sp = exactpoly.sign_at_root(c.p, delta, endpoint)
        sq = exactpoly.sign_at_root(c.q, delta, endpoint)
    except ValueError as e:
        raise DegenerateEndpoint(
            "p or q vanishes at a discriminant root; the endpoint cubic is "
            "not a double root plus a distinct simple root"
        ) from e
    return "upper" if sp * sq < 0 else "lower"


def oval_pair_side(c: TrigonalCurve, bounds: OvalBounds) -> str | None:
    """Which adjacent branch pair forms an oval over this interval, if any.

    The two branch collisions at the interval's endpoints need not involve
    the same pair: when the upper pair merges at one endpoint and the lower
    pair at the other, the three branches are a single arc of the
    pseudo-line doubling back twice (a zigzag) and the interval carries no
    oval at all; None is returned in that case.
    """
    delta = discriminant(c)
    left = _endpoint_pair_side(c, delta, bounds.left)
    right = _endpoint_pair_side(c, delta, bounds.right)
    return left if left == right else None


def _analyze_interval(c: TrigonalCurve, bounds: OvalBounds) -> OvalInfo | None:
    side = oval_pair_side(c, bounds)
    if side is None:
        return None
    u0 = bounds.sample_u
    roots = exactpoly.ordered_real_roots_of_cubic(c.p(u0), c.q(u0))
    if len(roots) != 3:
        raise AssertionError("delta-negative interval without three branches")
    lo_iv, hi_iv = (roots[0], roots[1]) if side == "lower" else (roots[1], roots[2])
    m = (lo_iv.hi + hi_iv.lo) / 2
    group_sign = exactpoly.sign_at(c.fiber_cubic(u0), m)
    return OvalInfo(bounds, side, group_sign)


def analyze(c: TrigonalCurve) -> CurveAnalysis:
    """Full exact analysis: genericity report, real scheme, per-oval data."""
    report = check_generic(c)
    if not report.is_generic:
        raise NonGeneric(
            f"curve is not generic: degree_ok={report.degree_ok} "
            f"squarefree_ok={report.squarefree_ok} coprime_ok={report.coprime_ok}"
        )
    intervals = _delta_negative_intervals(c, report.delta)
    if intervals is None:
        return CurveAnalysis(report, RealScheme.pseudo_lines(), (), ())
    ovals = []
    zigzags = []
    for b in intervals:
        info = _analyze_interval(c, b)
        if info is None:
            zigzags.append(b)
        else:
            ovals.append(info)
    a = sum(1 for o in ovals if o.group_sign > 0)
    b = sum(1 for o in ovals if o.group_sign < 0)
    return CurveAnalysis(
        report, RealScheme.ovals(a, b), tuple(ovals), tuple(zigzags)
    )


def real_scheme(c: TrigonalCurve) -> RealScheme:
    """The real scheme of a generic curve (raises NonGeneric otherwise)."""
    return analyze(c).scheme


def special_extremal(k: int) -> TrigonalCurve:
    """A generic curve whose real part is three disjoint pseudo-lines.

    Start from the totally reducible x(x - g2)(x - g3) with g2 = u^2k + 1
    and g3 = -u^2k - 2 (the pairwise differences have no real roots), then
    add a constant 1/2^j, halving until the depressed curve is generic and
    still has three pseudo-lines.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g2 = UniPoly.monomial(1, 2 * k) + UniPoly.constant(1)
    g3 = -(UniPoly.monomial(1, 2 * k) + UniPoly.constant(2))
    e1 = g2 + g3  # elementary symmetric functions of 0, g2, g3
    e2 = g2 * g3
    e3 = UniPoly.zero()
    for j in range(1, PERTURBATION_CAP + 1):
        eps = Fraction(1, 2**j)
        terms: dict[tuple[int, int], Fraction] = {}
        for i, coeff in enumerate(UniPoly.constant(1).coeffs):
            terms[(i, 3)] = coeff
        for i, coeff in enumerate((-e1).coeffs):
            terms[(i, 2)] = coeff
        for i, coeff in enumerate(e2.coeffs):
            terms[(i, 1)] = coeff
        for i, coeff in enumerate((-e3 + UniPoly.constant(eps)).coeffs):
            terms[(i, 0)] = coeff
        curve = depress(BivariatePoly(terms), k)
        report = check_generic(curve)
        if not report.is_generic:
            continue
        if analyze(curve).scheme.is_three_pseudo_lines:
            return curve
    raise PerturbationFailed(
        f"no generic three-pseudo-line perturbation within {PERTURBATION_CAP} halvings"
    )
