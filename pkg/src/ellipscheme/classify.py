"""Arithmetic classification of topological types of real regular jacobian
elliptic surfaces with holomorphic Euler characteristic k.

Two independent routes are implemented and cross-checked:

* the restriction route: enumerate the allowed (chi, h*) diagram points from
  inequalities and congruences, then map each point to its topological types;
* the construction route: start from the extremal types and close under
  Morse simplifications.

`verify_theorem` asserts the two routes produce the same set.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable

from .errors import NotAllowed, NotInFamily

# A closed-surface component is ('S', g) for the orientable surface of genus g
# (g = 0 is the sphere) or ('V', q) for the non-orientable surface with q
# cross-caps (Euler characteristic 2 - q).
Component = tuple[str, int]


@dataclass(frozen=True)
class KInvariants:
    """Numerical invariants of the complex surface, all determined by k."""

    k: int

    @property
    def b_total(self) -> int:
        return 12 * self.k

    @property
    def b2(self) -> int:
        return 12 * self.k - 2

    @property
    def tau(self) -> int:
        return -8 * self.k

    @property
    def tau_minus(self) -> int:
        return 10 * self.k - 1

    @property
    def chi_top(self) -> int:
        return 12 * self.k


@dataclass(frozen=True, order=True)
class DiagramPoint:
    """A point (chi, h*) of the restriction diagram; both entries are even."""

    chi: int
    h_star: int

    @property
    def ncomp(self) -> int:
        return (self.chi + self.h_star) // 4

    @property
    def h1(self) -> int:
        return (self.h_star - self.chi) // 2


class TopType:
    """A topological type: multiset of closed surfaces in canonical order."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Component]):
        comps = []
        for kind, n in components:
            if kind == "V" and n < 1:
                raise ValueError("non-orientable component needs >= 1 cross-cap")
            if kind not in ("S", "V") or n < 0:
                raise ValueError(f"bad component {(kind, n)!r}")
            comps.append((kind, n))
        if not comps:
            raise ValueError("a topological type has at least one component")
        object.__setattr__(self, "components", tuple(sorted(comps)))

    def __setattr__(self, name, value):
        raise AttributeError("TopType is immutable")

    def __eq__(self, other):
        return isinstance(other, TopType) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"TopType({self.serialize()!r})"

    def serialize(self) -> str:
        """Render as e.g. "2S+S4", "V10", "S1+S1"."""
        parts = []
        sphere_count = sum(1 for c in self.components if c == ("S", 0))
        if sphere_count == 1:
            parts.append("S")
        elif sphere_count > 1:
            parts.append(f"{sphere_count}S")
        # non-spherical components are spelled out one by one
        for kind, n in self.components:
            if (kind, n) != ("S", 0):
                parts.append(f"{kind}{n}")
        return "+".join(parts)

    @classmethod
    def parse(cls, text: str) -> "TopType":
        comps: list[Component] = []
        for part in text.strip().split("+"):
            m = re.fullmatch(r"(\d*)([SV])(\d*)", part.strip())
            if not m:
                raise ValueError(f"cannot parse component {part!r}")
            count = int(m.group(1)) if m.group(1) else 1
            kind = m.group(2)
            n = int(m.group(3)) if m.group(3) else 0
            if kind == "V" and not m.group(3):
                raise ValueError(f"non-orientable component needs an index: {part!r}")
            if kind == "V" and n % 2 == 1:
                raise ValueError(
                    f"odd cross-cap count {part!r} cannot occur for these surfaces"
                )
            comps.extend([(kind, n)] * count)
        return cls(comps)


def component_betti(c: Component) -> tuple[int, int]:
    """(Euler characteristic, first mod-2 Betti number) of one component."""
    kind, n = c
    if kind == "S":
        return 2 - 2 * n, 2 * n
    return 2 - n, n


def betti(t: TopType) -> tuple[int, int, int, int]:
    """(chi, h*, h1, ncomp) of a topological type."""
    chi = h1 = 0
    for c in t.components:
        cchi, ch1 = component_betti(c)
        chi += cchi
        h1 += ch1
    ncomp = len(t.components)
    return chi, 2 * ncomp + h1, h1, ncomp


def diagram_point(t: TopType) -> DiagramPoint:
    chi, h_star, _, _ = betti(t)
    return DiagramPoint(chi, h_star)


def allowed_points(k: int) -> set[DiagramPoint]:
    """All (chi, h*) pairs not prohibited for holomorphic Euler
    characteristic k.

    Constraints: parity, the Smith bound h* <= 12k, the Comessatti-type band
    |chi| <= 10k - 2, chi <= h* - 4 and chi >= 4 - h*, component count between
    1 and 5k, even first Betti number between 2 and 10k, and the mod-16
    congruences chi = 8k (d = 0) or chi = 8k +- 2 (d = 1) where
    2d = 12k - h*.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    points: set[DiagramPoint] = set()
    for h_star in range(4, 12 * k + 1, 2):
        for chi in range(2 - 10 * k, 10 * k - 1, 2):
            if chi > h_star - 4 or chi < 4 - h_star:
                continue
            if (chi + h_star) % 4 != 0:
                continue
            ncomp = (chi + h_star) // 4
            if not 1 <= ncomp <= 5 * k:
                continue
            h1 = (h_star - chi) // 2
            if h1 % 2 != 0 or not 2 <= h1 <= 10 * k:
                continue
            d2 = 12 * k - h_star
            if d2 == 0 and (chi - 8 * k) % 16 != 0:
                continue
            if d2 == 2 and (chi - 8 * k) % 16 not in (2, 14):
                continue
            points.add(DiagramPoint(chi, h_star))
    return points


def point_to_types(pt: DiagramPoint, k: int) -> set[TopType]:
    """Topological types realizing an allowed diagram point.

    Inverting chi = 2(a+1) - 2l and h* = 2(a+1) + 2l gives a spheres plus one
    component S_l (k even) or V_2l (k odd); the point (0, 8) additionally
    carries the two-torus / two-Klein-bottle type.
    """
    if pt not in allowed_points(k):
        raise NotAllowed(f"({pt.chi}, {pt.h_star}) is not allowed for k={k}")
    a = (pt.chi + pt.h_star) // 4 - 1
    l = (pt.h_star - pt.chi) // 4
    big: Component = ("S", l) if k % 2 == 0 else ("V", 2 * l)
    types = {TopType([big] + [("S", 0)] * a)}
    if (pt.chi, pt.h_star) == (0, 8):
        pair: Component = ("S", 1) if k % 2 == 0 else ("V", 2)
        types.add(TopType([pair, pair]))
    return types


def extremal_types(k: int) -> list[TopType]:
    """The 2k + 2 extremal types: the M-list, the (M-2)-list, and the
    two-torus / two-Klein-bottle type."""
    if k < 1:
        raise ValueError("k must be >= 1")

    def build(a: int, l: int) -> TopType:
        big: Component = ("S", l) if k % 2 == 0 else ("V", 2 * l)
        return TopType([big] + [("S", 0)] * a)

    types = []
    for lam in range(k + 1):
        types.append(build(k + 4 * lam - 1, 5 * k - 4 * lam))
    for lam in range(k):
        types.append(build(k + 4 * lam, 5 * k - 4 * lam - 3))
    pair: Component = ("S", 1) if k % 2 == 0 else ("V", 2)
    types.append(TopType([pair, pair]))
    return types


def morse_moves(t: TopType, allow_genus_zero: bool = True) -> set[TopType]:
    """All types reachable by one Morse simplification.

    Moves: remove a spherical component (only while another component
    remains), or contract one handle.  With ``allow_genus_zero`` (the
    default) the boundary contractions S_1 -> S and V_2 -> S are permitted;
    both drop the total Betti number by 2 like any other contraction.
    """
    results: set[TopType] = set()
    comps = list(t.components)
    for i, (kind, n) in enumerate(comps):
        rest = comps[:i] + comps[i + 1 :]
        if (kind, n) == ("S", 0):
            if rest:
                results.add(TopType(rest))
            continue
        if kind == "S":
            if n >= 2 or allow_genus_zero:
                results.add(TopType(rest + [("S", n - 1)]))
        else:
            if n >= 4:
                results.add(TopType(rest + [("V", n - 2)]))
            elif n == 2 and allow_genus_zero:
                results.add(TopType(rest + [("S", 0)]))
    return results


def morse_closure(k: int, allow_genus_zero: bool = True) -> set[TopType]:
    """Transitive closure of Morse simplifications from the extremal types,
    filtered to types with total first Betti number >= 2."""
    seen: set[TopType] = set()
    frontier = list(extremal_types(k))
    while frontier:
        t = frontier.pop()
        if t in seen:
            continue
        seen.add(t)
        frontier.extend(morse_moves(t, allow_genus_zero) - seen)
    return {t for t in seen if betti(t)[2] >= 2}


def restriction_types(k: int) -> set[TopType]:
    """Union of point_to_types over the allowed diagram points."""
    out: set[TopType] = set()
    for pt in allowed_points(k):
        out |= point_to_types(pt, k)
    return out


def verify_theorem(k: int) -> tuple[bool, dict[str, list[str]]]:
    """Check that the Morse closure of the extremal types equals the set of
    types allowed by the restrictions.  Returns (ok, discrepancy report)."""
    closure = morse_closure(k)
    allowed = restriction_types(k)
    missing = sorted(t.serialize() for t in allowed - closure)
    extra = sorted(t.serialize() for t in closure - allowed)
    return (not missing and not extra), {
        "allowed_but_not_constructed": missing,
        "constructed_but_not_allowed": extra,
    }


def cover_type(scheme, k: int) -> set[TopType]:
    """Topological types of the double cover of the even Hirzebruch surface
    branched over curve plus exceptional section, one per real structure.

    Three pseudo-lines give the two-torus (k even) or two-Klein-bottle
    (k odd) type; a scheme with oval groups (a, b) gives a spheres plus
    S_{b+1} (k even) or V_{2b+2} (k odd), together with the (b, a) swap.
    """
    from .trigonal import RealScheme  # local import to avoid a cycle

    if not isinstance(scheme, RealScheme):
        raise TypeError("expected a RealScheme")
    if scheme.is_three_pseudo_lines:
        pair: Component = ("S", 1) if k % 2 == 0 else ("V", 2)
        return {TopType([pair, pair])}
    out: set[TopType] = set()
    for a, b in ((scheme.a, scheme.b), (scheme.b, scheme.a)):
        big: Component = ("S", b + 1) if k % 2 == 0 else ("V", 2 * b + 2)
        out.add(TopType([big] + [("S", 0)] * a))
    return out


def is_extremal(t: TopType, k: int) -> bool:
    """True iff no other type in the family simplifies to t in one move."""
    closure = morse_closure(k)
    if t not in closure:
        raise NotInFamily(f"{t.serialize()} is not in the k={k} family")
    return not any(t in morse_moves(other) for other in closure)


def diagram_json(k: int) -> str:
    """JSON rendering of the allowed diagram: one record per point with its
    type list, extremality marks and the M / extremal-(M-2) highlights."""
    extremals = set(extremal_types(k))
    records = []
    for pt in sorted(allowed_points(k)):
        types = sorted(point_to_types(pt, k), key=lambda t: t.serialize())
        records.append(
            {
                "chi": pt.chi,
                "h_star": pt.h_star,
                "ncomp": pt.ncomp,
                "h1": pt.h1,
                "types": [t.serialize() for t in types],
                "extremal": [t.serialize() for t in types if t in extremals],
                "m_surface": pt.h_star == 12 * k,
                "special": (pt.chi, pt.h_star) == (0, 8),
            }
        )
    return json.dumps({"k": k, "points": records}, indent=2)


def diagram_ascii(k: int) -> str:
    """ASCII rendering of the diamond of allowed (chi, h*) points.

    Rows run from h* = 12k down to 4; columns from chi = 2-10k to 10k-2.
    '*' marks M-points and extremal (M-2)-points, 'o' the (0,8) point,
    '.' every other allowed point.
    """
    points = allowed_points(k)
    extremals = set(extremal_types(k))
    extremal_pts = {diagram_point(t) for t in extremals}
    chis = list(range(2 - 10 * k, 10 * k - 1, 2))
    lines = [f"allowed (chi, h*) points for k = {k}"]
    header = " " * 7 + "".join("|" if c == 0 else " " for c in chis)
    lines.append(header)
    for h_star in range(12 * k, 3, -2):
        row = []
        for chi in chis:
            pt = DiagramPoint(chi, h_star)
            if pt not in points:
                row.append(" ")
            elif (chi, h_star) == (0, 8):
                row.append("o")
            elif pt in extremal_pts:
                row.append("*")
            else:
                row.append(".")
        lines.append(f"h*={h_star:>3} " + "".join(row))
    lines.append(f"chi from {2 - 10 * k} to {10 * k - 2} in steps of 2; '|' marks chi=0")
    return "\n".join(lines)
