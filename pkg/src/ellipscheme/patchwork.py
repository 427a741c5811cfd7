"""Combinatorial patchworking of trigonal curves.

The Newton triangle of a trigonal curve on the Hirzebruch surface of degree
2k is T = conv{(0,0), (6k,0), (0,3)}.  A triangulation of T with integer
vertices, a sign at each vertex, and a convex lifting determine:

* a piecewise-linear curve in the quadrangle Q = conv{(+-6k,0), (0,+-3)},
  read off the symmetrized triangulation by the midpoint rule; and
* a one-parameter family of honest polynomials (T-polynomials) realizing the
  same curve for all sufficiently small t > 0.

This module builds both, classifies the PL curve into a real scheme, and
cross-checks the combinatorial answer against the exact discriminant
analysis of the emitted polynomial.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from . import exactpoly, trigonal
from .errors import (
    CertificationFailed,
    NoStabilization,
    NotIsolated,
    NotRefinementShaped,
    OutOfRange,
    UnclassifiableOval,
)
from .exactpoly import UniPoly
from .trigonal import BivariatePoly, RealScheme, TrigonalCurve

Vertex = tuple[int, int]
Triangle = tuple[Vertex, Vertex, Vertex]
Point = tuple[Fraction, Fraction]
Segment = tuple[Point, Point]

ORACLE_MAX_HALVINGS = 40
LIFTING_MAX_SHRINKS = 64


def _tri(a: Vertex, b: Vertex, c: Vertex) -> Triangle:
    return tuple(sorted((a, b, c)))  # type: ignore[return-value]


def _doubled_area(a: Vertex, b: Vertex, c: Vertex) -> int:
    return abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))


def _orient(a, b, c):
    """Twice the signed area; works for integer or rational points."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])


def point_in_triangle(p, tri: Sequence, strict: bool) -> bool:
    a, b, c = tri
    d1, d2, d3 = _orient(a, b, p), _orient(b, c, p), _orient(c, a, p)
    if _orient(a, b, c) < 0:
        d1, d2, d3 = -d1, -d2, -d3
    if strict:
        return d1 > 0 and d2 > 0 and d3 > 0
    return d1 >= 0 and d2 >= 0 and d3 >= 0


@dataclass(frozen=True)
class LatticeTriangulation:
    """Triangulation of the Newton triangle T with integer vertices."""

    k: int
    vertices: frozenset[Vertex]
    triangles: tuple[Triangle, ...]

    @classmethod
    def build(cls, k: int, triangles: Iterable[Triangle]) -> "LatticeTriangulation":
        tris = tuple(sorted(_tri(*t) for t in triangles))
        verts = frozenset(v for t in tris for v in t)
        return cls(k, verts, tris)

    def corners(self) -> tuple[Vertex, Vertex, Vertex]:
        return ((0, 0), (6 * self.k, 0), (0, 3))


# A refinement step: either a 1->3 split of a triangle at an interior point
# (parent is the triangle) or a 2->4 / 1->2 split of an edge at a point in
# its interior (parent is the sorted edge pair)
Refinement = tuple[tuple[Vertex, ...], Vertex]


def _point_in_segment(p: Vertex, a: Vertex, b: Vertex) -> bool:
    if _orient(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
        and p != a
        and p != b
    )


def apply_refinement(
    state: list[Triangle], parent: tuple[Vertex, ...], v: Vertex
) -> None:
    """Split triangles of ``state`` in place at ``v``; raises
    NotRefinementShaped if the step does not fit the current state."""
    if len(parent) == 3:
        t = _tri(*parent)
        if t not in state:
            raise NotRefinementShaped(f"refinement parent {parent} not present")
        if not point_in_triangle(v, t, strict=True):
            raise NotRefinementShaped(f"refinement vertex {v} not interior to {parent}")
        state.remove(t)
        state.extend(
            _tri(a, b, v) for a, b in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2]))
        )
        return
    if len(parent) != 2:
        raise NotRefinementShaped(f"refinement parent {parent} has bad arity")
    a, b = parent
    if not _point_in_segment(v, a, b):
        raise NotRefinementShaped(f"refinement vertex {v} not interior to edge {parent}")
    adjacent = [t for t in state if a in t and b in t]
    if not adjacent:
        raise NotRefinementShaped(f"refinement edge {parent} not present")
    for t in adjacent:
        far = next(w for w in t if w != a and w != b)
        state.remove(t)
        state.extend((_tri(a, v, far), _tri(v, b, far)))


@dataclass(frozen=True)
class Piece:
    """One slot of the standard subdivision of T used by the curve families:
    a corner triangle, a wide triangle with four interior vertices ("T"), a
    narrow one with two ("t"), or the modified wide triangle ("m2")."""

    label: str
    ell: int
    eps: int | None
    corners: Triangle


@dataclass(frozen=True)
class Construction:
    """A complete patchwork input: triangulation, signs, refinement history,
    and the piece layout it was assembled from (when known)."""

    tri: LatticeTriangulation
    signs: dict[Vertex, int]
    history: tuple[Refinement, ...]
    pieces: tuple[Piece, ...] = ()
    # template fixtures the pieces were stamped from, keyed by piece kind
    # ("+", "-", "m2", "t"); used by collapse_ovals to look up sign-pattern
    # variants with fewer ovals
    piece_sources: dict[str, PieceFixture] = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.tri.k

    def with_sign_flipped(self, v: Vertex) -> "Construction":
        signs = dict(self.signs)
        signs[v] = -signs[v]
        return replace(self, signs=signs)


def validate(tri: LatticeTriangulation) -> list[str]:
    """Structural checks; returns a list of violations (empty means ok)."""
    k = tri.k
    out: list[str] = []
    corner_set = set(tri.corners())
    if not corner_set <= tri.vertices:
        out.append("missing corner vertex")
    for v in tri.vertices:
        if not point_in_triangle(v, ((0, 0), (6 * k, 0), (0, 3)), strict=False):
            out.append(f"vertex outside: {v}")
    total = 0
    for t in tri.triangles:
        area2 = _doubled_area(*t)
        if area2 == 0:
            out.append(f"degenerate triangle: {t}")
        total += area2
    if total != 18 * k:
        out.append(f"area sum {Fraction(total, 2)} != {9 * k}")
    # no vertex strictly inside another triangle or in the interior of an edge
    for t in tri.triangles:
        for v in tri.vertices:
            if v in t:
                continue
            if point_in_triangle(v, t, strict=True):
                out.append(f"improper intersection: vertex {v} inside {t}")
            else:
                for a, b in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])):
                    if _orient(a, b, v) == 0 and min(a[0], b[0]) <= v[0] <= max(
                        a[0], b[0]
                    ) and min(a[1], b[1]) <= v[1] <= max(a[1], b[1]):
                        out.append(f"improper intersection: vertex {v} on edge {(a, b)} of {t}")
    # interior edges shared by exactly two triangles, boundary edges by one
    edge_count: dict[tuple[Vertex, Vertex], int] = {}
    for t in tri.triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])):
            e = (a, b) if a <= b else (b, a)
            edge_count[e] = edge_count.get(e, 0) + 1
    for (a, b), n in edge_count.items():
        on_boundary = _edge_on_T_boundary(a, b, k)
        if on_boundary and n != 1:
            out.append(f"boundary edge {(a, b)} shared by {n} triangles")
        if not on_boundary and n != 2:
            out.append(f"interior edge {(a, b)} shared by {n} triangles")
    return out


def _edge_on_T_boundary(a: Vertex, b: Vertex, k: int) -> bool:
    if a[1] == b[1] == 0:
        return True
    if a[0] == b[0] == 0:
        return True
    # hypotenuse x/6k + y/3 = 1
    return all(p[0] + 2 * k * p[1] == 6 * k for p in (a, b))


def fan_triangulation(k: int, bottom: Sequence[int]) -> LatticeTriangulation:
    """Fan from the apex (0,3) over consecutive bottom-edge vertices."""
    assert bottom[0] == 0 and bottom[-1] == 6 * k
    apex = (0, 3)
    tris = [_tri((x0, 0), (x1, 0), apex) for x0, x1 in zip(bottom, bottom[1:])]
    return LatticeTriangulation.build(k, tris)


# -- convex lifting ---------------------------------------------------------


def _plane_value(t: Triangle, values: dict[Vertex, Fraction], p) -> Fraction:
    """Value at p of the affine function through the three lifted vertices."""
    z1, z2, z3 = values[t[0]], values[t[1]], values[t[2]]
    det = _orient(t[0], t[1], t[2])
    # barycentric coordinates of p
    l1 = Fraction(_orient(t[1], t[2], p), det)
    l2 = Fraction(_orient(t[2], t[0], p), det)
    l3 = Fraction(_orient(t[0], t[1], p), det)
    return l1 * z1 + l2 * z2 + l3 * z3


def certify_convexity(
    triangles: Sequence[Triangle], values: dict[Vertex, Fraction]
) -> list[str]:
    """Exact edge-by-edge strict convexity check of a lifted triangulation."""
    by_edge: dict[tuple[Vertex, Vertex], list[Triangle]] = {}
    for t in triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])):
            e = (a, b) if a <= b else (b, a)
            by_edge.setdefault(e, []).append(t)
    out = []
    for e, ts in by_edge.items():
        if len(ts) != 2:
            continue
        t1, t2 = ts
        far = next(v for v in t2 if v not in e)
        if values[far] <= _plane_value(t1, values, far):
            out.append(f"flat or concave crease across {e}")
    return out


def build_lifting(
    tri: LatticeTriangulation, history: Sequence[Refinement]
) -> dict[Vertex, Fraction]:
    """Convex lifting for a triangulation obtained from a fan by interior
    1->3 refinements and edge 2->4 splits.

    The fan is lifted by i^2 on the bottom edge and 0 at the apex, which is
    strictly convex on any fan.  The refinement vertices then receive small
    integer values chosen by exact search to maximize the minimal crease
    defect of the lifted surface.  Large defects matter beyond mere
    convexity: the emitted T-polynomials stabilize at t roughly exponential
    in the inverse of the smallest defect, so near-flat creases would make
    the polynomial cross-check intractable.
    """
    refined = []
    seen_refined = set()
    for _, v in history:
        if v not in seen_refined:
            seen_refined.add(v)
            refined.append(v)
    fan_vertices = tri.vertices - seen_refined
    apex = (0, 3)
    if apex not in fan_vertices or any(
        v[1] != 0 and v != apex for v in fan_vertices
    ):
        raise NotRefinementShaped("base vertices must lie on the bottom edge or apex")
    bottom = sorted(v[0] for v in fan_vertices if v[1] == 0)
    current = list(fan_triangulation(tri.k, bottom).triangles)
    # replay the history to validate the refinement shape
    for parent, v in history:
        apply_refinement(current, parent, v)
    if sorted(current) != sorted(tri.triangles):
        raise NotRefinementShaped("history does not reproduce the triangulation")
    base: dict[Vertex, Fraction] = {apex: Fraction(0)}
    for x in bottom:
        base[(x, 0)] = Fraction(x * x)
    values = _search_values(tri, base, refined)
    if values is None:
        raise CertificationFailed("no lifting with positive crease defects")
    problems = certify_convexity(list(tri.triangles), values)
    if problems:
        raise CertificationFailed("; ".join(problems))
    return values


def _search_values(
    tri: LatticeTriangulation,
    base: dict[Vertex, Fraction],
    refined: Sequence[Vertex],
) -> dict[Vertex, Fraction] | None:
    """Heights at the refinement vertices certified strictly convex.

    An exact-rational linear program maximizes the minimal crease defect
    subject to staying below the fan surface; the optimum is then snapped to
    the coarsest dyadic grid that keeps the certificate.  Large defects
    matter beyond mere convexity: the emitted T-polynomials stabilize at t
    roughly exponential in the inverse of the smallest defect, and coarse
    grid values keep the integer exponents small after scaling.
    """
    if not refined:
        values = dict(base)
        if certify_convexity(list(tri.triangles), values):
            return None
        return {v: values[v] for v in tri.vertices}
    creases = []
    by_edge: dict[tuple[Vertex, Vertex], list[Triangle]] = {}
    for t in tri.triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])):
            e = (a, b) if a <= b else (b, a)
            by_edge.setdefault(e, []).append(t)
    for e, ts in by_edge.items():
        if len(ts) == 2:
            t1, t2 = ts
            far = next(v for v in t2 if v not in e)
            creases.append((t1, far))

    # candidate ceilings: below every fan plane covering the vertex
    ceilings: dict[Vertex, Fraction] = {}
    fan = fan_triangulation(tri.k, sorted(x for (x, j) in base if j == 0))
    for v in refined:
        cap = None
        for t in fan.triangles:
            if point_in_triangle(v, t, strict=False):
                pv = _plane_value(t, base, v)
                cap = pv if cap is None else min(cap, pv)
        ceilings[v] = cap

    # Each crease defect is affine in the heights.  With x_v = ceiling_v -
    # d_v the assignment d = 0 places every refined vertex on the fan
    # surface, where all defects are >= 0, so the slack basis is feasible.
    index = {v: i for i, v in enumerate(refined)}
    n = len(refined)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for t1, far in creases:
        coef = [Fraction(0)] * n
        const = Fraction(0)

        def add(v: Vertex, w: Fraction):
            nonlocal const
            if v in index:
                coef[index[v]] += w
            else:
                const += w * base[v]

        add(far, Fraction(1))
        det = _orient(t1[0], t1[1], t1[2])
        lams = (
            Fraction(_orient(t1[1], t1[2], far), det),
            Fraction(_orient(t1[2], t1[0], far), det),
            Fraction(_orient(t1[0], t1[1], far), det),
        )
        for tv, lam in zip(t1, lams):
            add(tv, -lam)
        at_ceiling = const + sum(
            c * ceilings[v] for v, c in zip(refined, coef)
        )
        if all(c == 0 for c in coef):
            if at_ceiling <= 0:
                return None
            continue
        # defect(d) = at_ceiling - coef . d >= s
        rows.append(coef + [Fraction(1)])
        rhs.append(at_ceiling)
    for i in range(n):
        box = [Fraction(0)] * (n + 1)
        box[i] = Fraction(1)
        rows.append(box)
        rhs.append(Fraction(60))
    objective = [Fraction(0)] * n + [Fraction(1)]
    solution = _simplex_max(rows, rhs, objective)
    if solution is None or solution[-1] <= 0:
        return None
    optimum = solution[-1]

    triangles = list(tri.triangles)

    # Snap to the coarsest dyadic grid that keeps a healthy defect: on each
    # grid a small branch-and-bound (exact LP relaxations for the bounds)
    # finds the lattice assignment maximizing the minimal defect.  Coarse
    # values keep the T-polynomial exponents small after scaling, which
    # dominates the cost of the polynomial cross-check.
    target = min(optimum / 2, Fraction(1, 8))
    fallback: tuple[Fraction, dict[Vertex, Fraction]] | None = None
    for m in range(8):
        grid = Fraction(1, 2**m)
        # values[v] = ceilings[v] - d[v] must land on the grid, so each d
        # variable is constrained to grid * Z + (ceilings[v] mod grid)
        offsets = [ceilings[v] % grid for v in refined]
        d_best, s_best = _grid_optimum(rows, rhs, n, grid, offsets)
        if d_best is None or s_best <= 0:
            continue
        values = dict(base)
        for v in refined:
            values[v] = ceilings[v] - d_best[index[v]]
        if certify_convexity(triangles, values):
            continue
        if s_best >= target:
            return {v: values[v] for v in tri.vertices}
        if fallback is None or s_best > fallback[0]:
            fallback = (s_best, {v: values[v] for v in tri.vertices})
    if fallback is not None:
        return fallback[1]
    values = dict(base)
    values.update({v: ceilings[v] - solution[index[v]] for v in refined})
    if not certify_convexity(triangles, values):
        return {v: values[v] for v in tri.vertices}
    return None


def _grid_optimum(
    rows: list[list[Fraction]],
    rhs: list[Fraction],
    n: int,
    grid: Fraction,
    offsets: Sequence[Fraction],
    node_budget: int = 200,
) -> tuple[list[Fraction] | None, Fraction]:
    """Maximize the last variable over assignments whose first n entries lie
    in offsets[i] + grid * Z, by branch-and-bound with exact LP
    relaxations."""
    best_d: list[Fraction] | None = None
    best_s = Fraction(0)
    budget = [node_budget]

    def rec(lo: list[Fraction], hi: list[Fraction]) -> None:
        nonlocal best_d, best_s
        if budget[0] <= 0:
            return
        budget[0] -= 1
        a = [row[:] for row in rows]
        b = list(rhs)
        for i in range(n):
            r = [Fraction(0)] * (n + 1)
            r[i] = Fraction(1)
            a.append(r)
            b.append(hi[i])
            r = [Fraction(0)] * (n + 1)
            r[i] = Fraction(-1)
            a.append(r)
            b.append(-lo[i])
        sol = _simplex_max(a, b, [Fraction(0)] * n + [Fraction(1)])
        if sol is None or sol[-1] <= best_s:
            return
        branch = next(
            (
                i
                for i in range(n)
                if ((sol[i] - offsets[i]) / grid).denominator != 1
            ),
            None,
        )
        if branch is None:
            best_d = sol[:n]
            best_s = sol[-1]
            return
        f = (
            ((sol[branch] - offsets[branch]) / grid).__floor__() * grid
            + offsets[branch]
        )
        floor_branch = (lo, hi[:branch] + [f] + hi[branch + 1 :])
        ceil_branch = (lo[:branch] + [f + grid] + lo[branch + 1 :], hi)
        order = (
            (floor_branch, ceil_branch)
            if sol[branch] - f <= grid / 2
            else (ceil_branch, floor_branch)
        )
        for blo, bhi in order:
            rec(blo, bhi)

    rec(list(offsets), [off + 60 for off in offsets])
    return best_d, best_s


def _simplex_max(
    rows: list[list[Fraction]],
    rhs: list[Fraction],
    objective: list[Fraction],
) -> list[Fraction] | None:
    """Maximize objective . y subject to rows . y <= rhs, y >= 0, by the
    two-phase simplex method with Bland's rule (termination guaranteed),
    entirely in exact rationals.  Returns None when infeasible; raises
    CertificationFailed when unbounded."""
    m = len(rows)
    n = len(objective)
    x0 = n  # single artificial variable for an infeasible slack basis
    width = n + 1 + m
    tableau = [
        rows[i][:]
        + [Fraction(-1)]
        + [Fraction(int(i == j)) for j in range(m)]
        + [rhs[i]]
        for i in range(m)
    ]
    basis = [n + 1 + i for i in range(m)]

    def pivot(row: int, col: int) -> None:
        piv = tableau[row][col]
        tableau[row] = [x / piv for x in tableau[row]]
        for i in range(len(tableau)):
            if i != row and tableau[i][col]:
                f = tableau[i][col]
                tableau[i] = [
                    x - f * y for x, y in zip(tableau[i], tableau[row])
                ]
        basis[row] = col

    def optimize(zrow: list[Fraction], skip: int | None) -> list[Fraction]:
        while True:
            enter = next(
                (j for j in range(width) if j != skip and zrow[j] < 0), None
            )
            if enter is None:
                return zrow
            leave = None
            best: Fraction | None = None
            for i in range(len(tableau)):
                aij = tableau[i][enter]
                if aij > 0:
                    ratio = tableau[i][-1] / aij
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and basis[i] < basis[leave])
                    ):
                        best = ratio
                        leave = i
            if leave is None:
                raise CertificationFailed("lifting linear program is unbounded")
            f = zrow[enter]
            pivot(leave, enter)
            if f:
                zrow = [
                    x - f * y for x, y in zip(zrow, tableau[leave])
                ]

    if any(b < 0 for b in rhs):
        worst = min(range(m), key=lambda i: tableau[i][-1])
        pivot(worst, x0)
        zrow = [Fraction(0)] * (width + 1)
        zrow[x0] = Fraction(1)
        row = basis.index(x0)
        zrow = [x - y for x, y in zip(zrow, tableau[row])]
        zrow = optimize(zrow, None)
        if x0 in basis:
            row = basis.index(x0)
            if tableau[row][-1] != 0:
                return None
            out_col = next(
                (
                    j
                    for j in range(width)
                    if j != x0 and tableau[row][j] != 0
                ),
                None,
            )
            if out_col is not None:
                pivot(row, out_col)
            else:
                del tableau[row]
                del basis[row]

    zrow = [-c for c in objective] + [Fraction(0)] * (m + 2)
    zrow = zrow[: width + 1]
    for i, b in enumerate(basis):
        if b < len(zrow) - 1 and zrow[b]:
            f = zrow[b]
            zrow = [x - f * y for x, y in zip(zrow, tableau[i])]
    zrow = optimize(zrow, x0)
    out = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            out[b] = tableau[i][-1]
    return out


# -- symmetrization and tracing --------------------------------------------


@dataclass(frozen=True)
class SymmetrizedPatchwork:
    """Triangulation of the quadrangle Q with the extended sign rule."""

    k: int
    triangles: tuple[Triangle, ...]
    signs: dict[Vertex, int]


def symmetrize(tri: LatticeTriangulation, signs: dict[Vertex, int]) -> SymmetrizedPatchwork:
    """Four symmetric copies with signs s(e1*i1, e2*i2) = e1^i1 e2^i2 s(i1, i2)."""
    out_tris: set[Triangle] = set()
    out_signs: dict[Vertex, int] = {}
    for e1 in (1, -1):
        for e2 in (1, -1):
            for t in tri.triangles:
                out_tris.add(_tri(*(((e1 * i, e2 * j)) for i, j in t)))
            for (i, j), s in signs.items():
                v = (e1 * i, e2 * j)
                sv = s * (e1**i) * (e2**j)
                if v in out_signs:
                    assert out_signs[v] == sv
                else:
                    out_signs[v] = sv
    return SymmetrizedPatchwork(tri.k, tuple(sorted(out_tris)), out_signs)


@dataclass(frozen=True)
class TracedSegment:
    a: Point
    b: Point
    triangle: Triangle


@dataclass(frozen=True)
class TracedComponent:
    segments: tuple[TracedSegment, ...]
    boundary_crossings: int

    @property
    def is_pseudo_line(self) -> bool:
        return self.boundary_crossings % 2 == 1


@dataclass(frozen=True)
class PatchworkCurve:
    sym: SymmetrizedPatchwork
    segments: tuple[TracedSegment, ...]
    components: tuple[TracedComponent, ...]


def _midpoint(a: Vertex, b: Vertex) -> Point:
    return (Fraction(a[0] + b[0], 2), Fraction(a[1] + b[1], 2))


def _on_Q_boundary(p: Point, k: int) -> bool:
    return abs(p[0]) + 2 * k * abs(p[1]) == 6 * k


def trace_curve(sym: SymmetrizedPatchwork) -> PatchworkCurve:
    """Midpoint-rule curve: one segment per mixed-sign triangle, joining the
    midpoints of its two mixed edges; chains assembled through shared
    midpoints and the left/right boundary identification (u, x) ~ (-u, x).
    """
    k = sym.k
    segments: list[TracedSegment] = []
    for t in sym.triangles:
        s = [sym.signs[v] for v in t]
        if s[0] == s[1] == s[2]:
            continue
        mids = []
        for i, j in ((0, 1), (1, 2), (0, 2)):
            if s[i] != s[j]:
                mids.append(_midpoint(t[i], t[j]))
        assert len(mids) == 2
        segments.append(TracedSegment(mids[0], mids[1], t))

    def canon(p: Point) -> Point:
        # glue the two halves of the boundary of Q through u -> -u
        if _on_Q_boundary(p, k):
            return min(p, (-p[0], p[1]))
        return p

    adjacency: dict[Point, list[int]] = {}
    for idx, seg in enumerate(segments):
        for p in (seg.a, seg.b):
            adjacency.setdefault(canon(p), []).append(idx)
    for node, incident in adjacency.items():
        assert len(incident) == 2, f"node {node} has degree {len(incident)}"

    seen: set[int] = set()
    components: list[TracedComponent] = []
    for start in range(len(segments)):
        if start in seen:
            continue
        comp = []
        crossings = 0
        idx = start
        node = canon(segments[start].a)
        while idx not in seen:
            seen.add(idx)
            comp.append(segments[idx])
            seg = segments[idx]
            ends = [canon(seg.a), canon(seg.b)]
            node = ends[1] if ends[0] == node else ends[0]
            if _on_Q_boundary_point_glued(node, k):
                crossings += 1
            nxt = [i for i in adjacency[node] if i != idx]
            assert len(nxt) == 1
            idx = nxt[0]
        components.append(TracedComponent(tuple(comp), crossings))
    return PatchworkCurve(sym, tuple(segments), tuple(components))


def _on_Q_boundary_point_glued(p: Point, k: int) -> bool:
    return _on_Q_boundary(p, k)


# -- classification ---------------------------------------------------------


@dataclass(frozen=True)
class OvalComponent:
    component: TracedComponent
    surrounded: tuple[Vertex, ...]
    sign: int

    @property
    def base_vertex(self) -> Vertex:
        if len(self.surrounded) != 1:
            raise NotIsolated(
                f"oval surrounds {len(self.surrounded)} vertices, not exactly one"
            )
        i, j = self.surrounded[0]
        return (abs(i), abs(j))


@dataclass(frozen=True)
class PatchworkClassification:
    scheme: RealScheme
    pseudo_lines: int
    ovals: tuple[OvalComponent, ...]
    plus_count: int
    minus_count: int


def _component_polygon(comp: TracedComponent) -> list[Point]:
    """Ordered vertex cycle of a closed component that avoids the boundary."""
    pts: list[Point] = [comp.segments[0].a, comp.segments[0].b]
    remaining = list(comp.segments[1:])
    while remaining:
        for i, seg in enumerate(remaining):
            if seg.a == pts[-1]:
                pts.append(seg.b)
                break
            if seg.b == pts[-1]:
                pts.append(seg.a)
                break
        else:
            raise AssertionError("component is not a single closed chain")
        remaining.pop(i)
    assert pts[0] == pts[-1]
    return pts[:-1]


def _point_in_polygon(p: Vertex, poly: Sequence[Point]) -> bool:
    """Even-odd rule with exact rational arithmetic; p must not lie on the
    polygon (guaranteed here: traced segments avoid lattice vertices)."""
    px, py = Fraction(p[0]), Fraction(p[1])
    inside = False
    n = len(poly)
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            assert xint != px, "query point on polygon edge"
            if px < xint:
                inside = not inside
    return inside


def classify_components(curve: PatchworkCurve) -> PatchworkClassification:
    """Read the real scheme off the traced curve.

    Components crossing the left/right identification an odd number of times
    are pseudo-lines; the rest are ovals, grouped by the sign of the
    vertices they surround.
    """
    pseudo = [c for c in curve.components if c.is_pseudo_line]
    others = [c for c in curve.components if not c.is_pseudo_line]
    if len(pseudo) == 3 and not others:
        return PatchworkClassification(RealScheme.pseudo_lines(), 3, (), 0, 0)
    if len(pseudo) != 1:
        raise UnclassifiableOval(
            f"{len(pseudo)} pseudo-lines with {len(others)} other components; "
            "expected one pseudo-line, or exactly three and nothing else"
        )
    ovals = []
    polygons = []
    for comp in others:
        if comp.boundary_crossings != 0:
            raise UnclassifiableOval(
                "closed component touches the boundary identification"
            )
        poly = _component_polygon(comp)
        for other in polygons:
            if _point_in_polygon(poly[0], other) or _point_in_polygon(other[0], poly):
                raise UnclassifiableOval("nested ovals")
        polygons.append(poly)
        inside = tuple(
            v
            for v in curve.sym.signs
            if _point_in_polygon(v, poly)
        )
        if not inside:
            raise UnclassifiableOval("oval surrounds no vertex")
        signs = {curve.sym.signs[v] for v in inside}
        if len(signs) != 1:
            raise UnclassifiableOval(f"oval surrounds vertices of both signs: {inside}")
        ovals.append(OvalComponent(comp, inside, signs.pop()))
    plus = sum(1 for o in ovals if o.sign > 0)
    minus = sum(1 for o in ovals if o.sign < 0)
    return PatchworkClassification(
        RealScheme.ovals(plus, minus), 1, tuple(ovals), plus, minus
    )


def classify_construction(con: Construction) -> PatchworkClassification:
    return classify_components(trace_curve(symmetrize(con.tri, con.signs)))


def oval_piece(oval: OvalComponent, pieces: Sequence[Piece]) -> Piece | None:
    """The piece whose four symmetric copies contain all segments of the oval."""
    for piece in pieces:
        copies = [
            tuple((e1 * i, e2 * j) for i, j in piece.corners)
            for e1 in (1, -1)
            for e2 in (1, -1)
        ]
        ok = all(
            any(
                all(point_in_triangle(p, c, strict=False) for p in (seg.a, seg.b))
                for c in copies
            )
            for seg in oval.component.segments
        )
        if ok:
            return piece
    return None


# -- collapsing -------------------------------------------------------------


def _piece_kind(piece: Piece) -> str:
    if piece.label == "T":
        return "+" if piece.eps is not None and piece.eps > 0 else "-"
    return piece.label


def collapse_ovals(
    con: Construction, targets: Iterable[OvalComponent]
) -> Construction:
    """Remove the target ovals, leaving every other oval's count and sign in
    place.

    Each target must surround exactly one vertex (NotIsolated otherwise).
    The removal replaces each affected piece (triangulation, signs and
    refinement history) with the frozen variant keeping exactly the
    remaining ovals, each at its original base vertex and sign; variants
    agree with the original piece on its corners, so no other piece is
    touched.  Because oval identities survive, collapses of disjoint
    targets compose and commute.  OutOfRange is raised when no frozen
    variant realizes the requested remainder (narrow-piece ovals, and the
    one wide-piece remainder no sign pattern realizes).  The caller re-runs
    classification to confirm the scheme dropped exactly those ovals.
    """
    targets = list(targets)
    for oval in targets:
        oval.base_vertex  # raises NotIsolated unless exactly one vertex
    if not targets:
        return con

    cls = classify_construction(con)

    def key(o: OvalComponent):
        return tuple(sorted(o.surrounded))

    current = {key(o): o for o in cls.ovals}
    removed_keys = set()
    for t in targets:
        if key(t) not in current:
            raise OutOfRange(f"target oval not present: {t.surrounded}")
        removed_keys.add(key(t))

    groups: dict[Piece, list[OvalComponent]] = {}
    for o in cls.ovals:
        piece = oval_piece(o, con.pieces)
        if piece is None:
            raise OutOfRange(f"oval not contained in any piece: {o.surrounded}")
        groups.setdefault(piece, []).append(o)

    new_triangles = list(con.tri.triangles)
    new_history = list(con.history)
    new_signs = dict(con.signs)
    for piece, ovals in groups.items():
        remaining = [o for o in ovals if key(o) not in removed_keys]
        if len(remaining) == len(ovals):
            continue
        shift = piece.ell if piece.label != "t" else piece.ell - 1

        def template_base(o: OvalComponent) -> Vertex:
            i, j = o.base_vertex
            return (i - 2 * shift * (3 - j), j)

        left = tuple(sorted((template_base(o), o.sign) for o in remaining))
        source = con.piece_sources.get(_piece_kind(piece))
        if source is None or left not in source.variants:
            raise OutOfRange(
                f"no variant keeping ovals {left} for piece "
                f"{piece.label} at ell={piece.ell}"
            )
        sheared = _shear(source.variants[left], shift)
        corners = set(piece.corners)
        assert set(sheared.corners) == corners, "variant moves piece corners"
        inside = [
            t
            for t in new_triangles
            if all(point_in_triangle(v, piece.corners, strict=False) for v in t)
        ]
        dropped = {v for t in inside for v in t} - corners
        for t in inside:
            new_triangles.remove(t)
        new_triangles.extend(sheared.triangles)
        new_history = [s for s in new_history if s[1] not in dropped]
        new_history.extend(sheared.history)
        for v in dropped:
            del new_signs[v]
        for v, sg in sheared.signs.items():
            if v in corners:
                assert new_signs[v] == sg, "variant changes piece boundary"
            new_signs[v] = sg
    return replace(
        con,
        tri=LatticeTriangulation.build(con.k, new_triangles),
        signs=new_signs,
        history=tuple(new_history),
    )


def collapse_to(con: Construction, a_target: int, b_target: int) -> Construction:
    """Collapse ovals (chosen deterministically) down to the labeled scheme
    (a_target, b_target).

    Within each piece, ovals are taken in template-coordinate order, which
    always leaves a remainder some frozen variant realizes; narrow-piece
    ovals are taken last (removing one raises OutOfRange).
    """
    cls = classify_construction(con)
    if a_target > cls.plus_count or b_target > cls.minus_count or min(a_target, b_target) < 0:
        raise OutOfRange(
            f"cannot collapse <{cls.plus_count}|{cls.minus_count}> "
            f"to <{a_target}|{b_target}>"
        )

    def key(o: OvalComponent):
        piece = oval_piece(o, con.pieces)
        if piece is None:
            return (2, 0, o.base_vertex)
        shift = piece.ell if piece.label != "t" else piece.ell - 1
        i, j = o.base_vertex
        return (piece.label == "t", piece.ell, (i - 2 * shift * (3 - j), j))

    plus = sorted((o for o in cls.ovals if o.sign > 0), key=key)
    minus = sorted((o for o in cls.ovals if o.sign < 0), key=key)
    targets = plus[: cls.plus_count - a_target] + minus[: cls.minus_count - b_target]
    return collapse_ovals(con, targets)


# -- T-polynomial emission ---------------------------------------------------


@dataclass(frozen=True)
class TPolynomialRequest:
    tri: LatticeTriangulation
    signs: dict[Vertex, int]
    lifting: dict[Vertex, Fraction]
    t: Fraction


def emit_T_polynomial(req: TPolynomialRequest) -> BivariatePoly:
    """The polynomial sum of s(v) * t^nu(v) * u^i1 * x^i2 over the vertices.

    The lifting is first scaled by the lcm of its denominators; scaling a
    convex function by a positive constant keeps it convex, and integer
    exponents keep the coefficients rational.
    """
    t = Fraction(req.t)
    assert t > 0
    denoms = [req.lifting[v].denominator for v in req.tri.vertices]
    scale = 1
    for d in denoms:
        scale = scale * d // math.gcd(scale, d)
    terms: dict[tuple[int, int], Fraction] = {}
    for v in req.tri.vertices:
        nu = req.lifting[v] * scale
        assert nu.denominator == 1
        terms[v] = req.signs[v] * t ** int(nu)
    return BivariatePoly(terms)


@dataclass(frozen=True)
class OracleReport:
    ok: bool
    scheme: RealScheme
    combinatorial: RealScheme
    stabilized_at: Fraction
    schemes_seen: tuple[tuple[Fraction, str], ...]


def patchwork_oracle(con: Construction) -> OracleReport:
    """Cross-check: the combinatorial scheme must match the exact
    discriminant-based scheme of the depressed T-polynomial for all small t.

    Tries t = 1/2, 1/4, ...; succeeds when three consecutive values are
    generic with the same scheme, equal to the combinatorial answer.
    """
    combinatorial = classify_construction(con).scheme
    lifting = build_lifting(con.tri, con.history)
    seen: list[tuple[Fraction, str]] = []
    streak: list[RealScheme] = []
    for m in range(1, ORACLE_MAX_HALVINGS + 1):
        t = Fraction(1, 2**m)
        poly = emit_T_polynomial(TPolynomialRequest(con.tri, con.signs, lifting, t))
        try:
            curve = trigonal.depress(poly, con.k)
            analysis = trigonal.analyze(curve)
        except trigonal.NonGeneric:
            seen.append((t, "non-generic"))
            streak = []
            continue
        scheme = analysis.scheme
        seen.append((t, scheme.format()))
        if streak and streak[-1] != scheme:
            streak = []
        streak.append(scheme)
        if len(streak) >= 3:
            ok = scheme == combinatorial
            return OracleReport(ok, scheme, combinatorial, t, tuple(seen))
    raise NoStabilization(
        f"no three consecutive agreeing generic schemes in {ORACLE_MAX_HALVINGS} "
        f"halvings; saw {seen}"
    )


# -- fixture-backed curve families ------------------------------------------


# remaining ovals of a piece: sorted ((i, j), sign) pairs in template
# coordinates
VariantKey = tuple[tuple[Vertex, int], ...]


@dataclass(frozen=True)
class PieceFixture:
    """Triangulation, signs and refinement history of one piece, in the
    template coordinates (ell = 0 for wide pieces, ell = 1 for narrow)."""

    corners: Triangle
    triangles: tuple[Triangle, ...]
    signs: dict[Vertex, int]
    history: tuple[Refinement, ...]
    # alternative piece contents (own triangulation, signs and refinement
    # history), keyed by the sorted (base vertex, sign) pairs of the ovals
    # that variant contributes; variants agree with `signs` on the piece
    # corners so they can replace the piece inside an assembled construction
    # without touching the neighbouring pieces, and they keep every
    # remaining oval at its original base vertex so that collapses compose
    variants: dict[VariantKey, "PieceFixture"] = field(default_factory=dict)


def _fixture_text(name: str) -> str:
    override = os.environ.get("ELLIPSCHEME_FIXTURE_DIR")
    if override:
        path = os.path.join(override, name)
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    return (resources.files("ellipscheme") / "fixtures" / name).read_text()


def _parse_block(
    block: Sequence[str],
) -> tuple[list[Vertex], dict[Vertex, int], list[Triangle], list[Refinement]]:
    vertices: list[Vertex] = []
    signs: dict[Vertex, int] = {}
    triangles: list[Triangle] = []
    history: list[Refinement] = []
    sign_token = {"+": 1, "-": -1, "+1": 1, "-1": -1}
    section = None
    for line in block:
        if line in ("vertices", "triangles", "refinements"):
            section = line
            continue
        parts = line.split()
        if section == "vertices":
            i, j = int(parts[0]), int(parts[1])
            vertices.append((i, j))
            signs[(i, j)] = sign_token[parts[2]]
        elif section == "triangles":
            a, b, c = (vertices[int(x)] for x in parts)
            triangles.append(_tri(a, b, c))
        elif section == "refinements":
            *par, d = (vertices[int(x)] for x in parts)
            if len(par) == 3:
                history.append((_tri(*par), d))
            elif len(par) == 2:
                history.append((tuple(sorted(par)), d))
            else:
                raise ValueError(f"refinement line has wrong arity: {line!r}")
        else:
            raise ValueError(f"line outside any section: {line!r}")
    return vertices, signs, triangles, history


def parse_fixture(text: str) -> PieceFixture:
    """Main block followed by zero or more `variant` blocks; each variant
    header lists the (i, j, sign) triples of the ovals that pattern keeps,
    and each variant carries its own triangulation and refinements."""
    sign_token = {"+": 1, "-": -1, "+1": 1, "-1": -1}
    blocks: list[tuple[str | None, list[str]]] = [(None, [])]
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.split()[0] == "variant":
            blocks.append((line, []))
        else:
            blocks[-1][1].append(line)
    _, main_lines = blocks[0]
    vertices, signs, triangles, history = _parse_block(main_lines)
    variants: dict[VariantKey, PieceFixture] = {}
    for header, block in blocks[1:]:
        parts = header.split()
        r = int(parts[1])
        if len(parts) != 2 + 3 * r:
            raise ValueError(f"variant header has wrong token count: {header!r}")
        key = tuple(
            sorted(
                (
                    (int(parts[2 + 3 * i]), int(parts[3 + 3 * i])),
                    sign_token[parts[4 + 3 * i]],
                )
                for i in range(r)
            )
        )
        v_verts, v_signs, v_tris, v_hist = _parse_block(block)
        variants[key] = PieceFixture(
            _tri(*_hull_corners(v_verts)),
            tuple(sorted(v_tris)),
            v_signs,
            tuple(v_hist),
        )
    return PieceFixture(
        _tri(*_hull_corners(vertices)),
        tuple(sorted(triangles)),
        signs,
        tuple(history),
        variants,
    )


def _format_block(fix: PieceFixture) -> list[str]:
    vertices = sorted(fix.signs)
    index = {v: i for i, v in enumerate(vertices)}
    lines = ["vertices"]
    for v in vertices:
        lines.append(f"{v[0]} {v[1]} {'+1' if fix.signs[v] > 0 else '-1'}")
    lines.append("triangles")
    for t in fix.triangles:
        lines.append(" ".join(str(index[v]) for v in t))
    if fix.history:
        lines.append("refinements")
        for parent, v in fix.history:
            lines.append(" ".join(str(index[w]) for w in parent) + f" {index[v]}")
    return lines


def format_fixture(fix: PieceFixture) -> str:
    lines = _format_block(fix)
    for key in sorted(fix.variants):
        toks = ["variant", str(len(key))]
        for b, sg in key:
            toks += [str(b[0]), str(b[1]), "+1" if sg > 0 else "-1"]
        lines.append(" ".join(toks))
        lines.extend(_format_block(fix.variants[key]))
    return "\n".join(lines) + "\n"


def _hull_corners(vertices: Sequence[Vertex]) -> tuple[Vertex, Vertex, Vertex]:
    apex = max(vertices, key=lambda v: v[1])
    bottom = [v for v in vertices if v[1] == 0]
    return (min(bottom), max(bottom), apex)


def _shear(fix: PieceFixture, shift_units: int) -> PieceFixture:
    """Move a piece template along the bottom edge: the lattice shear
    (i, j) -> (i + s*(3 - j), j) with s = 2*shift_units keeps the apex fixed
    and preserves parities, so the sign rule behaves identically."""
    s = 2 * shift_units

    def mv(v: Vertex) -> Vertex:
        return (v[0] + s * (3 - v[1]), v[1])

    return PieceFixture(
        _tri(*(mv(v) for v in fix.corners)),
        tuple(sorted(_tri(*(mv(v) for v in t)) for t in fix.triangles)),
        {mv(v): sg for v, sg in fix.signs.items()},
        tuple(
            (
                _tri(*(mv(v) for v in parent))
                if len(parent) == 3
                else tuple(sorted(mv(v) for v in parent)),
                mv(v),
            )
            for parent, v in fix.history
        ),
        {
            tuple(sorted((mv(b), sg) for b, sg in key)): _shear(var, shift_units)
            for key, var in fix.variants.items()
        },
    )


def _load_piece(name: str) -> PieceFixture:
    return parse_fixture(_fixture_text(name))


def mcurve_family(k: int, lam: int) -> Construction:
    """The patchwork realizing the maximal-curve scheme <k-1+4l | 5k-1-4l>.

    The Newton triangle splits into two corner triangles, k wide pieces and
    k-1 narrow pieces; the wide pieces carry the sign parameter eps = +1 for
    lam of them and -1 for the rest.
    """
    if not 0 <= lam <= k:
        raise OutOfRange(f"lambda must be in [0, {k}]")
    return _assemble(k, ["+" if i < lam else "-" for i in range(k)])


def m2curve_family(k: int, lam: int) -> Construction:
    """The (M-2) variant: one eps = -1 wide piece is replaced by the modified
    fixture, trading three ovals of one group for one of the other; the
    scheme becomes <k+4l | 5k-4-4l>."""
    if not 0 <= lam <= k - 1:
        raise OutOfRange(f"lambda must be in [0, {k - 1}]")
    kinds = ["+" if i < lam else "-" for i in range(k)]
    kinds[lam] = "m2"  # first eps = -1 piece
    return _assemble(k, kinds)


def _assemble(k: int, wide_kinds: Sequence[str]) -> Construction:
    piece_files = {
        kind: _load_piece(FIXTURE_FILES[kind])
        for kind in set(wide_kinds)
    }
    narrow = _load_piece(FIXTURE_FILES["t"]) if k > 1 else None
    return assemble_from_pieces(k, wide_kinds, piece_files, narrow)


FIXTURE_FILES = {
    "+": "piece_wide_plus.txt",
    "-": "piece_wide_minus.txt",
    "m2": "piece_wide_m2.txt",
    "t": "piece_narrow.txt",
}


def assemble_from_pieces(
    k: int,
    wide_kinds: Sequence[str],
    piece_files: dict[str, PieceFixture],
    narrow: PieceFixture | None,
) -> Construction:
    """Assemble a construction from per-piece fixtures given in template
    coordinates (wide pieces at ell = 0, the narrow piece at ell = 1)."""
    apex = (0, 3)
    triangles: list[Triangle] = []
    signs: dict[Vertex, int] = {(0, 0): -1, (6 * k, 0): -1}
    history: list[Refinement] = []
    pieces: list[Piece] = [
        Piece("corner", -1, None, _tri((0, 0), (1, 0), apex)),
        Piece("corner", k, None, _tri((6 * k - 1, 0), (6 * k, 0), apex)),
    ]
    triangles.append(_tri((0, 0), (1, 0), apex))
    triangles.append(_tri((6 * k - 1, 0), (6 * k, 0), apex))

    def merge(fix: PieceFixture, piece: Piece):
        triangles.extend(fix.triangles)
        history.extend(fix.history)
        for v, s in fix.signs.items():
            if v in signs:
                assert signs[v] == s, f"sign clash at {v}"
            else:
                signs[v] = s
        pieces.append(piece)

    for ell, kind in enumerate(wide_kinds):
        fix = _shear(piece_files[kind], ell)
        eps = 1 if kind == "+" else -1
        merge(fix, Piece("m2" if kind == "m2" else "T", ell, eps, fix.corners))
    for ell in range(1, k):
        fix = _shear(narrow, ell - 1)
        merge(fix, Piece("t", ell, None, fix.corners))
    tri = LatticeTriangulation.build(k, triangles)
    sources = dict(piece_files)
    if narrow is not None:
        sources["t"] = narrow
    return Construction(tri, signs, tuple(history), tuple(pieces), sources)


# -- construction file I/O ---------------------------------------------------


def format_construction(con: Construction) -> str:
    vertices = sorted(con.signs)
    index = {v: i for i, v in enumerate(vertices)}
    lines = [f"k {con.k}", "vertices"]
    for v in vertices:
        lines.append(f"{v[0]} {v[1]} {'+1' if con.signs[v] > 0 else '-1'}")
    lines.append("triangles")
    for t in con.tri.triangles:
        lines.append(" ".join(str(index[v]) for v in t))
    if con.history:
        lines.append("refinements")
        for parent, v in con.history:
            lines.append(" ".join(str(index[w]) for w in parent) + f" {index[v]}")
    return "\n".join(lines) + "\n"


def parse_construction(text: str) -> Construction:
    k = None
    body_lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line.startswith("k "):
            k = int(line.split()[1])
        else:
            body_lines.append(raw)
    if k is None:
        raise ValueError("construction file is missing the 'k' line")
    fix = parse_fixture("\n".join(body_lines))
    tri = LatticeTriangulation.build(k, fix.triangles)
    return Construction(tri, fix.signs, fix.history)
