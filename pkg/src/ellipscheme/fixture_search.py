"""Bounded deterministic search for the patchwork piece fixtures.

The curve families are assembled from four piece fixtures: a wide piece in
each sign (four ovals of that sign), a narrow piece (one oval of each sign)
and a modified wide piece (one oval of each sign instead of four of one).
This module enumerates the refinement-shaped triangulations of each piece
template together with all sign assignments, keeps the candidates whose
assembled patchworks classify to the expected schemes with individually
collapsible ovals, cross-checks the survivors with the polynomial oracle,
and freezes the lexicographically first solution.  Alongside each piece's
main pattern it freezes one variant per realizable subset of the main
pattern's ovals — a complete piece content (triangulation, signs and
refinement history, possibly on a different skeleton) contributing exactly
those ovals at their original base vertices; collapse_ovals swaps those in
to remove ovals without disturbing the rest of the construction.  Two
documented gaps: the narrow piece's oval pair is structural (present under
every sign assignment), so it carries no variants and its ovals are not
collapsible; and no sign pattern on any skeleton keeps exactly the three
bottom-row ovals of a wide piece, so removing that piece's (1, 2) oval
alone raises OutOfRange.

Run as a script to regenerate src/ellipscheme/fixtures/*.txt.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import patchwork
from .errors import NoStabilization, UnclassifiableOval
from .patchwork import (
    Construction,
    PieceFixture,
    Triangle,
    Vertex,
    _tri,
    assemble_from_pieces,
    classify_construction,
    collapse_ovals,
    patchwork_oracle,
    point_in_triangle,
)

WIDE_CORNERS: Triangle = _tri((1, 0), (5, 0), (0, 3))
WIDE_BOTTOM = (2, 3, 4)
WIDE_INTERIOR = ((1, 1), (2, 1), (3, 1), (1, 2))

NARROW_CORNERS: Triangle = _tri((5, 0), (7, 0), (0, 3))
NARROW_BOTTOM = (6,)
NARROW_INTERIOR = ((4, 1), (2, 2))


@dataclass(frozen=True)
class Skeleton:
    """A refinement-shaped triangulation of one piece template."""

    triangles: tuple[Triangle, ...]
    history: tuple[patchwork.Refinement, ...]
    vertices: tuple[Vertex, ...]


def _doubled_area(t: Triangle) -> int:
    (a, b, c) = t
    return abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def skeletons(
    corners: Triangle,
    bottom_extra: Sequence[int],
    interior: Sequence[Vertex],
    interior_subsets: bool,
) -> list[Skeleton]:
    """All triangulations reachable from a bottom fan of the piece by 1->3
    refinements at interior lattice points and 2->4 splits of edges through
    them, one per triangle set.  Triangulations containing an even-lattice-
    area triangle are dropped: the curve-tracing chart on a triangle is only
    a faithful quadrant picture when its doubled area is odd."""
    (x0, _), (x1, _), apex = sorted(corners, key=lambda v: (v[1], v[0]))
    out: list[Skeleton] = []
    seen: set[tuple[Triangle, ...]] = set()
    for r in range(len(bottom_extra) + 1):
        for subset in itertools.combinations(bottom_extra, r):
            bottom = [x0, *subset, x1]
            base = [
                _tri((a, 0), (b, 0), apex) for a, b in zip(bottom, bottom[1:])
            ]
            if interior_subsets:
                orders: Iterable[Sequence[Vertex]] = (
                    p
                    for n in range(len(interior) + 1)
                    for p in itertools.permutations(interior, n)
                )
            else:
                orders = itertools.permutations(interior)
            for order in orders:
                state: list[Triangle] | None = list(base)
                history: list[patchwork.Refinement] = []
                for v in order:
                    containing = [
                        t for t in state if point_in_triangle(v, t, strict=True)
                    ]
                    if len(containing) == 1:
                        parent: tuple[Vertex, ...] = containing[0]
                    elif not containing:
                        edges = {
                            tuple(sorted((t[i], t[j])))
                            for t in state
                            for i, j in ((0, 1), (1, 2), (0, 2))
                            if patchwork._point_in_segment(v, t[i], t[j])
                        }
                        if len(edges) != 1:
                            state = None
                            break
                        (parent,) = edges
                    else:
                        state = None
                        break
                    patchwork.apply_refinement(state, parent, v)
                    history.append((parent, v))
                if state is None:
                    continue
                tris = tuple(sorted(state))
                if tris in seen:
                    continue
                seen.add(tris)
                if any(_doubled_area(t) % 2 == 0 for t in tris):
                    continue
                verts = tuple(sorted({v for t in tris for v in t}))
                out.append(Skeleton(tris, tuple(history), verts))
    return out


def sign_choices(
    vertices: Sequence[Vertex], fixed: dict[Vertex, int]
) -> Iterator[dict[Vertex, int]]:
    free = [v for v in vertices if v not in fixed]
    for combo in itertools.product((1, -1), repeat=len(free)):
        signs = dict(fixed)
        signs.update(zip(free, combo))
        yield signs


def _classify(con: Construction):
    try:
        return classify_construction(con)
    except UnclassifiableOval:
        return None


def _oval_shape_ok(cls, allowed_bases: Sequence[Vertex]) -> bool:
    """Every oval surrounds exactly one vertex; the base vertices are
    interior piece points and pairwise distinct (so single collapses are
    independent)."""
    bases = set()
    for o in cls.ovals:
        if len(o.surrounded) != 1:
            return False
        b = o.base_vertex
        if b not in allowed_bases:
            return False
        bases.add(b)
    return len(bases) == len(cls.ovals)


def _expect_out_of_range(con: Construction, cls, sub) -> bool:
    """True when collapse_ovals must reject this subset: some affected piece
    has no frozen variant for the requested remainder."""
    removed = {tuple(sorted(o.surrounded)) for o in sub}
    groups: dict[patchwork.Piece, list] = {}
    for o in cls.ovals:
        piece = patchwork.oval_piece(o, con.pieces)
        if piece is None:
            return True
        groups.setdefault(piece, []).append(o)
    for piece, ovals in groups.items():
        remaining = [
            o for o in ovals if tuple(sorted(o.surrounded)) not in removed
        ]
        if len(remaining) == len(ovals):
            continue
        source = con.piece_sources.get(patchwork._piece_kind(piece))
        if source is None:
            return True
        shift = piece.ell if piece.label != "t" else piece.ell - 1
        left = tuple(
            sorted(
                (
                    (
                        o.base_vertex[0] - 2 * shift * (3 - o.base_vertex[1]),
                        o.base_vertex[1],
                    ),
                    o.sign,
                )
                for o in remaining
            )
        )
        if left not in source.variants:
            return True
    return False


def _collapses_ok(con: Construction, cls, ovals=None) -> bool:
    """Collapsing any subset of the given ovals (default: all) must either
    drop exactly those ovals, leaving every other oval at its base vertex,
    or raise OutOfRange precisely when no frozen variant covers it."""
    ovals = list(cls.ovals) if ovals is None else list(ovals)
    n = len(ovals)
    if n <= 4:
        subsets = [
            list(sub)
            for r in range(1, n + 1)
            for sub in itertools.combinations(ovals, r)
        ]
    else:
        subsets = [[o] for o in ovals]
        subsets.extend([a, b] for a, b in itertools.combinations(ovals, 2))
        subsets.append(list(ovals))
    all_ids = {(o.base_vertex, o.sign) for o in cls.ovals}
    for sub in subsets:
        expect_fail = _expect_out_of_range(con, cls, sub)
        try:
            cls2 = _classify(collapse_ovals(con, sub))
        except patchwork.OutOfRange:
            if expect_fail:
                continue
            return False
        if expect_fail:
            return False
        if cls2 is None or cls2.pseudo_lines != 1:
            return False
        want = all_ids - {(o.base_vertex, o.sign) for o in sub}
        if {(o.base_vertex, o.sign) for o in cls2.ovals} != want:
            return False
    return True


def _oracle_ok(con: Construction) -> bool:
    try:
        return patchwork_oracle(con).ok
    except NoStabilization:
        return False


def _pattern_table(
    sk: Skeleton, boundary: dict[Vertex, int], kind: str
) -> dict[patchwork.VariantKey, dict[Vertex, int]]:
    """First sign pattern per contributed oval set on this skeleton (one
    pseudo-line, every oval around its own single interior vertex); keys are
    the sorted (base vertex, sign) pairs of the ovals."""
    table: dict[patchwork.VariantKey, dict[Vertex, int]] = {}
    for signs in sign_choices(sk.vertices, boundary):
        fix = PieceFixture(WIDE_CORNERS, sk.triangles, signs, sk.history)
        con = assemble_from_pieces(1, [kind], {kind: fix}, None)
        cls = _classify(con)
        if cls is None or cls.pseudo_lines != 1:
            continue
        if not _oval_shape_ok(cls, WIDE_INTERIOR):
            continue
        key = tuple(sorted((o.base_vertex, o.sign) for o in cls.ovals))
        table.setdefault(key, signs)
    return table


def _variant_library(
    wide_skeletons: Sequence[Skeleton], boundary: dict[Vertex, int], kind: str
) -> dict[patchwork.VariantKey, PieceFixture]:
    """First realization of each contributed-oval set over all skeletons:
    a complete piece content (triangulation, signs, history)."""
    lib: dict[patchwork.VariantKey, PieceFixture] = {}
    for sk in wide_skeletons:
        for key, signs in _pattern_table(sk, boundary, kind).items():
            lib.setdefault(
                key,
                PieceFixture(WIDE_CORNERS, sk.triangles, signs, sk.history),
            )
    return lib


def _find_wide_like(
    boundary: dict[Vertex, int],
    kind: str,
    want: tuple[int, int],
    wide_skeletons: Sequence[Skeleton],
    max_missing: int,
) -> PieceFixture | None:
    """First main pattern with the wanted oval counts whose proper oval
    subsets are realized by variants (on any skeleton), up to max_missing
    unrealizable remainders (those collapses then raise OutOfRange)."""
    lib = _variant_library(wide_skeletons, boundary, kind)
    mains = sorted(
        key
        for key in lib
        if (
            sum(1 for _, sg in key if sg > 0),
            sum(1 for _, sg in key if sg < 0),
        )
        == want
    )
    for main in mains:
        chain = [
            tuple(sub)
            for r in range(len(main))
            for sub in itertools.combinations(main, r)
        ]
        if sum(1 for c in chain if c not in lib) > max_missing:
            continue
        base = lib[main]
        fix = PieceFixture(
            base.corners,
            base.triangles,
            base.signs,
            base.history,
            {c: lib[c] for c in chain if c in lib},
        )
        con = assemble_from_pieces(1, [kind], {kind: fix}, None)
        cls = _classify(con)
        assert cls is not None and (cls.plus_count, cls.minus_count) == want
        if not _collapses_ok(con, cls):
            continue
        if not _oracle_ok(con):
            continue
        return fix
    return None


def find_wide(
    boundary: dict[Vertex, int], eps: int, wide_skeletons: Sequence[Skeleton]
) -> PieceFixture | None:
    want = (4, 0) if eps > 0 else (0, 4)
    return _find_wide_like(
        boundary, "+" if eps > 0 else "-", want, wide_skeletons, 1
    )


def find_m2(
    boundary: dict[Vertex, int], wide_skeletons_subsets: Sequence[Skeleton]
) -> PieceFixture | None:
    return _find_wide_like(boundary, "m2", (1, 1), wide_skeletons_subsets, 0)


def find_narrow(
    boundary: dict[Vertex, int],
    wide_plus: PieceFixture,
    wide_minus: PieceFixture,
) -> PieceFixture | None:
    """The narrow piece's oval pair is structural: every sign pattern on
    every refinement-shaped narrow triangulation contributes exactly one
    oval of each sign, so the fixture carries no collapse variants and only
    wide-piece ovals are checked for collapsibility (collapsing a narrow
    oval raises OutOfRange)."""
    wides = {"+": wide_plus, "-": wide_minus}
    expect = {0: (1, 9), 1: (5, 5), 2: (9, 1)}
    for sk in skeletons(NARROW_CORNERS, NARROW_BOTTOM, NARROW_INTERIOR, False):
        for signs in sign_choices(sk.vertices, boundary):
            fix = PieceFixture(NARROW_CORNERS, sk.triangles, signs, sk.history)
            ok = True
            for lam in (0, 1, 2):
                kinds = ["+" if i < lam else "-" for i in range(2)]
                con = assemble_from_pieces(2, kinds, wides, fix)
                cls = _classify(con)
                if (
                    cls is None
                    or cls.pseudo_lines != 1
                    or (cls.plus_count, cls.minus_count) != expect[lam]
                ):
                    ok = False
                    break
                # the narrow piece must contribute one oval of each sign
                narrow_piece = next(p for p in con.pieces if p.label == "t")
                narrow_ovals = [
                    o
                    for o in cls.ovals
                    if patchwork.oval_piece(o, [narrow_piece]) is not None
                ]
                if sorted(o.sign for o in narrow_ovals) != [-1, 1]:
                    ok = False
                    break
                if not _oval_shape_ok(
                    cls, tuple(v for p in con.pieces for v in _interior_of(p))
                ):
                    ok = False
                    break
            if not ok:
                continue
            con = assemble_from_pieces(2, ["-", "-"], wides, fix)
            cls = _classify(con)
            wide_pieces = [p for p in con.pieces if p.label != "t"]
            wide_ovals = [
                o
                for o in cls.ovals
                if patchwork.oval_piece(o, wide_pieces) is not None
            ]
            if not _collapses_ok(con, cls, wide_ovals):
                continue
            if not _oracle_ok(con):
                continue
            return fix
    return None


def _interior_of(piece: patchwork.Piece) -> tuple[Vertex, ...]:
    shift = 2 * (piece.ell if piece.label != "t" else piece.ell - 1)
    if piece.label in ("T", "m2"):
        base = WIDE_INTERIOR
    elif piece.label == "t":
        base = NARROW_INTERIOR
    else:
        return ()
    return tuple((i + shift * (3 - j), j) for i, j in base)


def search_all(verbose: bool = False) -> dict[str, PieceFixture] | None:
    """Search boundary sign patterns in lexicographic order; within each,
    pick the first wide pieces, narrow piece and modified piece that pass
    every combinatorial condition and the polynomial oracle."""
    wide_sks_subsets = skeletons(WIDE_CORNERS, WIDE_BOTTOM, WIDE_INTERIOR, True)
    for alpha, b1, b5 in itertools.product((1, -1), repeat=3):
        wide_boundary = {(0, 3): alpha, (1, 0): b1, (5, 0): b5}
        if verbose:
            print(f"boundary apex={alpha} left={b1} right={b5}")
        minus = find_wide(wide_boundary, -1, wide_sks_subsets)
        if minus is None:
            continue
        if verbose:
            print("  wide minus found")
        plus = find_wide(wide_boundary, 1, wide_sks_subsets)
        if plus is None:
            continue
        if verbose:
            print("  wide plus found")
        # the narrow template sits at ell = 1; its right corner (7,0) is the
        # shear image of the wide left corner (1,0)
        narrow_boundary = {(0, 3): alpha, (5, 0): b5, (7, 0): b1}
        narrow = find_narrow(narrow_boundary, plus, minus)
        if narrow is None:
            continue
        if verbose:
            print("  narrow found")
        m2 = find_m2(wide_boundary, wide_sks_subsets)
        if m2 is None:
            continue
        if verbose:
            print("  m2 found")
        return {"+": plus, "-": minus, "t": narrow, "m2": m2}
    return None


def main() -> None:
    import os

    found = search_all(verbose=True)
    if found is None:
        raise SystemExit("no fixture set found")
    here = os.path.dirname(os.path.abspath(__file__))
    outdir = os.path.join(here, "fixtures")
    os.makedirs(outdir, exist_ok=True)
    for kind, fix in found.items():
        path = os.path.join(outdir, patchwork.FIXTURE_FILES[kind])
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(patchwork.format_fixture(fix))
        print("wrote", path)


if __name__ == "__main__":
    main()
