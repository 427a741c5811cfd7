"""Static figure rendering (matplotlib SVG backend).

Everything upstream of this module computes with exact rationals; numbers
are converted to floating point only here, at the final coordinate-
formatting step, rounded to 6 decimal places.
"""

from __future__ import annotations

from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from . import classify  # noqa: E402
from .patchwork import Construction, symmetrize, trace_curve  # noqa: E402


def _f(x) -> float:
    """The only rational-to-float conversion in the package."""
    return round(float(Fraction(x)), 6)


def render_diagram(k: int, path: str) -> str:
    """Diamond diagram of the allowed (chi, h*) points.

    M-points and extremal (M-2)-points are highlighted, the (0, 8) point is
    specially marked, and every point is labeled with its topological types.
    """
    points = sorted(classify.allowed_points(k))
    extremal_pts = {classify.diagram_point(t) for t in classify.extremal_types(k)}

    fig, ax = plt.subplots(figsize=(9, 7))
    for pt in points:
        x, y = _f(pt.chi), _f(pt.h_star)
        special = (pt.chi, pt.h_star) == (0, 8)
        highlighted = pt in extremal_pts
        if special:
            ax.plot(x, y, "s", color="tab:red", markersize=9, zorder=3)
        elif highlighted:
            ax.plot(x, y, "*", color="tab:orange", markersize=12, zorder=3)
        else:
            ax.plot(x, y, "o", color="tab:blue", markersize=4, zorder=2)
        if highlighted or special:
            types = sorted(
                t.serialize() for t in classify.point_to_types(pt, k)
            )
            ax.annotate(
                "\n".join(types),
                (x, y),
                textcoords="offset points",
                xytext=(4, 4),
                fontsize=6,
            )
    ax.axvline(0.0, color="gray", linewidth=0.5)
    ax.set_xlabel("chi")
    ax.set_ylabel("h*")
    ax.set_title(
        f"allowed (chi, h*) for k = {k}  "
        "(* extremal, square = the (0,8) point)"
    )
    ax.grid(True, linewidth=0.3, alpha=0.5)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def render_construction(con: Construction, path: str) -> str:
    """Patchwork picture: the quadrangle Q, the symmetrized triangulation,
    the vertex signs, and the traced curve."""
    sym = symmetrize(con.tri, con.signs)
    curve = trace_curve(sym)
    k = con.k

    fig, ax = plt.subplots(figsize=(10, 5))
    # the quadrangle Q: |u|/(6k) + |x|/3 <= 1
    qx = [_f(6 * k), 0.0, _f(-6 * k), 0.0, _f(6 * k)]
    qy = [0.0, 3.0, 0.0, -3.0, 0.0]
    ax.plot(qx, qy, color="black", linewidth=1.2, zorder=1)
    for t in sym.triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])):
            ax.plot(
                [_f(a[0]), _f(b[0])],
                [_f(a[1]), _f(b[1])],
                color="lightgray",
                linewidth=0.5,
                zorder=1,
            )
    for v, s in sym.signs.items():
        ax.plot(
            _f(v[0]),
            _f(v[1]),
            "^" if s > 0 else "v",
            color="tab:blue" if s > 0 else "tab:red",
            markersize=3,
            zorder=2,
        )
    for seg in curve.segments:
        ax.plot(
            [_f(seg.a[0]), _f(seg.b[0])],
            [_f(seg.a[1]), _f(seg.b[1])],
            color="tab:green",
            linewidth=1.5,
            zorder=3,
        )
    ax.set_aspect("equal")
    ax.set_title(f"patchwork on Q, k = {k} (up = +, down = -)")
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
