"""Command-line front end.

Subcommands: classify, construct, analyze, verify.  Output is JSON, ASCII,
or SVG (`--format`); SVG reports render matplotlib figures to files
alongside the delimited text output.

Exit codes: 0 success, 1 usage error, 2 domain error (non-generic curve,
out-of-range parameter, unreadable input), 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import classify, patchwork, trigonal
from .errors import EllipschemeError, NonGeneric
from .exactpoly import parse_rational


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="ellipscheme", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_format(p):
        p.add_argument(
            "--format",
            choices=("json", "ascii", "svg"),
            default="ascii",
            help="output format (svg also writes figure files)",
        )
        p.add_argument(
            "--out-dir",
            default=".",
            help="directory for emitted files (fixtures, curves, figures)",
        )

    p = sub.add_parser("classify", help="allowed diagram and type list")
    p.add_argument("--k", type=int, required=True)
    add_format(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct", help="build a patchworked curve family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--family", choices=("m", "m2"), required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument(
        "--collapse",
        metavar="A,B",
        help="collapse ovals down to the scheme <A|B>",
    )
    p.add_argument(
        "--emit",
        metavar="T",
        help="emit the T-polynomial curve file at parameter t = T (rational)",
    )
    add_format(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="analyze a trigonal curve file")
    p.add_argument("curve_file")
    add_format(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="cross-check the classification theorem")
    p.add_argument("--k-max", type=int, required=True)
    add_format(p)
    p.set_defaults(func=cmd_verify)

    return parser


def cmd_classify(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    k = args.k
    if args.format == "json":
        print(classify.diagram_json(k))
        return 0
    extremals = classify.extremal_types(k)
    lines = [classify.diagram_ascii(k), "", f"extremal types ({len(extremals)}):"]
    for t in extremals:
        pt = classify.diagram_point(t)
        lines.append(f"  {t.serialize():<12} chi={pt.chi:>4} h*={pt.h_star:>4}")
    text = "\n".join(lines)
    print(text)
    if args.format == "svg":
        from . import render

        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, f"diagram_k{k}.svg")
        render.render_diagram(k, path)
        print(f"figure|{path}")
    return 0


def _parse_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected two comma-separated integers, got {text!r}")
    return a, b


def cmd_construct(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    k, lam = args.k, args.lam
    if args.family == "m":
        con = patchwork.mcurve_family(k, lam)
    else:
        con = patchwork.m2curve_family(k, lam)
    scheme = patchwork.classify_construction(con).scheme
    report: dict = {
        "k": k,
        "family": args.family,
        "lambda": lam,
        "scheme": scheme.format(),
    }
    if args.collapse:
        a, b = _parse_pair(args.collapse)
        con = patchwork.collapse_to(con, a, b)
        collapsed = patchwork.classify_construction(con).scheme
        report["collapsed_scheme"] = collapsed.format()
        scheme = collapsed
    report["cover"] = sorted(
        t.serialize() for t in classify.cover_type(scheme, k)
    )
    os.makedirs(args.out_dir, exist_ok=True)
    stem = f"construction_k{k}_{args.family}_lam{lam}"
    con_path = os.path.join(args.out_dir, stem + ".txt")
    with open(con_path, "w", encoding="utf-8") as fh:
        fh.write(patchwork.format_construction(con))
    report["construction_file"] = con_path
    if args.emit:
        t = parse_rational(args.emit)
        if not 0 < t < 1:
            raise UsageError("--emit parameter must satisfy 0 < t < 1")
        lifting = patchwork.build_lifting(con.tri, con.history)
        poly = patchwork.emit_T_polynomial(
            patchwork.TPolynomialRequest(con.tri, con.signs, lifting, t)
        )
        curve = trigonal.depress(poly, k)
        curve_path = os.path.join(args.out_dir, stem + f"_t{t.numerator}_{t.denominator}.curve")
        with open(curve_path, "w", encoding="utf-8") as fh:
            fh.write(curve.format())
        report["curve_file"] = curve_path
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        for key, value in report.items():
            if isinstance(value, list):
                value = " ".join(value)
            print(f"{key}|{value}")
    if args.format == "svg":
        from . import render

        fig_path = os.path.join(args.out_dir, stem + ".svg")
        render.render_construction(con, fig_path)
        print(f"figure|{fig_path}")
    return 0


def cmd_analyze(args) -> int:
    try:
        with open(args.curve_file, "r", encoding="utf-8") as fh:
            curve = trigonal.TrigonalCurve.parse(fh.read())
    except (OSError, ValueError) as e:
        raise EllipschemeError(f"cannot read curve file: {e}") from e
    report = trigonal.check_generic(curve)
    generic_info = {
        "degree_ok": report.degree_ok,
        "squarefree_ok": report.squarefree_ok,
        "coprime_ok": report.coprime_ok,
        "is_generic": report.is_generic,
    }
    if not report.is_generic:
        out = {"k": curve.k, "genericity": generic_info, "error": "non-generic"}
        if args.format == "json":
            print(json.dumps(out, indent=2))
        else:
            for key, value in generic_info.items():
                print(f"genericity.{key}|{value}")
            print("error|non-generic")
        return 2
    analysis = trigonal.analyze(curve)
    cover = sorted(
        t.serialize() for t in classify.cover_type(analysis.scheme, curve.k)
    )
    if args.format == "json":
        print(
            json.dumps(
                {
                    "k": curve.k,
                    "genericity": generic_info,
                    "scheme": analysis.scheme.format(),
                    "ovals": len(analysis.ovals),
                    "zigzags": len(analysis.zigzags),
                    "cover": cover,
                },
                indent=2,
            )
        )
    else:
        for key, value in generic_info.items():
            print(f"genericity.{key}|{value}")
        print(f"scheme|{analysis.scheme.format()}")
        print(f"ovals|{len(analysis.ovals)}")
        print(f"zigzags|{len(analysis.zigzags)}")
        print(f"cover|{' '.join(cover)}")
    return 0


def _invariant_failures(k: int) -> list[str]:
    """Module-level invariant suite for one k."""
    failures: list[str] = []
    points = classify.allowed_points(k)
    if {classify.DiagramPoint(-pt.chi, pt.h_star) for pt in points} != points:
        failures.append("diagram not symmetric in chi")
    m_points = {pt for pt in points if pt.h_star == 12 * k}
    want = {
        classify.DiagramPoint(2 * (k + 4 * lam) - (10 * k - 8 * lam), 12 * k)
        for lam in range(k + 1)
    }
    if len(m_points) != k + 1 or m_points != want:
        failures.append("M-point row mismatch")
    closure = classify.morse_closure(k)
    for t in classify.extremal_types(k):
        if t not in closure:
            failures.append(f"extremal type {t.serialize()} not in closure")
        elif not classify.is_extremal(t, k):
            failures.append(f"extremal type {t.serialize()} is not extremal")
    for t in closure:
        if classify.diagram_point(t) not in points:
            failures.append(f"closure type {t.serialize()} outside diagram")
    return failures


def cmd_verify(args) -> int:
    if args.k_max < 1:
        raise UsageError("--k-max must be >= 1")
    rows = []
    all_ok = True
    for k in range(1, args.k_max + 1):
        ok, report = classify.verify_theorem(k)
        failures = _invariant_failures(k)
        ok = ok and not failures
        all_ok = all_ok and ok
        rows.append(
            {
                "k": k,
                "ok": ok,
                "discrepancies": report,
                "invariant_failures": failures,
            }
        )
    if args.format == "json":
        print(json.dumps({"ok": all_ok, "per_k": rows}, indent=2))
    else:
        for row in rows:
            status = "pass" if row["ok"] else "fail"
            print(f"k={row['k']}|{status}")
            for name, items in row["discrepancies"].items():
                for item in items:
                    print(f"  {name}|{item}")
            for item in row["invariant_failures"]:
                print(f"  invariant|{item}")
        print(f"all|{'pass' if all_ok else 'fail'}")
    return 0 if all_ok else 2


def main(argv=None) -> int:
    try:
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except UsageError as e:
            print(f"usage error: {e}", file=sys.stderr)
            return 1
        try:
            return args.func(args)
        except UsageError as e:
            print(f"usage error: {e}", file=sys.stderr)
            return 1
        except NonGeneric as e:
            print(f"non-generic: {e}", file=sys.stderr)
            return 2
        except EllipschemeError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
    except AssertionError as e:
        print(f"internal invariant failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
