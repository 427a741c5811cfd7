"""End-to-end tests of the command line interface and its exit codes."""

import json
import os

import pytest

from ellipscheme import cli
from ellipscheme.exactpoly import UniPoly
from ellipscheme.trigonal import TrigonalCurve


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_usage_errors(capsys):
    assert run(capsys, [])[0] == 1
    assert run(capsys, ["classify"])[0] == 1
    assert run(capsys, ["classify", "--k", "0"])[0] == 1
    assert run(capsys, ["construct", "--k", "1", "--family", "x",
                        "--lambda", "0"])[0] == 1
    assert run(capsys, ["verify", "--k-max", "0"])[0] == 1


def test_classify_ascii_lists_extremal_types(capsys):
    code, out, _ = run(capsys, ["classify", "--k", "1", "--format", "ascii"])
    assert code == 0
    assert "extremal types (4):" in out
    for name in ("V10", "4S+V2", "S+V4", "V2+V2"):
        assert name in out


def test_classify_json(capsys):
    code, out, _ = run(capsys, ["classify", "--k", "2", "--format", "json"])
    assert code == 0
    data = json.loads(out)
    assert data["k"] == 2


def test_classify_svg_writes_figure(capsys, tmp_path):
    code, out, _ = run(
        capsys,
        ["classify", "--k", "1", "--format", "svg", "--out-dir", str(tmp_path)],
    )
    assert code == 0
    path = tmp_path / "diagram_k1.svg"
    assert path.exists()
    assert f"figure|{path}" in out


def test_construct_with_collapse(capsys, tmp_path):
    code, out, _ = run(
        capsys,
        [
            "construct", "--k", "1", "--family", "m2", "--lambda", "0",
            "--collapse", "1,0", "--out-dir", str(tmp_path),
        ],
    )
    assert code == 0
    lines = dict(l.split("|", 1) for l in out.strip().splitlines())
    assert lines["scheme"] == "<1|1>"
    assert lines["collapsed_scheme"] == "<0|1>"
    assert os.path.exists(lines["construction_file"])


def test_construct_out_of_range_collapse(capsys, tmp_path):
    code, _, err = run(
        capsys,
        [
            "construct", "--k", "1", "--family", "m", "--lambda", "0",
            "--collapse", "3,3", "--out-dir", str(tmp_path),
        ],
    )
    assert code == 2
    assert "error" in err


def test_construct_emit_and_analyze(capsys, tmp_path):
    code, out, _ = run(
        capsys,
        [
            "construct", "--k", "1", "--family", "m", "--lambda", "0",
            "--emit", "1/16", "--format", "json", "--out-dir", str(tmp_path),
        ],
    )
    assert code == 0
    report = json.loads(out)
    assert report["scheme"] == "<0|4>"
    curve_file = report["curve_file"]
    code, out, _ = run(capsys, ["analyze", curve_file, "--format", "json"])
    assert code == 0
    analysis = json.loads(out)
    assert analysis["genericity"]["is_generic"]
    assert analysis["scheme"] == "<0|4>"
    assert analysis["ovals"] == 4


def test_construct_svg_writes_figure(capsys, tmp_path):
    code, out, _ = run(
        capsys,
        [
            "construct", "--k", "1", "--family", "m", "--lambda", "1",
            "--format", "svg", "--out-dir", str(tmp_path),
        ],
    )
    assert code == 0
    assert (tmp_path / "construction_k1_m_lam1.svg").exists()


def test_analyze_non_generic_is_domain_error(capsys, tmp_path):
    path = tmp_path / "bad.curve"
    curve = TrigonalCurve(1, UniPoly.zero(), UniPoly([0, 0, 0, 1]))
    path.write_text(curve.format())
    code, out, _ = run(capsys, ["analyze", str(path)])
    assert code == 2
    assert "error|non-generic" in out


def test_analyze_missing_file(capsys):
    code, _, err = run(capsys, ["analyze", "/nonexistent.curve"])
    assert code == 2
    assert "cannot read" in err


def test_verify_ascii(capsys):
    code, out, _ = run(capsys, ["verify", "--k-max", "3"])
    assert code == 0
    for k in (1, 2, 3):
        assert f"k={k}|pass" in out
    assert "all|pass" in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, ["verify", "--k-max", "2", "--format", "json"])
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert [row["k"] for row in data["per_k"]] == [1, 2]
