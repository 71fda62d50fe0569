import csv
import json
from fractions import Fraction

import pytest

from cubex.cli import main, parse_number
from cubex.weyl import F_w, WeylParams


def read_csv(path):
    raw = path.read_bytes()
    assert b"\r\n" in raw
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_sum_eval_matches_library(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["sum-eval", "F_w", "alpha=0.25", "P=400", "w=6", "--out", str(out)]) == 0
    rows = read_csv(out / "sum_eval.csv")
    v = F_w(0.25, WeylParams(400, 6))
    assert len(rows) == 1
    assert float(rows[0]["Re"]) == v.value.real and float(rows[0]["Im"]) == v.value.imag
    assert int(rows[0]["terms"]) == v.terms
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["params"]["w"] == "6"
    assert report["tool"] == "cubex" and report["version"]


def test_sum_eval_complete_sums(tmp_path):
    out = tmp_path / "u"
    assert main(["sum-eval", "sum=U", "q=7", "a=1", "--out", str(out)]) == 0
    row = read_csv(out / "sum_eval.csv")[0]
    assert float(row["Re"]) == pytest.approx(4.740938811152129)


def test_arc_classify(tmp_path):
    out = tmp_path / "a"
    assert main(["arc-classify", "alpha=1/2", "P=100", "--out", str(out)]) == 0
    summary = json.loads((out / "report.json").read_text())["summary"]
    assert summary["kind"] == "MajorN" and summary["q"] == 2 and summary["xi"] == 2.0


def test_bound_table_csv(tmp_path, capsys):
    out = tmp_path / "b"
    assert main(["bound-table", "--out", str(out)]) == 0
    rows = read_csv(out / "bound_table.csv")
    assert len(rows) == 21
    row = next(r for r in rows if r["delta_exact"] == "4/5")
    assert float(row["new_bound"]) == 1.0
    assert (out / "figures" / "bound_table.png").exists()
    text = capsys.readouterr().out
    assert text.count("PASS") == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["sum-eval", "nope=1"],
        ["sum-eval", "sum=Z"],
        ["sum-eval", "sum=U", "q=0"],
        ["arc-classify", "alpha=3/0"],
        ["expander", "set=random_density", "delta=0"],
        ["bound-table", "--seed", "-1"],
        ["major-approx", "mode=bogus"],
        ["sum-eval", "--p-grid", "1,x"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path / "x")]) == 2
    assert "error" in capsys.readouterr().err


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\nsum = S\nq = 3\na1 = 0\na2 = 1\nout = " + str(tmp_path / "from_file") + "\n")
    assert main(["sum-eval", "--config", str(cfg)]) == 0
    row = read_csv(tmp_path / "from_file" / "sum_eval.csv")[0]
    assert float(row["Im"]) == pytest.approx(3**0.5)
    assert main(["sum-eval", "--config", str(cfg), "q=1", "--out", str(tmp_path / "cli")]) == 0
    row = read_csv(tmp_path / "cli" / "sum_eval.csv")[0]
    assert float(row["Re"]) == 1.0
    bad = tmp_path / "bad.cfg"
    bad.write_text("just words\n")
    assert main(["sum-eval", "--config", str(bad), "--out", str(tmp_path / "y")]) == 2


def test_expander_small(tmp_path):
    out = tmp_path / "e"
    assert main(["expander", "N=100000", "trend=10000", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    names = {c["name"]: c["pass"] for c in report["checks"]}
    assert all(names.values()) and len(names) == 4


def test_parse_number():
    assert parse_number("3/7") == Fraction(3, 7)
    assert parse_number("0.5") == 0.5
