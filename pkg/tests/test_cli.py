import json
from fractions import Fraction

import pytest

from ghostslopes.arith import INFINITY
from ghostslopes.cli import OutputRecord, main, read_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_slopes_both(capsys):
    code, out, _ = run(capsys, "slopes", "--p", "11", "--a", "2", "--b", "0", "--s-eps", "0", "--k", "14", "--method", "both")
    rec = json.loads(out)
    assert code == 0 and rec["payload"]["match"] is True
    assert rec["payload"]["np"] == [[0, 1]] == rec["payload"]["recursive"]


def test_slopes_mismatch_exit_code(capsys):
    code, out, _ = run(capsys, "slopes", "--p", "11", "--a", "2", "--k", "114", "--reading", "printed-case3-b")
    assert code == 1 and json.loads(out)["payload"]["match"] is False


def test_dims(capsys):
    code, out, _ = run(capsys, "dims", "--p", "11", "--a", "2", "--s-eps", "0", "--k", "14")
    p = json.loads(out)["payload"]
    assert code == 0 and (p["ur"], p["iw"], p["new"]) == (1, 4, 2)


def test_verify_empty(capsys):
    code, out, _ = run(capsys, "verify", "--p", "11", "--suite", "main", "--k-max", "0")
    assert code == 0 and out == ""


def test_usage_errors(capsys):
    code, _, err = run(capsys, "dims", "--p", "12", "--a", "2", "--k", "14")
    assert code == 2 and "prime" in err
    code, _, err = run(capsys, "slopes", "--p", "11", "--a", "2", "--k", "15")
    assert code == 2 and "k=15" in err


def test_record_roundtrip(capsys):
    _, out, _ = run(capsys, "slopes", "--p", "11", "--a", "2", "--k", "304")
    rec = OutputRecord.from_json(out)
    assert rec.payload["np"] == rec.payload["recursive"]
    assert all(isinstance(x, Fraction) for x in rec.payload["np"])
    assert rec.to_json() + "\n" == out
    _, out, _ = run(capsys, "np", "--p", "11", "--a", "2", "--k", "64")
    rec = OutputRecord.from_json(out)
    assert rec.payload["vertices"][0] == (0, 0) and rec.to_json() + "\n" == out
    _, out, _ = run(capsys, "ghost", "--p", "11", "--a", "2", "--k", "14", "--count", "3")
    rec = OutputRecord.from_json(out)
    assert rec.payload["valuations"][2] is INFINITY and rec.to_json() + "\n" == out


def test_csv_output(capsys):
    _, out, _ = run(capsys, "slopes", "--p", "11", "--a", "2", "--k", "304", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "index,np,recursive" and lines[2] == "2,3/1,3/1"


def test_deterministic_output(capsys):
    argv = ("verify", "--p", "11", "--a-list", "2", "--b-list", "0", "--suite", "all", "--k-max", "40")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--jobs", "2")
    assert a == b and a


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# defaults\np = 13\na=4\nk = 40\n")
    assert read_config(cfg)["p"] == "13"
    _, out, _ = run(capsys, "dims", "--config", str(cfg))
    assert json.loads(out)["params"]["p"] == 13
    _, out, _ = run(capsys, "dims", "--config", str(cfg), "--p", "11", "--k", "14")
    rec = json.loads(out)
    assert rec["params"]["p"] == 11 and rec["params"]["a"] == 4


def test_cache_file(tmp_path, capsys):
    cache = tmp_path / "memo.json"
    argv = ("slopes", "--p", "11", "--a", "2", "--k", "504", "--method", "recursive", "--cache", str(cache))
    _, first, _ = run(capsys, *argv)
    data = json.loads(cache.read_text())
    assert data["schema"] == 1 and data["memo"]
    _, second, _ = run(capsys, *argv)
    assert first == second
    _, _, err = run(capsys, "slopes", "--p", "11", "--a", "4", "--k", "16", "--method", "recursive", "--cache", str(cache))
    assert "ignoring cache" in err


def test_plot_outputs(tmp_path, capsys):
    svg = tmp_path / "np.svg"
    code, _, _ = run(capsys, "plot", "--p", "11", "--a", "2", "--k", "64", "--out", str(svg))
    text = svg.read_text()
    assert code == 0 and text.startswith("<svg") and 'class="vertex"' in text and 'class="ns-range"' in text
    _, out, _ = run(capsys, "plot", "--p", "11", "--a", "2", "--k", "64", "--style", "text")
    assert "vertices: (0,0/1)" in out and "k=64:(2, 12)" in out


def test_buzzard(tmp_path, capsys):
    f = tmp_path / "dims.txt"
    f.write_text("m=0\n2,0,1\n4,1,1\n")
    _, out, _ = run(capsys, "buzzard", "--p", "11", "--k", "4", "--dims-file", str(f))
    assert json.loads(out)["payload"]["slopes"] == [[0, 1]]
    code, _, err = run(capsys, "buzzard", "--p", "11", "--k", "8", "--dims-file", str(f))
    assert code == 2 and "d(k)" in err


def test_falsify(capsys):
    _, out, _ = run(capsys, "falsify", "--p", "11", "--a-list", "2", "--b-list", "0", "--k-max", "200")
    rec = json.loads(out)
    assert rec["outcome"] == "falsified" and rec["mismatches"] > 0
