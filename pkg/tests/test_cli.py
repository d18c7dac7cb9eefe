import json
import subprocess
import sys

import pytest

from census.cli import build_parser, main


def run(capsys, argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


INST = '{"m":3,"n":3,"s":[2,2,2],"t":[2,2,2],"forbidden":[]}'


def test_global_flags_either_side():
    p = build_parser()
    assert p.parse_args(["--engine", "brute", "count"]).engine == "brute"
    assert p.parse_args(["count", "--engine", "dp"]).engine == "dp"
    assert p.parse_args(["count"]).engine == "auto"
    assert p.parse_args(["--tol", "1e-3", "saddle"]).tol == 1e-3


def test_count_stdin(capsys, monkeypatch):
    code, out, _ = run(capsys, ["count"], INST, monkeypatch)
    assert code == 0 and json.loads(out) == {"value": "6"}


def test_count_file_and_engine(tmp_path, capsys):
    f = tmp_path / "i.json"
    f.write_text(INST)
    code, out, _ = run(capsys, ["--engine", "brute", "count", str(f)])
    assert code == 0 and json.loads(out)["value"] == "6"


def test_digraph_count(capsys, monkeypatch):
    code, out, _ = run(capsys, ["count", "--digraph"], '{"n":5,"s":[1,1,1,1,1],"t":[1,1,1,1,1],"arcs":[]}',
                       monkeypatch)
    assert json.loads(out)["value"] == "44"


def test_perm(capsys, monkeypatch):
    code, out, _ = run(capsys, ["perm"], '[[1,1,1],[1,1,1],[1,1,1]]', monkeypatch)
    assert json.loads(out)["value"] == "6"


def test_prob_fraction(capsys, monkeypatch):
    inst = '{"m":4,"n":4,"s":[2,2,2,2],"t":[2,2,2,2],"forbidden":[[0,0]]}'
    code, out, _ = run(capsys, ["prob", "--mode", "contains"], inst, monkeypatch)
    d = json.loads(out)
    assert d["value"] == {"num": "1", "den": "2"} and d["float"] == 0.5


def test_eperm_and_estimates(capsys, monkeypatch):
    inst = '{"m":4,"n":4,"s":[2,2,2,2],"t":[2,2,2,2],"forbidden":[]}'
    code, out, _ = run(capsys, ["eperm"], inst, monkeypatch)
    assert json.loads(out)["value"] == {"num": "12", "den": "5"}
    code, out, _ = run(capsys, ["estimate"], inst, monkeypatch)
    d = json.loads(out)
    assert d["components"]["exponent"] == -0.5 and d["error_order"] == "exp(O(n^-b))"
    code, out, _ = run(capsys, ["eperm-est"], inst, monkeypatch)
    assert "log_value" in json.loads(out)


def test_saddle_dump(tmp_path, capsys, monkeypatch):
    dump = tmp_path / "lam.csv"
    code, out, _ = run(capsys, ["saddle", "--dump-lambda", str(dump)],
                       '{"m":2,"n":3,"s":[2,1],"t":[1,1,1],"forbidden":[]}', monkeypatch)
    d = json.loads(out)
    assert code == 0 and d["converged"] and d["residuals"]["max_abs"] < 1e-12
    rows = [list(map(float, line.split(","))) for line in dump.read_text().split()]
    assert rows[0][0] == pytest.approx(2 / 3) and rows[1][2] == pytest.approx(1 / 3)


def test_saddle_boundary_exit_code(capsys, monkeypatch):
    code, _, err = run(capsys, ["saddle"], '{"m":2,"n":2,"s":[1,1],"t":[1,1],"forbidden":[[0,0]]}',
                       monkeypatch)
    assert code == 1 and "SaddleBoundaryError" in err


def test_invalid_input_exit_code(capsys, monkeypatch):
    code, _, err = run(capsys, ["count"], '{"m":2,"n":2,"s":[1,1],"t":[2,1]}', monkeypatch)
    assert code == 2


def test_miss_hit_induced_bounds_avg(capsys, monkeypatch):
    inst = '{"m":8,"n":8,"s":[4,4,4,4,4,4,4,4],"t":[4,4,4,4,4,4,4,4],"forbidden":[[0,0]]}'
    code, out, _ = run(capsys, ["miss-hit", "--mode", "host_semiregular"], inst, monkeypatch)
    assert json.loads(out)["components"]["miss"] == pytest.approx(-3 / 128)
    code, out, _ = run(capsys, ["induced", "--window", "2", "2"], inst, monkeypatch)
    assert code == 0 and "log_value" in json.loads(out)
    code, out, _ = run(capsys, ["bounds", "--n", "3", "--s", "2"])
    assert json.loads(out)["gurvits_log"] == pytest.approx(0.6931471805599453)
    code, out, _ = run(capsys, ["avg", "--trace"], '{"z":[1,0,-1]}', monkeypatch)
    d = json.loads(out)
    assert d["values"] == [0, 0, 0] and d["steps"] == 1 and d["trace"] == [[2, 0]]


def test_aut(capsys, monkeypatch):
    code, out, _ = run(capsys, ["aut"], '{"m":4,"n":4,"s":[0,0,0,0],"t":[0,0,0,0],"forbidden":[[0,0],[1,1]]}',
                       monkeypatch)
    d = json.loads(out)
    assert d["value"] == "8" and d["class_size"] == str(24 * 24 // 8)


def test_sweep_cli(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "regular", "sizes": [[6, 6]], "density": "1/2",
                               "pattern": "single_edge"}))
    out = tmp_path / "r.csv"
    r = subprocess.run([sys.executable, "-m", "census.cli", "--seed", "5", "sweep",
                        "--config", str(cfg), "--out", str(out)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "m,n,lambda,pattern,exact_log,estimate_log,log_ratio,saddle_residual,ms_exact,ms_estimate"
    assert len(lines) == 2


def test_sweep_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"family": "nope"}')
    assert main(["sweep", "--config", str(bad)]) == 2
    big = tmp_path / "big.json"
    big.write_text('{"sizes": [[20, 20]]}')
    assert main(["sweep", "--config", str(big), "--format", "json"]) == 3
    out, err = capsys.readouterr()
    assert "ResourceLimitError" in err and json.loads(out)["rows"][0]["estimate_log"] is not None
