import csv
import io
import json
import math
import subprocess
import sys

import pytest

from citetoy.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_pmf_example():
    code, text = call("pmf", "--model", '{"family":"geometric","q":0.5}', "--max-k", "3")
    assert code == 0
    assert text == "k,probability\n0,0.5\n1,0.25\n2,0.125\n3,0.0625\n"


def test_figures_example():
    code, text = call("figures", "--dataset", "ex1", "--threshold", "50")
    assert code == 0
    r = rows(text)
    assert r[0] == ["x", "neg_log_survival", "fitted_line"]
    assert len(r) == 1 + 19
    assert float(r[1][1]) == pytest.approx(-math.log(21 / 22), abs=1e-15)


def test_figures_uses_default_threshold():
    assert call("figures", "--dataset", "ex2")[1] == call("figures", "--dataset", "ex2", "--threshold", "30")[1]


def test_verify_limit_example():
    code, text = call("verify-limit", "--gamma", "0.5", "--q", "0.5", "--lambda", "1", "--n", "100,1000,10000")
    assert code == 0
    r = rows(text)
    assert r[0] == ["n", "sup_error"]
    errs = [float(x[1]) for x in r[1:]]
    assert [int(x[0]) for x in r[1:]] == [100, 1000, 10000]
    assert errs[0] > errs[1] > errs[2]


def test_stability_check():
    code, text = call("stability-check", "--gamma", "0.5", "--q", "0.3")
    assert code == 0
    r = rows(text)
    assert len(r) == 1 + 3 * 10
    assert max(float(x[4]) for x in r[1:]) < 1e-12


def test_fit_command():
    code, text = call("fit", "--dataset", "ex4")
    r = rows(text)
    assert code == 0
    assert r[1][0] == "ex4"
    assert float(r[1][2]) == pytest.approx(1 / 27.1)
    assert float(r[1][4]) > 0


def test_sample_is_seed_deterministic_across_workers():
    model = '{"family":"author","a":0.3,"p":0.6,"q":0.4}'
    a = call("sample", "--model", model, "--draws", "70000", "--seed", "3")[1]
    b = call("sample", "--model", model, "--draws", "70000", "--seed", "3", "--workers", "3")[1]
    c = call("sample", "--model", model, "--draws", "70000", "--seed", "4")[1]
    assert a == b
    assert a != c


def test_test_elite_command(tmp_path):
    out = tmp_path / "elite.csv"
    code, _ = call("test-elite", "--dataset", "ex1", "--reps", "99", "--seed", "1", "--output", str(out))
    assert code == 0
    r = rows(out.read_text())
    assert r[0][:4] == ["dataset", "n", "lr_statistic", "p_value"]
    p = float(r[1][3])
    assert 0 < p <= 1
    meta = json.loads((tmp_path / "elite.csv.json").read_text())
    assert meta["seed"] == 1 and meta["command"] == "test-elite"


def test_output_file_and_sidecar(tmp_path):
    out = tmp_path / "g.csv"
    code, printed = call("pmf", "--model", '{"family":"geometric","q":0.5}', "--max-k", "2", "-o", str(out))
    assert code == 0 and printed == ""
    assert out.read_text().startswith("k,probability\n")
    meta = json.loads((tmp_path / "g.csv.json").read_text())
    assert meta["config"]["model"] == {"family": "geometric", "q": 0.5}
    assert {"citetoy", "numpy", "scipy", "backend"} <= set(meta["versions"])
    # byte-identical reruns
    first = out.read_bytes(), (tmp_path / "g.csv.json").read_bytes()
    call("pmf", "--model", '{"family":"geometric","q":0.5}', "--max-k", "2", "-o", str(out))
    assert (out.read_bytes(), (tmp_path / "g.csv.json").read_bytes()) == first


@pytest.mark.parametrize("argv", [
    ["pmf", "--model", '{"family":"geometric","q":1.5}'],
    ["pmf", "--model", "{not json"],
    ["pmf", "--model", '{"family":"unknown"}'],
    ["pmf", "--model", '{"family":"elite","lambda":1,"gamma":0.5,"xi":{"kind":"atoms"}}'],
    ["pmf", "--model", '{"family":"geometric","q":0.5}', "--max-k", "-1"],
    ["sample", "--model", '{"family":"geometric","q":0.5}'],
    ["sample", "--model", '{"family":"discrete_stable","lambda":1,"gamma":0.5,"q":0.5}', "--seed", "1"],
    ["verify-limit", "--gamma", "0.5", "--q", "0.5", "--lambda", "2"],
    ["verify-limit", "--gamma", "0.5", "--q", "0.5", "--n", "100,10"],
    ["fit", "--dataset", "ex9"],
    ["test-elite", "--dataset", "ex1", "--reps", "10", "--seed", "1"],
    ["figures", "--dataset", "ex4", "--threshold", "3"],
    ["bogus"],
    [],
])
def test_validation_errors_exit_1_without_output(argv, tmp_path, capsys):
    out = tmp_path / "o.csv"
    code, printed = call(*argv, *(["--output", str(out)] if argv and argv[0] != "bogus" else []))
    assert code == 1
    assert printed == ""
    assert not out.exists() and not (tmp_path / "o.csv.json").exists()
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    record = json.loads(err[0])
    assert record["exit_code"] == 1 and record["message"]


def test_numerical_errors_exit_2(monkeypatch, capsys, tmp_path):
    from citetoy import cli
    from citetoy.errors import FitError

    def failing(args):
        raise FitError("no restart converged", [{"start": (0.0, 0.0)}])

    monkeypatch.setitem(cli.COMMANDS, "fit", failing)
    out = tmp_path / "f.csv"
    code, _ = call("fit", "--dataset", "ex1", "--output", str(out))
    assert code == 2
    assert not out.exists()
    record = json.loads(capsys.readouterr().err)
    assert record == {"error": "FitError", "message": "no restart converged", "exit_code": 2}


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "citetoy", "pmf", "--model", '{"family":"geometric","q":0.5}', "--max-k", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "k,probability\n0,0.5\n1,0.25\n"
    bad = subprocess.run([sys.executable, "-m", "citetoy", "pmf", "--model", "[]"], capture_output=True, text=True)
    assert bad.returncode == 1
    assert json.loads(bad.stderr)["exit_code"] == 1
