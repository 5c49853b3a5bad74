import json

import numpy as np
import pytest

from maxprob import cli
from maxprob.data import load_csv
from maxprob.lp import LpProblem, dump_problem


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def halfspace_csv(tmp_path):
    path = tmp_path / "h.csv"
    assert run("synth", "halfspace", "--class", 300, "--other", 750, "--dim", 2, "--seed", 1,
               "--output", path) == 0
    return path


def test_synth_counts_and_bytes(tmp_path, halfspace_csv):
    d = load_csv(halfspace_csv, label_col=0)
    assert len(d) == 1050 and d.truth.sum() == 300
    again = tmp_path / "again.csv"
    run("synth", "halfspace", "--class", 300, "--other", 750, "--dim", 2, "--seed", 1, "--output", again)
    assert again.read_bytes() == halfspace_csv.read_bytes()
    ring = tmp_path / "r.csv"
    assert run("synth", "ring", "--class", 450, "--other", 600, "--seed", 1, "--output", ring) == 0
    assert len(load_csv(ring, label_col=0)) == 1050


def test_synth_bad_generator(tmp_path, capsys):
    assert run("synth", "spiral", "--output", tmp_path / "x.csv") == 1
    assert "unknown generator" in capsys.readouterr().err


def test_classify_and_replay(tmp_path, halfspace_csv):
    out = tmp_path / "o.csv"
    code = run("classify", "--mode", "linear", "--input", halfspace_csv, "--label-col", 0,
               "--l", 100, "--seed", 7, "--output", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "index,fuzzy,label" and len(lines) == 1051
    manifest = tmp_path / "o.csv.manifest.json"
    record = json.loads(manifest.read_text())
    assert record["command"] == "classify" and record["resolved"]["mode_config"]["mode"] == "linear"
    first = out.read_bytes()
    out.unlink()
    assert run("replay", manifest) == 0
    assert out.read_bytes() == first


def test_classify_with_index_file(tmp_path, halfspace_csv):
    d = load_csv(halfspace_csv, label_col=0)
    idx = np.flatnonzero(d.truth)[:40]
    (tmp_path / "idx.txt").write_text("\n".join(map(str, idx)))
    out = tmp_path / "o.csv"
    assert run("classify", "--input", halfspace_csv, "--label-col", 0, "--labeled", tmp_path / "idx.txt",
               "--mode", "second-order", "--output", out) == 0
    labels = [int(line.split(",")[2]) for line in out.read_text().splitlines()[1:]]
    assert all(labels[i] == 1 for i in idx)


def test_classify_missing_input(tmp_path, capsys):
    assert run("classify", "--input", tmp_path / "nope.csv", "--l", 3, "--output", tmp_path / "o.csv") == 1
    assert "not found" in capsys.readouterr().err


def test_classify_usage_errors(tmp_path, halfspace_csv):
    out = tmp_path / "o.csv"
    assert run("classify", "--input", halfspace_csv, "--output", out) == 1
    assert run("classify", "--input", halfspace_csv, "--l", 5, "--output", out) == 1
    assert run("classify", "--input", halfspace_csv, "--label-col", 0, "--l", 5, "--threshold", 2,
               "--output", out) == 1
    assert run("classify", "--input", halfspace_csv, "--label-col", 0, "--l", 5000, "--output", out) == 1
    assert not out.exists()


def test_classify_infeasible_exit_code(tmp_path, capsys):
    # point 0 is pinned at 1 but the external sample's mean sits far to its right
    data = tmp_path / "d.csv"
    data.write_text("x\n0\n1\n")
    (tmp_path / "idx.txt").write_text("0")
    (tmp_path / "s.csv").write_text("x\n5\n")
    code = run("classify", "--input", data, "--labeled", tmp_path / "idx.txt", "--sample", tmp_path / "s.csv",
               "--epsilon", 0, "--output", tmp_path / "o.csv")
    assert code == 2
    assert "residual" in capsys.readouterr().err


def test_classify_external_sample(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("x\n-3\n1\n1\n")
    (tmp_path / "s.csv").write_text("x\n-1\n1\n")
    out = tmp_path / "o.csv"
    assert run("classify", "--input", data, "--sample", tmp_path / "s.csv", "--epsilon", 0,
               "--output", out) == 0
    assert out.read_text().splitlines()[1:] == ["0,0.666666667,1", "1,1,1", "2,1,1"]


def test_experiment_counts_and_determinism(tmp_path, halfspace_csv, monkeypatch):
    args = ["experiment", "--input", halfspace_csv, "--label-col", 0, "--sizes", "50:100:50",
            "--reps", 5, "--seed", 3, "--t-size", 500, "--s-size", 0]
    assert run(*args, "--output", tmp_path / "a.csv", "--threads", 1) == 0
    monkeypatch.setenv("MAXPROB_THREADS", "4")
    assert run(*args, "--output", tmp_path / "b.csv") == 0
    a, b = (tmp_path / "a.csv").read_bytes(), (tmp_path / "b.csv").read_bytes()
    assert a == b
    assert len(a.decode().splitlines()) == 11
    assert (tmp_path / "a.aggregate.csv").read_bytes() == (tmp_path / "b.aggregate.csv").read_bytes()
    (tmp_path / "a.csv").unlink()
    assert run("replay", tmp_path / "a.csv.manifest.json") == 0
    assert (tmp_path / "a.csv").read_bytes() == b


def test_experiment_needs_truth(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("1,2\n3,4\n")
    assert run("experiment", "--input", data, "--output", tmp_path / "r.csv") == 1


def test_solve_subcommand(tmp_path, capsys):
    prob = LpProblem.box(np.ones(3), [[-3.0, 1.0, 1.0]], [0.0], [0.0])
    dump_problem(prob, tmp_path / "p.txt")
    assert run("solve", tmp_path / "p.txt", "--output", tmp_path / "v.txt") == 0
    out = capsys.readouterr().out
    assert "status OPTIMAL" in out and "objective 2.66666667" in out
    assert (tmp_path / "v.txt").read_text().splitlines() == ["0.666666667", "1", "1"]
    infeasible = LpProblem.box(np.ones(2), [[1.0, 1.0]], [-2.0], [-1.0])
    dump_problem(infeasible, tmp_path / "q.txt")
    assert run("solve", tmp_path / "q.txt") == 2
    (tmp_path / "bad.txt").write_text("nonsense\n")
    assert run("solve", tmp_path / "bad.txt") == 1


def test_unknown_flag_is_usage_error(capsys):
    assert run("synth", "halfspace", "--bogus") == 1
