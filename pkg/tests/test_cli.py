import json
import subprocess
import sys

import pytest

from diamest import dataio
from diamest.cli import main
from diamest.core import Dataset

FAST = ["--warmup", "2000", "--thinning", "20"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, d in {
        "one": Dataset.from_points([((1, 1), 1)]),
        "cube": Dataset.full_cube([1.0, 0.5, -0.2]),
        "sub": Dataset.from_points([((1, 1, -1), 1), ((-1, 1, -1), -1), ((1, -1, -1), 1), ((-1, -1, -1), -1)]),
        "real": Dataset.from_points([((0.5, 1.5), 1)], space="real"),
        "clash": Dataset.from_points([((1, 1), 1), ((-1, -1), 1)]),
    }.items():
        paths[name] = tmp_path / f"{name}.jsonl"
        dataio.dump(d, paths[name])
    return paths


def test_gen_writes_dataset_and_sidecar(tmp_path, capsys):
    out = tmp_path / "bad.jsonl"
    assert run(capsys, "gen", "--kind", "bad", "--n", 10, "--k", 8, "--seed", 7, "--out", out)[0] == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 8
    d = dataio.load(out)
    rows = {tuple(x) for x in d.X}
    assert all(tuple(-x) in rows for x in d.X)
    side = json.loads((tmp_path / "bad.meta.json").read_text())
    assert side["kind"] == "bad" and side["seed"] == 7 and len(side["true_w"]) == 10
    first = out.read_bytes()
    run(capsys, "gen", "--kind", "bad", "--n", 10, "--k", 8, "--seed", 7, "--out", out)
    assert out.read_bytes() == first


def test_gen_usage_errors(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--kind", "bad", "--n", 4, "--k", 3, "--out", tmp_path / "x.jsonl")
    assert code == 1 and err.count("\n") == 1
    assert run(capsys, "gen", "--kind", "good", "--n", 4, "--k", 2)[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys)[0] == 1


def test_oracle_uni_example(files, capsys):
    code, out, _ = run(capsys, "oracle", "--input", files["one"], "--dist", "uni")
    rep = json.loads(out)
    assert code == 0 and rep["diameter"] == 0.25 and rep["hypothesis_count"] == 2


def test_data_errors(files, tmp_path, capsys):
    assert run(capsys, "estimate", "--method", "angle", "--input", files["one"], "--t", 5, *FAST)[0] == 2
    assert run(capsys, "oracle", "--input", files["clash"], "--dist", "uni")[0] == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"x": [1, 0], "y": 1}\n')
    code, _, err = run(capsys, "oracle", "--input", bad, "--dist", "uni")
    assert code == 2 and err.startswith("diamest: data error") and err.count("\n") == 1
    assert run(capsys, "oracle", "--input", tmp_path / "missing.jsonl", "--dist", "uni")[0] == 2


def test_estimate_planned_echo(files, capsys):
    code, out, _ = run(capsys, "estimate", "--method", "dir", "--input", files["one"], "--eps", 0.2, "--eta", 0.1,
                       *FAST)
    rep = json.loads(out)
    assert code == 0 and rep["params"]["m"] == 800 and rep["params"]["l"] == 1091
    assert rep["duration_ms"] is None


def test_estimate_fourier_full_cube(files, capsys):
    code, out, _ = run(capsys, "estimate", "--method", "fourier", "--input", files["cube"], "--a", 3)
    assert code == 0 and json.loads(out)["diameter"] == 0


def test_estimate_infeasible_plan(files, capsys):
    code, _, err = run(capsys, "estimate", "--method", "dir", "--input", files["one"], "--eps", 0.1, "--eta", 0.1,
                       "--c", 8, *FAST)
    assert code != 0 and "c" in err


def test_structure_orbits(files, capsys):
    code, out, _ = run(capsys, "structure", "orbits", "--input", files["sub"], "--format", "csv")
    rows = out.strip().splitlines()
    assert code == 0 and len(rows) == 1 + 2  # header + q + 1 with q = 1


COMMANDS = [
    ["estimate", "--method", "dir", "--input", "{one}", "--m", 50, "--l", 20, *FAST],
    ["estimate", "--method", "alt", "--input", "{one}", "--r", 20, "--s", 10, *FAST],
    ["estimate", "--method", "alt", "--input", "{one}", "--r", 20, "--s", 10, "--shared-pool", *FAST],
    ["estimate", "--method", "dir", "--input", "{one}", "--adaptive", *FAST],
    ["estimate", "--method", "angle", "--input", "{real}", "--t", 30, *FAST],
    ["estimate", "--method", "fourier", "--input", "{cube}", "--a", 2],
    ["oracle", "--input", "{one}", "--dist", "uni"],
    ["oracle", "--input", "{one}", "--dist", "vol", "--heavy-samples", 200, *FAST],
    ["structure", "orbits", "--input", "{sub}"],
    ["structure", "estimate", "--input", "{sub}", "--full", "--pairs", 100, *FAST],
    ["structure", "estimate", "--input", "{sub}", "--trunc-c", 1, "--pairs", 100, *FAST],
    ["experiment", "bag", "--n", 4, "--k", 2, "--reps", 2, *FAST],
    ["experiment", "bag", "--n", 4, "--k", 2, "--reps", 1, "--format", "json", *FAST],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: " ".join(map(str, a[:4])))
def test_byte_identical_reruns(argv, files, capsys):
    argv = [str(a).format(**files) for a in argv]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0, first[2]
    assert first[1] == second[1] and first[1]


def test_bag_out_writes_summary(tmp_path, capsys):
    out = tmp_path / "bag.csv"
    assert run(capsys, "experiment", "bag", "--n", 4, "--k", 2, "--reps", 1, "--out", out, *FAST)[0] == 0
    assert out.read_text().startswith("kind,rep,seed,diameter,accuracy,batches,duration_ms\n")
    assert "good" in json.loads((tmp_path / "bag.summary.json").read_text())


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "diamest", "oracle", "--input", str(files["one"]), "--dist", "uni"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["diameter"] == 0.25
