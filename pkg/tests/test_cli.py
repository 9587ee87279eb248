import json

import pytest

from app import route


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_no_arguments_is_a_usage_error(capsys):
    assert route([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_is_a_usage_error():
    assert route(["untangle"]) == 2


def test_missing_required_option_is_a_usage_error():
    assert route(["quantize", "--state", "psi.json"]) == 2


def test_ghz_fixture_then_heuristic_complexity(tmp_path, capsys):
    path = str(tmp_path / "ghz3.json")
    assert route(["gen-fixture", "ghz", "--n", "3", "--out", path]) == 0
    capsys.readouterr()
    assert route(["complexity", "--state", path, "--strategy", "heuristic"]) == 0
    record = _stdout_json(capsys)
    assert record["naive"] == 3
    assert record["quantum"] == 1
    assert record["manifest"]["subcommand"] == "complexity"
    assert path in record["manifest"]["input_digests"]


def test_h4_exhaustive_complexity(tmp_path, capsys):
    path = str(tmp_path / "h4.json")
    route(["gen-fixture", "paper_h4", "--out", path])
    capsys.readouterr()
    assert route(["complexity", "--ham", path]) == 0
    record = _stdout_json(capsys)
    assert record["quantum"] == 1
    assert record["witness"] == [0, 1, 3, 2]


def test_grover_n2(capsys):
    assert route(["grover", "--n", "2"]) == 0
    record = _stdout_json(capsys)
    assert record["success_iteration"] == 1
    assert record["iterations"] == 1
    assert not record["collapsed"]


def test_grover_csv_has_sidecar(tmp_path, capsys):
    path = tmp_path / "gsa.csv"
    assert route(["grover", "--n", "3", "--eps-min", "0.2", "--csv", str(path)]) == 0
    assert _stdout_json(capsys)["success_iteration"] == 1
    assert path.read_text().splitlines()[0].startswith("iter,")
    sidecar = json.loads((tmp_path / "gsa.csv.manifest.json").read_text())
    assert sidecar["outputs"] == [str(path)]


def test_symmetry_on_connected_fixture(tmp_path, capsys):
    ham, state = str(tmp_path / "hq.json"), str(tmp_path / "psi.json")
    route(["gen-fixture", "paper_hq", "--out", ham])
    route(["gen-fixture", "connected", "--ham", ham, "--seed", "1", "--out", state])
    capsys.readouterr()
    assert route(["symmetry", "--ham", ham, "--state", state, "--t", "0.7"]) == 0
    record = _stdout_json(capsys)
    assert record["connected"] and record["lemma_ok"] and record["equilibrium"]
    assert record["group_order"] == 2


def test_quantize_writes_quanta(tmp_path, capsys):
    state, op, out = str(tmp_path / "psi.json"), str(tmp_path / "x.json"), str(tmp_path / "quanta.json")
    route(["gen-fixture", "basis", "--n", "2", "--index", "0", "--out", state])
    route(["gen-fixture", "cnot", "--n", "2", "--out", op])
    capsys.readouterr()
    assert route(["quantize", "--state", state, "--op", op, "--eps", "0.5", "--trace", "0", "--out", out]) == 0
    record = _stdout_json(capsys)
    assert record["condition_q"]
    assert record["consistency_error"] == 0
    assert record["trajectory"]["b_fin"] == 0
    assert (tmp_path / "quanta.json.manifest.json").exists()


def test_domain_error_exits_one_with_json(tmp_path, capsys):
    state, op = str(tmp_path / "psi.json"), str(tmp_path / "a.json")
    route(["gen-fixture", "basis", "--n", "2", "--index", "0", "--out", state])
    route(["gen-fixture", "tavis_cummings", "--k", "1", "--n-max", "1", "--out", op])
    capsys.readouterr()
    assert route(["quantize", "--state", state, "--op", op, "--eps", "0.1"]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["code"]
    assert error["message"]


def test_missing_file_is_an_io_error(tmp_path, capsys):
    assert route(["complexity", "--state", str(tmp_path / "missing.json")]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["code"] == "io_error"


@pytest.mark.parametrize("argv", [["grover", "--n", "4", "--eps-min", "0.1"], ["estimate-q", "--n-max", "6", "--eps-min", "0.2"]])
def test_reruns_are_byte_identical(argv, capsys):
    route(argv)
    first = capsys.readouterr().out
    route(argv)
    assert capsys.readouterr().out == first


def test_quick_reproduce_writes_every_table(tmp_path, capsys):
    out_dir = tmp_path / "outputs"
    assert route(["reproduce", "--out-dir", str(out_dir), "--quick"]) == 0
    status = _stdout_json(capsys)["status"]
    assert all(line.endswith(": ok") for line in status), status
    assert (out_dir / "canonical.json").exists()
    assert (out_dir / "estimate_q.csv.manifest.json").exists()


def test_bad_fixture_parameter_exits_one(tmp_path, capsys):
    argv = ["gen-fixture", "tavis_cummings", "--k", "2", "--g", "0.1,x", "--out", str(tmp_path / "tc.json")]
    assert route(argv) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["code"] == "fixture_error"
