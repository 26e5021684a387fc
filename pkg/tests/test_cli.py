import json
from importlib import resources

import numpy as np
import pytest

from sdlab.algebra import build_algebra
from sdlab.cli import main
from sdlab.serialization import dumps, supermap_to_json
from sdlab.supermap import from_function, identity_map

CORPUS = resources.files("sdlab") / "corpus"

EXPECTED_STATUS = {
    "verify_inner_pass.json": 0,
    "verify_identity_fail.json": 1,
    "malformed.json": 2,
    "construct_thm32_not_star.json": 2,
    "solve_identity_m2.json": 0,
    "solve_half_identity_star.json": 0,
    "construct_thm32_inner.json": 0,
    "construct_prop34_endomorphism.json": 0,
    "symmetrize_inner.json": 0,
    "semidirect_inner.json": 0,
    "example26_random.json": 0,
}


def run(argv, capsys):
    status = main(argv)
    out, err = capsys.readouterr()
    return status, out, err


def test_corpus_is_complete():
    assert sorted(p.name for p in CORPUS.iterdir() if p.name.endswith(".json")) == sorted(EXPECTED_STATUS)


@pytest.mark.parametrize("name", sorted(EXPECTED_STATUS))
def test_corpus_exit_status(name, capsys):
    status, out, err = run(["run", str(CORPUS / name)], capsys)
    assert status == EXPECTED_STATUS[name], err
    if status == 2:
        assert out == ""
        assert err.startswith("sdlab: ")
    else:
        report = json.loads(out)
        assert report["passed"] is (status == 0)
        assert set(report) >= {"command", "inputs", "tolerances", "residuals", "checks", "passed", "result"}


def test_malformed_reports_position(capsys):
    _, _, err = run(["run", str(CORPUS / "malformed.json")], capsys)
    assert "malformed.json:" in err
    line, col = err.split("malformed.json:")[1].split(":")[:2]
    assert line.strip().isdigit() and col.strip().isdigit()


def test_identity_fail_reports_leibniz(capsys):
    _, out, _ = run(["run", str(CORPUS / "verify_identity_fail.json")], capsys)
    report = json.loads(out)
    assert report["checks"]["leibniz"] is False
    assert report["residuals"]["leibniz"] == pytest.approx(1)


@pytest.fixture
def map_files(tmp_path):
    alg = build_algebra([2])
    X = np.array([[0, 1], [-1, 0]], dtype=complex)
    files = {
        "iota": identity_map(alg),
        "ad": from_function(alg, lambda A: X @ A - A @ X),
        "half": identity_map(alg) / 2,
    }
    paths = {}
    for name, m in files.items():
        path = tmp_path / f"{name}.json"
        path.write_text(dumps(supermap_to_json(m)))
        paths[name] = str(path)
    return paths


def test_verify_subcommand(map_files, capsys):
    status, out, _ = run(["verify", "--sigma", map_files["iota"], "--d", map_files["ad"]], capsys)
    assert status == 0
    report = json.loads(out)
    assert set(report["inputs"]) == {"sigma", "d"}
    status, _, _ = run(["verify", "--sigma", map_files["iota"], "--d", map_files["iota"]], capsys)
    assert status == 1


def test_verify_with_tau(map_files, capsys):
    argv = ["verify", "--sigma", map_files["iota"], "--tau", map_files["iota"], "--d", map_files["ad"]]
    status, out, _ = run(argv, capsys)
    assert status == 0
    assert "sigma_tau" in json.loads(out)["residuals"]


def test_solve_subcommand(map_files, capsys):
    status, out, _ = run(["solve", "--sigma", map_files["iota"]], capsys)
    assert status == 0
    assert json.loads(out)["result"]["dimension"] == 3
    status, out, _ = run(["solve", "--sigma", map_files["half"], "--star"], capsys)
    assert json.loads(out)["result"]["field"] == "real"


@pytest.mark.parametrize("method", ["thm32", "thm33", "prop34", "prop36"])
def test_construct_subcommand(method, map_files, capsys):
    argv = ["construct", "--method", method, "--sigma", map_files["iota"], "--d", map_files["ad"]]
    status, out, err = run(argv, capsys)
    assert status == 0, err
    report = json.loads(out)
    assert report["result"]["method"] == method
    assert "singular_values" in report


def test_symmetrize_subcommand(map_files, capsys):
    argv = ["symmetrize", "--sigma", map_files["iota"], "--tau", map_files["iota"], "--d", map_files["ad"]]
    status, _, _ = run(argv, capsys)
    assert status == 0


def test_example26_subcommand(capsys):
    status, out, _ = run(["example26", "--n", "9", "--alpha", "random", "--seed", "3"], capsys)
    assert status == 0
    report = json.loads(out)
    assert report["result"]["thm32_P_diagonal"] == [0, 0, 0, 0, 0, 1, 1, 1, 1]
    status, _, err = run(["example26", "--n", "8"], capsys)
    assert status == 2 and "4m + 1" in err


def test_semidirect_subcommand(map_files, capsys):
    argv = ["semidirect", "--sigma", map_files["iota"], "--d", map_files["ad"], "--norm-budget", "4"]
    status, out, _ = run(argv, capsys)
    assert status == 0
    assert len(json.loads(out)["result"]["phi_basis_norm_lower_bounds"]) == 4
    argv = ["semidirect", "--sigma", map_files["half"], "--d", map_files["ad"]]
    status, _, err = run(argv, capsys)
    assert status == 2 and "precondition" in err


def test_tolerance_flags_are_echoed(map_files, capsys):
    argv = ["verify", "--sigma", map_files["iota"], "--d", map_files["ad"], "--tol", "1e-6", "--rank-tol", "1e-10"]
    _, out, _ = run(argv, capsys)
    assert json.loads(out)["tolerances"] == {"identity_tol": 1e-6, "rank_tol_factor": 1e-10}
    status, _, _ = run(["verify", "--sigma", map_files["iota"], "--d", map_files["ad"], "--tol", "-1"], capsys)
    assert status == 2


def test_missing_file(tmp_path, capsys):
    status, _, err = run(["run", str(tmp_path / "absent.json")], capsys)
    assert status == 2 and "cannot read" in err


def test_spec_with_file_references(map_files, tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"command": "verify", "sigma": {"file": "iota.json"}, "d": {"file": "ad.json"}}))
    status, out, _ = run(["run", str(spec)], capsys)
    assert status == 0
    assert set(json.loads(out)["inputs"]) == {"spec", "sigma", "d"}


@pytest.mark.parametrize(
    "doc",
    [
        [1, 2],
        {"command": "launch"},
        {"command": "verify", "tolerances": {"loose": 1}},
        {"command": "verify", "sigma": {"algebra": {"blocks": [2]}, "images": []}},
        {"command": "solve"},
    ],
)
def test_invalid_specs(doc, tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(doc))
    status, out, err = run(["run", str(spec)], capsys)
    assert status == 2
    assert out == "" and err
