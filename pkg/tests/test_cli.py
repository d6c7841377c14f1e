"""Command-line surface: outputs, exit codes, determinism, fault injection."""

import dataclasses
import io
import json

import pytest

from qspectral.cli import (EXIT_NUMERICAL, EXIT_OK, EXIT_PARSE,
                           EXIT_UNSUPPORTED, EXIT_VIOLATION, main)
from qspectral.errors import NumericalError
from qspectral.opmodel import Membership, classify


def run(argv, classify_fn=classify):
    out = io.StringIO()
    code = main(argv, stdout=out, classify_fn=classify_fn)
    return code, out.getvalue()


@pytest.fixture
def matrix_file(tmp_path):
    path = tmp_path / "identity.json"
    path.write_text(json.dumps(
        {"matrix": [[[1, 0, 0, 0], [0, 0, 0, 0]],
                    [[0, 0, 0, 0], [1, 0, 0, 0]]]}))
    return str(path)


@pytest.fixture
def shift_file(tmp_path):
    path = tmp_path / "shift.json"
    path.write_text(json.dumps(
        {"structured": {"shift_tails": [{"weight": 1}]}}))
    return str(path)


@pytest.fixture
def perturbed_file(tmp_path):
    path = tmp_path / "pert.json"
    path.write_text(json.dumps(
        {"structured": {
            "diagonal_families": [{"kind": "constant",
                                   "value": [1, 0, 0, 0]}],
            "perturbation": [[[[-1, 0, 0, 0]], [[1, 0, 0, 0]]]]}}))
    return str(path)


# -- spectrum ----------------------------------------------------------

def test_matrix_spectrum_csv(matrix_file):
    code, out = run(["spectrum", matrix_file])
    assert code == EXIT_OK
    assert out.splitlines() == ["u,s,multiplicity", "1.0,0.0,2"]


def test_structured_spectrum_single_set(shift_file):
    code, out = run(["spectrum", shift_file, "--set", "sigma_e"])
    assert code == EXIT_OK
    assert "# set: sigma_e" in out
    assert "CIRCLE" in out and "1.0" in out


def test_structured_spectrum_all_sets(shift_file):
    code, out = run(["spectrum", shift_file])
    assert code == EXIT_OK
    for name in ("sigma_s", "sigma_e", "sigma_rs", "ws", "bs", "sigma_k:-2"):
        assert f"# set: {name}" in out


def test_spectrum_out_files(shift_file, tmp_path):
    target = tmp_path / "regions.csv"
    code, _ = run(["spectrum", shift_file, "--set", "sigma_s",
                   "--set", "sigma_e", "--out", str(target)])
    assert code == EXIT_OK
    a = tmp_path / "regions_sigma_s.csv"
    b = tmp_path / "regions_sigma_e.csv"
    assert a.exists() and b.exists()
    assert "DISK" in a.read_text()
    assert "CIRCLE" in b.read_text()


def test_spectrum_grid_raster(shift_file):
    code, out = run(["spectrum", shift_file, "--set", "sigma_s", "--grid", "7"])
    assert code == EXIT_OK
    assert "# grid" in out
    grid = out.split("# grid\n", 1)[1].splitlines()
    assert grid[0] == "u,s,sigma_s,near_boundary"
    # 7 u-steps x 4 s-steps
    assert len(grid) == 1 + 7 * 4


def test_spectrum_delegated_set_needs_oracle(perturbed_file):
    code, _ = run(["spectrum", perturbed_file, "--set", "bs"])
    assert code == EXIT_UNSUPPORTED


def test_spectrum_delegated_set_with_oracle(perturbed_file):
    code, out = run(["spectrum", perturbed_file, "--set", "bs",
                     "--oracle", "--grid", "7"])
    assert code == EXIT_OK
    assert "verdict" in out
    assert "VANISHING" in out or "BOUNDED-AWAY" in out


# -- classify ----------------------------------------------------------

def test_classify_matrix(matrix_file):
    code, out = run(["classify", matrix_file, "--point", "1,0"])
    assert code == EXIT_OK
    assert "verdict: sigma_pS; dim ker R_q = 2" in out
    code, out = run(["classify", matrix_file, "--point", "3,0"])
    assert "verdict: resolvent" in out


def test_classify_structured(shift_file):
    code, out = run(["classify", shift_file, "--point", "1/2,0"])
    assert code == EXIT_OK
    assert "verdict: sigma_rS" in out
    assert "index: -2" in out
    assert "in ws: yes; in Bs: yes" in out
    assert "sigma_0: no" in out


def test_classify_with_oracle(shift_file):
    code, out = run(["classify", shift_file, "--point", "2,0", "--oracle"])
    assert code == EXIT_OK
    assert "oracle verdict: BOUNDED-AWAY" in out
    assert "agreement: ok" in out


def test_classify_oracle_disagreement_exits_one(shift_file):
    def wrong(op, p):
        cls = classify(op, p)
        return dataclasses.replace(cls, in_spectrum=Membership.OUT)
    code, out = run(["classify", shift_file, "--point", "0,0", "--oracle"],
                    classify_fn=wrong)
    assert code == EXIT_VIOLATION
    assert "DISAGREE" in out


# -- check -------------------------------------------------------------

def test_check_small_corpus():
    code, out = run(["check", "--corpus", "11,6"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "suite,cases,failures"
    assert all(line.endswith(",0") for line in lines[1:])
    assert any(line.startswith("oracle_agreement,") for line in lines[1:])


def test_check_single_operator_file(shift_file):
    code, out = run(["check", shift_file])
    assert code == EXIT_OK
    assert "suite,cases,failures" in out


def test_check_env_seed_override(monkeypatch):
    monkeypatch.delenv("QSPECTRAL_SEED", raising=False)
    code_a, out_a = run(["check", "--corpus", "7,6"])
    monkeypatch.setenv("QSPECTRAL_SEED", "7")
    code_b, out_b = run(["check", "--corpus", "5,6"])
    assert code_a == code_b == EXIT_OK
    assert out_a == out_b
    monkeypatch.setenv("QSPECTRAL_SEED", "not-a-number")
    code_c, _ = run(["check", "--corpus", "5,6"])
    assert code_c == EXIT_PARSE


def test_check_detects_sabotaged_classifier():
    def sabotaged(op, p):
        cls = classify(op, p)
        if cls.weyl is Membership.DELEGATED:
            return cls
        flipped = (Membership.OUT if cls.weyl is Membership.IN
                   else Membership.IN)
        return dataclasses.replace(cls, weyl=flipped)
    code, out = run(["check", "--corpus", "11,4"], classify_fn=sabotaged)
    assert code == EXIT_VIOLATION
    assert "counterexamples:" in out


# -- exit codes --------------------------------------------------------

def test_exit_parse_errors(tmp_path, shift_file):
    assert run(["spectrum", str(tmp_path / "missing.json")])[0] == EXIT_PARSE
    bad = tmp_path / "bad.json"
    bad.write_text("{]")
    assert run(["spectrum", str(bad)])[0] == EXIT_PARSE
    assert run(["classify", shift_file, "--point", "zzz"])[0] == EXIT_PARSE
    assert run(["classify", shift_file, "--point", "0,-1"])[0] == EXIT_PARSE
    assert run(["bogus-command"])[0] == EXIT_PARSE
    assert run(["check", "--corpus", "nope"])[0] == EXIT_PARSE


def test_exit_numerical_failure(shift_file):
    def broken(op, p):
        raise NumericalError("synthetic instability")
    code, _ = run(["classify", shift_file, "--point", "1/2,0"],
                  classify_fn=broken)
    assert code == EXIT_NUMERICAL


def test_spectrum_output_deterministic(shift_file):
    _, a = run(["spectrum", shift_file])
    _, b = run(["spectrum", shift_file])
    assert a == b
