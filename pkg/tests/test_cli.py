"""CLI behavior: JSON output, exit codes, guardrails, fault injection."""
import json

import pytest

from quasiq.harness.cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    return code, json.loads(out), err


def test_gap_constant_reject(capsys):
    code, obj, _ = run_json(capsys, "gap", "--problem", "constant-reject", "--input", "000")
    assert code == EXIT_OK
    assert obj["m"] == 3
    (report,) = obj["reports"]
    assert report["Delta"] == 4
    assert report["A"] == 0 and report["R"] == 8


def test_gap_reports_both_sides_of_a_pair(capsys):
    code, obj, _ = run_json(capsys, "gap", "--problem", "allzero", "--input", "00")
    assert code == EXIT_OK
    assert len(obj["reports"]) == 2
    assert obj["reports"][0]["Delta"] == 0  # v0 vanishes on the member 00
    assert obj["reports"][1]["Delta"] == 2


def test_simulate_zqp_outcome(capsys):
    code, obj, _ = run_json(
        capsys, "simulate", "--problem", "allzero", "--input", "00",
        "--construction", "fig3-zqp")
    assert code == EXIT_OK
    assert obj["verdict"] == "YES"
    assert obj["answer"] == 1
    assert "final_state" not in obj
    assert "checkpoints" not in obj


def test_simulate_dump_state_and_checkpoints(capsys):
    code, obj, _ = run_json(
        capsys, "simulate", "--problem", "allzero", "--input", "01",
        "--construction", "un", "--dump-state", "--checkpoints")
    assert code == EXIT_OK
    assert obj["verdict"] == "NO"
    assert {"psi_1", "psi_2", "psi_3"} <= set(obj["checkpoints"])
    assert all(len(entry["basis"]) == obj["width"] for entry in obj["final_state"])


def test_simulate_infers_n_from_input(capsys):
    code, obj, _ = run_json(
        capsys, "simulate", "--problem", "parity", "--input", "101",
        "--construction", "lwpp")
    assert code == EXIT_OK
    assert obj["verdict"] == "NO"


def test_verify_allzero_all_constructions(capsys):
    code, obj, _ = run_json(capsys, "verify", "--problem", "allzero", "--n", "2")
    assert code == EXIT_OK
    assert obj["ok"] is True
    constructions = {row["construction"] for row in obj["results"]}
    assert constructions == {"un", "fig3-zqp", "fig3-post", "wn", "lwpp", "lpwpp"}
    assert len(obj["results"]) == 6 * 4
    assert all(row["ok"] for row in obj["results"])


def test_verify_corrupted_h_names_the_input(capsys):
    code, obj, err = run_json(
        capsys, "verify", "--problem", "allzero", "--n", "2",
        "--construction", "lwpp", "--corrupt-h")
    assert code == EXIT_MISMATCH
    failing = [row for row in obj["results"] if not row["ok"]]
    assert failing and all(row["input"] in {"00", "01", "10", "11"} for row in failing)
    assert any("Residual" in row["detail"] for row in failing)
    assert "failed" in err


def test_verify_random_table_skips_deciders(capsys):
    code, obj, err = run_json(
        capsys, "verify", "--problem", "random-table", "--n", "2", "--seed", "3")
    assert code == EXIT_OK
    constructions = {row["construction"] for row in obj["results"]}
    assert "lwpp" not in constructions and "lpwpp" not in constructions
    assert "skipping" in err
    assert obj["seed"] == 3


def test_verify_explicit_lwpp_without_witness_is_usage_error(capsys):
    code, _, err = run_cli(
        capsys, "verify", "--problem", "random-table", "--n", "2",
        "--construction", "lwpp")
    assert code == EXIT_USAGE
    assert "half-gap witness" in err


def test_duals_builtin(capsys):
    code, obj, _ = run_json(capsys, "duals", "--problem", "allzero", "--n", "2")
    assert code == EXIT_OK
    assert obj["ok"] is True
    assert all(row["dual"] and row["h_matches"] for row in obj["rows"])


def test_duals_detects_invalid_pair(tmp_path, capsys):
    spec = {
        "name": "not-dual",
        "n": {"min": 1, "max": 2},
        "m": {"affine": {"a": 0, "b": 2}},
        "verifier": {"kind": "dsl", "v0": "b[0]", "v1": "b[0]"},
        "dual": "given-pair",
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    code, obj, _ = run_json(capsys, "duals", "--problem", str(path), "--n", "2")
    assert code == EXIT_MISMATCH
    assert not obj["ok"]
    assert all(not row["dual"] for row in obj["rows"])


def test_unknown_problem_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "gap", "--problem", "nope", "--input", "00")
    assert code == EXIT_USAGE
    assert "neither a builtin problem" in err


def test_bad_input_string_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "gap", "--problem", "allzero", "--input", "0x1")
    assert code == EXIT_USAGE
    assert "bit string" in err


def test_missing_n_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "verify", "--problem", "allzero")
    assert code == EXIT_USAGE
    assert "--n" in err


def test_verify_single_verifier_problem_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "verify", "--problem", "constant-reject", "--n", "2")
    assert code == EXIT_USAGE
    assert "dual pair" in err


def test_desk_scale_guardrail(capsys):
    code, _, err = run_cli(capsys, "verify", "--problem", "allzero", "--n", "18")
    assert code == EXIT_USAGE
    assert "force-large" in err


def test_compact_json_flag(capsys):
    code, out, _ = run_cli(
        capsys, "gap", "--problem", "balanced", "--input", "11", "--json")
    assert code == EXIT_OK
    assert out.count("\n") == 1
    assert json.loads(out)["reports"][0]["Delta"] == 0


def test_simulate_invalid_pair_is_usage_error(tmp_path, capsys):
    spec = {
        "name": "not-dual",
        "n": {"min": 1, "max": 1},
        "m": {"affine": {"a": 0, "b": 2}},
        "verifier": {"kind": "dsl", "v0": "b[0]", "v1": "b[0]"},
        "dual": "given-pair",
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    code, _, err = run_cli(
        capsys, "simulate", "--problem", str(path), "--input", "0",
        "--construction", "fig3-zqp")
    assert code == EXIT_USAGE
    assert "not dual" in err


def test_problem_spec_file_end_to_end(tmp_path, capsys):
    spec = {
        "name": "allzero-dsl",
        "n": {"min": 1, "max": 3},
        "m": {"affine": {"a": 1, "b": 0}},
        "verifier": {"kind": "dsl", "base": "parity(x & b)"},
        "h": {"kind": "power", "M": 2, "t": {"a": 1, "b": -1}},
        "dual": "derive-via-lemma",
    }
    path = tmp_path / "allzero.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    code, obj, _ = run_json(capsys, "verify", "--problem", str(path), "--n", "2")
    assert code == EXIT_OK
    assert obj["ok"] is True


def test_gap_output_round_trips(capsys):
    from quasiq.verifierkit import GapReport

    code, obj, _ = run_json(capsys, "gap", "--problem", "parity", "--input", "10")
    assert code == EXIT_OK
    for report in obj["reports"]:
        rebuilt = GapReport.from_json(report)
        assert rebuilt.to_json() == report
