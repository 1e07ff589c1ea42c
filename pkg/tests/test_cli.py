import json

import pytest

from cyclecoh.cli import main, parse_coeff
from cyclecoh.cycleset import ParameterDomainError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_coeff():
    assert parse_coeff("2,4") == (2, 4)
    assert parse_coeff("0") == (0,)
    with pytest.raises(ParameterDomainError):
        parse_coeff("two")
    with pytest.raises(ParameterDomainError):
        parse_coeff("-3")


def test_cohomology_json_report(capsys):
    code, out, err = run_cli(
        capsys,
        "cohomology", "--p", "2", "--nu", "1", "--eta", "2",
        "--coeff", "2", "--degree", "2", "--method", "all",
    )
    assert code == 0
    report = json.loads(out)
    assert report["agreement"]["all"] is True
    by_method = {r["method"]: r["invariant_factors"] for r in report["results"]}
    assert by_method["full"] == [2, 2, 2]
    assert by_method["reduced"] == [2, 2, 2]
    assert by_method["closed"] == [2, 2, 2]
    assert report["version"]
    assert "timing_seconds" not in report


def test_cohomology_h1_example(capsys):
    code, out, _ = run_cli(
        capsys,
        "cohomology", "--p", "3", "--nu", "1", "--eta", "1",
        "--coeff", "9", "--degree", "1",
    )
    assert code == 0
    report = json.loads(out)
    assert all(r["invariant_factors"] == [3] for r in report["results"])


def test_reports_are_byte_identical(capsys):
    argv = [
        "cohomology", "--p", "2", "--nu", "1", "--eta", "1",
        "--coeff", "2,4", "--degree", "2",
    ]
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    # round-trip: the report parses back losslessly
    assert json.dumps(json.loads(out1), sort_keys=True, separators=(",", ":")) + "\n" == out1


def test_coefficients_are_normalized_in_echo(capsys):
    code, out, _ = run_cli(
        capsys,
        "cohomology", "--p", "2", "--nu", "1", "--eta", "1",
        "--coeff", "2,3", "--degree", "1",
    )
    assert code == 0
    report = json.loads(out)
    assert report["job"]["coeff"] == [6]


def test_parameter_domain_error_exit_2(capsys):
    code, out, err = run_cli(
        capsys,
        "cohomology", "--p", "4", "--nu", "1", "--eta", "1", "--coeff", "2",
    )
    assert code == 2
    payload = json.loads(err)
    assert payload["error"]["type"] == "parameter-domain"

    code, out, err = run_cli(
        capsys,
        "cohomology", "--p", "2", "--nu", "1", "--eta", "3", "--coeff", "2",
    )
    assert code == 2


def test_extensions_brute_example(capsys):
    code, out, _ = run_cli(
        capsys,
        "extensions", "--p", "2", "--nu", "1", "--eta", "1",
        "--coeff", "2", "--enumerate", "--method", "brute",
    )
    assert code == 0
    report = json.loads(out)
    assert report["results"][0]["classes"] == 4
    assert len(report["results"][0]["representatives"]) == 4
    assert report["agreement"]["all"] is True


def test_extensions_all_methods_agree(capsys):
    code, out, _ = run_cli(
        capsys,
        "extensions", "--p", "2", "--nu", "1", "--eta", "1",
        "--coeff", "4", "--method", "all",
    )
    assert code == 0
    report = json.loads(out)
    assert report["agreement"]["theorem=brute"] is True


def test_tsv_row_format(capsys):
    code, out, _ = run_cli(
        capsys,
        "cohomology", "--p", "2", "--nu", "1", "--eta", "2",
        "--coeff", "2", "--degree", "2", "--output", "tsv",
    )
    assert code == 0
    first = out.splitlines()[0]
    assert first == "2\t1\t2\t[2]\t2\t[2,2,2]\tall-agree"


def test_verify_command(capsys):
    code, out, _ = run_cli(
        capsys,
        "verify", "--p", "2", "--nu", "1", "--eta", "2", "--coeff", "2",
    )
    assert code == 0
    report = json.loads(out)
    statuses = {r["suite"]: r["status"] for r in report["results"]}
    assert statuses["cycle-set-axioms"] == "pass"
    assert statuses["route-agreement"] == "pass"


def test_table_command(capsys):
    code, out, _ = run_cli(
        capsys,
        "table", "--max-v", "4", "--coeff", "2", "--output", "json",
    )
    assert code == 0
    report = json.loads(out)
    keys = {(r["p"], r["nu"], r["eta"], r["degree"]) for r in report["results"]}
    assert (2, 1, 2, 2) in keys
    assert (3, 1, 1, 1) in keys


def test_emit_round_trip_from_report_object():
    from cyclecoh.cli import JobSpec, emit, run

    spec = JobSpec(
        command="cohomology", p=2, nu=1, eta=1, coeff=(2,), degree=1, method="closed"
    )
    report = run(spec)
    rendered = emit(report, "json")
    data = json.loads(rendered)
    assert data["results"][0]["invariant_factors"] == [2]
    assert emit(report, "json") == rendered


def test_timing_flag_is_opt_in(capsys):
    argv = [
        "cohomology", "--p", "2", "--nu", "1", "--eta", "1",
        "--coeff", "2", "--degree", "1", "--timing",
    ]
    code, out, _ = run_cli(capsys, *argv)
    assert code == 0
    assert "timing_seconds" in json.loads(out)
