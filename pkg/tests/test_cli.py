import json

import pytest

from expwalk.cli import main, parse_tgrid
from expwalk.errors import InvalidParameterError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_parse_tgrid():
    assert parse_tgrid("64:4096:x2") == [64, 128, 256, 512, 1024, 2048, 4096]
    assert parse_tgrid("10,20,40") == [10, 20, 40]
    with pytest.raises(InvalidParameterError):
        parse_tgrid("64:32:x2")
    with pytest.raises(InvalidParameterError):
        parse_tgrid("64:128:y2")


def test_spectrum_complete(capsys):
    code, payload = run_cli(capsys, "spectrum", "--graph", "complete:4")
    assert code == 0
    assert payload["expander"] is True
    assert payload["lambda_star"] == pytest.approx(1 / 3)
    assert payload["eigenvalues"][0] == pytest.approx(1.0)
    assert payload["eigenvalues"][1:] == pytest.approx([-1 / 3] * 3)


def test_spectrum_cycle_not_expander(capsys):
    code, payload = run_cli(capsys, "spectrum", "--graph", "cycle:4")
    assert code == 0
    assert payload["lambda_star"] == pytest.approx(1.0)
    assert payload["expander"] is False


def test_spectrum_malformed_file_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("4 3\n0 1\n")
    code = main(["spectrum", "--graph", f"file:{bad}"])
    assert code == 2


def test_curve_rejects_non_expander(capsys):
    code = main(
        ["tv-curve", "--graph", "cycle:4", "--labels", "bits:1010", "--tgrid", "16,32,64,128"]
    )
    assert code == 2


def test_lclt_curve_k4(capsys, tmp_path):
    code, payload = run_cli(
        capsys,
        "lclt-curve",
        "--graph",
        "complete:4",
        "--labels",
        "bits:1100",
        "--tgrid",
        "64:512:x2",
        "--out",
        str(tmp_path),
    )
    assert code == 0
    assert payload["bound_satisfied"] is True
    assert payload["slope"] < -1.0  # decays at least as fast as 1/t
    csv = (tmp_path / "lclt_curve.csv").read_text().splitlines()
    assert csv[0] == "t,value"
    assert len(csv) == 5


def test_sticky_compare_k4_metadata(capsys):
    code, payload = run_cli(
        capsys,
        "sticky-compare",
        "--graph",
        "complete:4",
        "--labels",
        "bits:1100",
        "--tgrid",
        "16,32,64,128",
    )
    assert code == 0
    assert payload["config"]["sticky_p"] == pytest.approx(-1 / 3)
    assert payload["bound_satisfied"] is True


def test_decomp_check_holds(capsys, tmp_path):
    code, payload = run_cli(
        capsys,
        "decomp-check",
        "--graph",
        "complete:4",
        "--labels",
        "bits:1100",
        "--t",
        "200",
        "--samples",
        "20000",
        "--seed",
        "42",
        "--trace-csv",
        "--out",
        str(tmp_path),
    )
    assert code == 0
    assert payload["k_star"]["k"] == 1
    assert all(r["holds"] for r in payload["reports"].values())
    traces = (tmp_path / "traces.csv").read_text().splitlines()
    assert traces[0] == "seed_index,n_t,n_tilde,b_t,s_prime,s_full,y,z"
    assert len(traces) == 20_001


def test_bounds_sweep(capsys):
    code, payload = run_cli(
        capsys,
        "bounds",
        "--graph",
        "random:8:3:seed=1",
        "--pairs",
        "10",
        "--chernoff",
        "5",
        "--binomial",
        "5",
        "--t",
        "64",
    )
    assert code == 0
    assert payload["all_hold"] is True
    assert payload["violations"] == []


def test_examples_k4(capsys):
    code, payload = run_cli(capsys, "examples", "--which", "k4", "--t", "128")
    assert code == 0
    assert payload["passed"] is True
    assert payload["variance_deviation"] <= 1e-6


def test_examples_uniform_small(capsys):
    code, payload = run_cli(
        capsys,
        "examples",
        "--which",
        "uniform",
        "--graph",
        "random:16:3:seed=2",
        "--t",
        "128",
        "--samples",
        "25",
        "--seed",
        "50",
    )
    assert code == 0
    assert payload["passed"] is True


def test_law_export(capsys, tmp_path):
    code, payload = run_cli(
        capsys,
        "law",
        "--graph",
        "complete:4",
        "--labels",
        "bits:1100",
        "--t",
        "2",
        "--out",
        str(tmp_path),
    )
    assert code == 0
    assert payload["mean"] == pytest.approx(1.0)
    rows = (tmp_path / "law.csv").read_text().splitlines()
    assert rows[0] == "k,probability"
    assert rows[1].startswith("0,0.1666666")
    code, payload = run_cli(capsys, "law", "--sticky", "0.0", "--t", "10")
    assert code == 0
    assert payload["variance"] == pytest.approx(2.5)
    assert main(["law", "--t", "4"]) == 2  # needs a source


def test_theorem_violation_exit_code(capsys, monkeypatch):
    from expwalk.report import BoundReport

    monkeypatch.setattr(
        "expwalk.decomp.concentration_check",
        lambda *a, **k: BoundReport(lhs=1.0, rhs=0.0, context="forced failure"),
    )
    code = main(
        [
            "decomp-check",
            "--graph",
            "complete:4",
            "--labels",
            "bits:1100",
            "--t",
            "48",
            "--samples",
            "10000",
            "--seed",
            "1",
        ]
    )
    capsys.readouterr()
    assert code == 1


def test_csv_determinism(tmp_path, capsys):
    args = [
        "lclt-curve",
        "--graph",
        "random:16:3:seed=1",
        "--labels",
        "balanced:seed=3",
        "--tgrid",
        "64:256:x2",
    ]
    for sub in ("a", "b"):
        code = main(args + ["--out", str(tmp_path / sub)])
        assert code == 0
        capsys.readouterr()
    assert (tmp_path / "a" / "lclt_curve.csv").read_bytes() == (
        tmp_path / "b" / "lclt_curve.csv"
    ).read_bytes()
    assert (tmp_path / "a" / "lclt_curve.json").read_bytes() == (
        tmp_path / "b" / "lclt_curve.json"
    ).read_bytes()
