"""CLI behaviour: JSON output, exit codes, file artifacts and manifests."""

import json

import pytest
from click.testing import CliRunner

from implaus.cli import main, parse_null
from implaus.intervals import IntervalSet


@pytest.fixture
def runner():
    return CliRunner()


def _json(result):
    return json.loads(result.output)


# ---- null mini-grammar ---------------------------------------------------

def test_parse_null_forms():
    amb = IntervalSet.real_line()
    le = parse_null("theta<=0.5", amb)
    assert le.contains(-3.0) and le.contains(0.5) and not le.contains(0.6)
    ge = parse_null("theta>=0.5", amb)
    assert ge.contains(0.5) and not ge.contains(0.4)
    eq = parse_null("theta==0.5", amb)
    assert eq.set == IntervalSet.point(0.5)
    box = parse_null("0.2<=theta<=0.4", amb)
    assert box.set == IntervalSet.closed(0.2, 0.4)


def test_parse_null_rejects_garbage():
    import click
    with pytest.raises(click.BadParameter):
        parse_null("theta between 0 and 1", IntervalSet.real_line())
    with pytest.raises(click.BadParameter):
        parse_null("0.5<=theta<=0.2", IntervalSet.real_line())


# ---- pval -------------------------------------------------------------------

def test_pval_variance_golden(runner):
    result = runner.invoke(main, [
        "pval", "--model", "normal-variance", "--n", "20",
        "--s2", "0.79", "--sigma0-sq", "1"])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["schema"] == "implaus.pval/1"
    assert payload["pvalue"] == pytest.approx(0.72, abs=0.005)  # [PAPER]
    assert payload["plausibility"] == pytest.approx(payload["pvalue"], abs=1e-12)


def test_pval_binomial_strict(runner):
    result = runner.invoke(main, [
        "pval", "--model", "binomial", "--n", "5",
        "--theta0", "0.5", "--x", "3", "--tail", "strict"])
    assert result.exit_code == 0
    assert _json(result)["pvalue"] == pytest.approx(0.1875, abs=1e-12)  # [DERIVED]


def test_pval_composite_null_grammar(runner):
    result = runner.invoke(main, [
        "pval", "--model", "binomial", "--n", "5",
        "--null", "theta<=0.5", "--x", "3", "--tail", "weak"])
    assert result.exit_code == 0
    assert _json(result)["pvalue"] == pytest.approx(0.5, abs=1e-12)


def test_pval_constrained_refusal_exit_3(runner):
    result = runner.invoke(main, [
        "pval", "--model", "normal-mean-constrained", "--n", "1",
        "--x", "-1", "--theta0", "0"])
    assert result.exit_code == 3
    payload = _json(result)
    assert payload["error"] == "empty-focal-set"
    # the dominant empty-focal component is (1/2, 1] with measure 1/2
    lo, hi, lo_closed, hi_closed = payload["empty_focal_u_set"][-1]
    assert (lo, hi) == (0.5, 1.0)
    assert not lo_closed and hi_closed
    assert hi - lo == pytest.approx(0.5, abs=1e-12)


def test_pval_missing_null_exit_2(runner):
    result = runner.invoke(main, [
        "pval", "--model", "binomial", "--n", "5", "--x", "3"])
    assert result.exit_code == 2


def test_pval_seed_env_override(runner, monkeypatch):
    monkeypatch.setenv("IMPLAUS_SEED", "77")
    result = runner.invoke(main, [
        "pval", "--model", "binomial", "--n", "5",
        "--theta0", "0.5", "--x", "3"])
    assert _json(result)["seed"] == 77


# ---- curve ---------------------------------------------------------------------

def test_curve_writes_csv_svg_and_manifest(runner, tmp_path):
    out = tmp_path / "curve.csv"
    result = runner.invoke(main, [
        "curve", "--model", "normal-variance", "--n", "20", "--s2", "0.79",
        "--grid-lo", "0.3", "--grid-hi", "3", "--grid-points", "30",
        "--out", str(out)])
    assert result.exit_code == 0
    assert out.exists()
    svg = tmp_path / "curve.svg"
    assert svg.exists() and svg.read_text().lstrip().startswith("<?xml")
    manifest = json.loads((tmp_path / "curve.manifest.json").read_text())
    assert manifest["command"] == "curve"
    assert str(out) in manifest["outputs"]

    lines = out.read_text().strip().splitlines()
    assert lines[0] == "theta0,plausibility"
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
    assert len(rows) == 30
    # monotone increasing in sigma0^2 over this grid
    pls = [r[1] for r in rows]
    assert all(a <= b for a, b in zip(pls, pls[1:]))


def test_curve_matches_pval_spot_checks(runner, tmp_path):
    out = tmp_path / "c.csv"
    runner.invoke(main, [
        "curve", "--model", "normal-variance", "--n", "20", "--s2", "0.79",
        "--grid-lo", "0.5", "--grid-hi", "2.0", "--grid-points", "10",
        "--out", str(out), "--no-svg"])
    rows = [ln.split(",") for ln in out.read_text().strip().splitlines()[1:]]
    for theta0, pl in rows:
        res = runner.invoke(main, [
            "pval", "--model", "normal-variance", "--n", "20",
            "--s2", "0.79", "--sigma0-sq", theta0])
        assert _json(res)["pvalue"] == pytest.approx(float(pl), abs=1e-12)


def test_curve_single_point_grid(runner, tmp_path):
    out = tmp_path / "one.csv"
    result = runner.invoke(main, [
        "curve", "--model", "normal-variance", "--n", "20", "--s2", "0.79",
        "--grid-lo", "1.0", "--grid-hi", "1.0", "--grid-points", "1",
        "--out", str(out), "--no-svg"])
    assert result.exit_code == 0
    assert len(out.read_text().strip().splitlines()) == 2


def test_curve_empty_grid_exit_2(runner, tmp_path):
    result = runner.invoke(main, [
        "curve", "--model", "normal-variance", "--n", "20", "--s2", "0.79",
        "--grid-lo", "2.0", "--grid-hi", "1.0", "--out", str(tmp_path / "x.csv")])
    assert result.exit_code == 2


# ---- region ----------------------------------------------------------------------

def test_region_variance_lower_bound(runner):
    result = runner.invoke(main, [
        "region", "--model", "normal-variance", "--n", "20", "--s2", "0.79",
        "--alpha", "0.1", "--grid-lo", "0.1", "--grid-hi", "10"])
    assert result.exit_code == 0
    assert _json(result)["lower"] == pytest.approx(0.5518, abs=1e-3)  # [DERIVED]


def test_region_alpha_out_of_range_exit_2(runner):
    result = runner.invoke(main, [
        "region", "--model", "normal-variance", "--n", "20", "--s2", "0.79",
        "--alpha", "1.5", "--grid-lo", "0.1", "--grid-hi", "10"])
    assert result.exit_code == 2


def test_regions_nest(runner):
    def region(alpha):
        res = runner.invoke(main, [
            "region", "--model", "normal-variance", "--n", "20", "--s2", "0.79",
            "--alpha", str(alpha), "--grid-lo", "0.1", "--grid-hi", "10"])
        return _json(res)
    r10, r20 = region(0.1), region(0.2)
    assert r10["lower"] <= r20["lower"]
    assert r10["upper"] >= r20["upper"]


# ---- validate ---------------------------------------------------------------------

def test_validate_pass_exit_0(runner):
    result = runner.invoke(main, [
        "validate", "--model", "binomial", "--n", "20", "--null", "theta<=0.5",
        "--theta", "0.5", "--reps", "20000", "--seed", "0", "--tail", "weak"])
    assert result.exit_code == 0
    assert _json(result)["passed"] is True


def test_validate_negative_control_exit_4(runner):
    result = runner.invoke(main, [
        "validate", "--model", "normal-mean", "--n", "1", "--null", "theta<=0",
        "--theta", "0", "--reps", "20000", "--seed", "0", "--negative-control"])
    assert result.exit_code == 4
    assert _json(result)["passed"] is False


def test_validate_zero_reps_exit_2(runner):
    result = runner.invoke(main, [
        "validate", "--model", "binomial", "--n", "20", "--null", "theta<=0.5",
        "--theta", "0.5", "--reps", "0"])
    assert result.exit_code == 2


def test_validate_theta_outside_null_exit_2(runner):
    result = runner.invoke(main, [
        "validate", "--model", "binomial", "--n", "20", "--null", "theta<=0.5",
        "--theta", "0.7", "--reps", "100"])
    assert result.exit_code == 2


def test_validate_reproducible(runner):
    args = ["validate", "--model", "normal-variance", "--n", "20",
            "--null", "theta<=1.0", "--theta", "1.0", "--reps", "5000", "--seed", "4"]
    a = _json(runner.invoke(main, args))
    b = _json(runner.invoke(main, args))
    assert a == b


# ---- coherence ---------------------------------------------------------------------

def test_coherence_command(runner, tmp_path):
    out = tmp_path / "coh.csv"
    result = runner.invoke(main, [
        "coherence", "--x-lo", "0", "--x-hi", "3", "--x-step", "0.05",
        "--out", str(out)])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["reversals_found"] >= 1
    assert payload["plausibility_monotone"] is True
    assert out.exists()
    assert (tmp_path / "coh.manifest.json").exists()


# ---- ingest -----------------------------------------------------------------------

def test_ingest_csv(runner, tmp_path):
    f = tmp_path / "vals.csv"
    f.write_text("1.0\n2.0\n3.0\n")
    result = runner.invoke(main, ["ingest", str(f)])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["n"] == 3
    assert payload["mean"] == pytest.approx(2.0)
    assert payload["s2"] == pytest.approx(1.0)


def test_ingest_json(runner, tmp_path):
    f = tmp_path / "vals.json"
    f.write_text("[0.5, 1.5, 2.5, 3.5]")
    result = runner.invoke(main, ["ingest", str(f)])
    assert _json(result)["n"] == 4


def test_ingest_single_value_exit_2(runner, tmp_path):
    f = tmp_path / "one.csv"
    f.write_text("3.14\n")
    assert runner.invoke(main, ["ingest", str(f)]).exit_code == 2


def test_ingest_non_numeric_exit_2(runner, tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("value\n1.0\nbanana\n")
    assert runner.invoke(main, ["ingest", str(f)]).exit_code == 2


def test_ingest_constant_column_warns(runner, tmp_path):
    f = tmp_path / "const.csv"
    f.write_text("2.0\n2.0\n2.0\n")
    result = runner.invoke(main, ["ingest", str(f)])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload["s2"] == 0.0
    assert payload["warnings"]


def test_pval_from_data_file(runner, tmp_path):
    # a 20-point dataset with sample variance exactly 0.79
    import numpy as np
    rngvals = np.array([0.0, 1.0] * 10)
    vals = (rngvals - rngvals.mean()) / rngvals.std(ddof=1) * (0.79 ** 0.5) + 5.0
    f = tmp_path / "wafer.csv"
    f.write_text("\n".join(repr(float(v)) for v in vals))
    result = runner.invoke(main, [
        "pval", "--model", "normal-variance", "--n", "20",
        "--data", str(f), "--sigma0-sq", "1"])
    assert result.exit_code == 0
    assert _json(result)["pvalue"] == pytest.approx(0.72, abs=0.005)
