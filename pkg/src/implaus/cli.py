"""Command-line front end.

Subcommands: pval, curve, region, validate, coherence, ingest.  Every
command prints schema-versioned JSON to stdout; commands that write files
also drop a run manifest next to them so a run can be reproduced exactly.

Exit codes: 0 success, 2 bad arguments or configuration, 3 model refusal
(empty focal sets under a parameter constraint), 4 audit failure.
"""

from __future__ import annotations

import csv
import json
import math
import re
import sys
from pathlib import Path

import click
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .core import (
    Assertion,
    EmptyFocalSetError,
    one_sided_prs,
    plausibility_region,
    plausibility_value,
    symmetric_prs,
)
from .distributions import ParameterDomainError
from .engine import ConfigurationError, SupConfig, canonical_stat, pvalue, synthesize_pvalue_prs
from .models import make_model, sample_summary
from .validity import (
    audit_region_coverage,
    audit_uniformity,
    audit_validity,
    coherence_demo,
    distorted_prs,
)

SCHEMA_PREFIX = "implaus"
SCHEMA_VERSION = 1

_NULL_RE = re.compile(
    r"""^\s*(?:
        (?P<lo>[-+0-9.eE]+)\s*<=\s*theta\s*<=\s*(?P<hi>[-+0-9.eE]+)
      | theta\s*(?P<op><=|>=|==)\s*(?P<val>[-+0-9.eE]+)
    )\s*$""",
    re.VERBOSE,
)


def parse_null(text: str, ambient) -> Assertion:
    """Mini-grammar: 'theta<=0.5', 'theta>=0.5', 'theta==0.5', '0.2<=theta<=0.4'."""
    m = _NULL_RE.match(text)
    if m is None:
        raise click.BadParameter(
            f"cannot parse null {text!r}; expected theta<=V, theta>=V, "
            "theta==V or A<=theta<=B"
        )
    if m.group("lo") is not None:
        lo, hi = float(m.group("lo")), float(m.group("hi"))
        if lo > hi:
            raise click.BadParameter(f"empty null: {lo} > {hi}")
        return Assertion.interval(lo, hi, ambient)
    op, val = m.group("op"), float(m.group("val"))
    if op == "==":
        return Assertion.point(val, ambient)
    return Assertion.half_line(val, "le" if op == "<=" else "ge", ambient)


def _emit(schema: str, payload: dict) -> None:
    payload = {"schema": f"{SCHEMA_PREFIX}.{schema}/{SCHEMA_VERSION}", **payload}
    click.echo(json.dumps(payload, indent=2, sort_keys=False))


def _write_manifest(command: str, model: str, params: dict, data_source, seed,
                    tail: str, outputs: list[Path]) -> Path:
    anchor = outputs[0] if outputs else Path(f"{command}.json")
    path = anchor.with_name(anchor.stem + ".manifest.json")
    manifest = {
        "schema": f"{SCHEMA_PREFIX}.manifest/{SCHEMA_VERSION}",
        "command": command,
        "model": model,
        "params": params,
        "data_source": data_source,
        "seed": seed,
        "tail_convention": tail,
        "outputs": [str(p) for p in outputs],
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def _build(model: str, n, sigma, lo, hi):
    try:
        if model == "normal-mean":
            return make_model(model, n=n, sigma=sigma)
        if model == "normal-mean-constrained":
            return make_model(model, n=n, sigma=sigma, lo=lo, hi=hi)
        return make_model(model, n=n)
    except (ParameterDomainError, ValueError) as exc:
        raise click.UsageError(str(exc))


def _observation(m, model_name, x, s2, data):
    """Resolve the observed value, possibly by ingesting a data file."""
    if data is not None:
        values = _read_column(Path(data))
        n, mean, var = sample_summary(values)
        if n != m.n:
            raise click.UsageError(
                f"data file has n={n} but the model was built with n={m.n}; "
                f"pass --n {n}"
            )
        x, s2 = mean, var
    if model_name == "normal-variance":
        if s2 is None:
            raise click.UsageError("normal-variance needs --s2 (or --data)")
        return (m.n - 1) * s2
    if x is None:
        raise click.UsageError("missing observation: pass --x (or --data)")
    return float(x)


def _read_column(path: Path) -> list[float]:
    if not path.exists():
        raise click.UsageError(f"no such file: {path}")
    text = path.read_text().strip()
    if not text:
        raise click.UsageError(f"empty input file: {path}")
    values: list[float] = []
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise click.UsageError(f"bad JSON in {path}: {exc}")
        if not isinstance(raw, list):
            raise click.UsageError("JSON input must be a flat array of numbers")
        try:
            values = [float(v) for v in raw]
        except (TypeError, ValueError):
            raise click.UsageError("JSON input must contain only numbers")
    else:
        for row in csv.reader(text.splitlines()):
            if not row:
                continue
            cell = row[0].strip()
            if not cell:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                if not values:  # tolerate a single header line
                    continue
                raise click.UsageError(f"non-numeric cell {cell!r} in {path}")
    if not values:
        raise click.UsageError(f"no numeric values found in {path}")
    return values


def _model_options(f):
    opts = [
        click.option("--model", required=True,
                     type=click.Choice(["binomial", "normal-mean",
                                        "normal-variance", "normal-mean-constrained"])),
        click.option("--n", type=int, required=True, help="Sample size (binomial trials)."),
        click.option("--sigma", type=float, default=1.0, show_default=True,
                     help="Known sd for the normal-mean models."),
        click.option("--lo", type=float, default=-1.0, show_default=True,
                     help="Lower box bound (constrained mean)."),
        click.option("--hi", type=float, default=1.0, show_default=True,
                     help="Upper box bound (constrained mean)."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


@click.group()
def main():
    """Inferential models: plausibility, p-values, and validity audits."""


@main.command("pval")
@_model_options
@click.option("--x", type=float, default=None, help="Observed value (mean or count).")
@click.option("--s2", type=float, default=None, help="Sample variance (normal-variance).")
@click.option("--sigma0-sq", type=float, default=None, help="Point null sigma^2 value.")
@click.option("--theta0", type=float, default=None, help="Point null theta value.")
@click.option("--null", "null_text", default=None, help='e.g. "theta<=0.5".')
@click.option("--data", type=click.Path(), default=None, help="Raw observations file.")
@click.option("--tail", type=click.Choice(["strict", "weak"]), default="strict",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, envvar="IMPLAUS_SEED")
def cmd_pval(model, n, sigma, lo, hi, x, s2, sigma0_sq, theta0, null_text, data,
             tail, seed):
    """Classical p-value and the matching predictive-random-set plausibility."""
    m = _build(model, n, sigma, lo, hi)
    obs = _observation(m, model, x, s2, data)
    point = sigma0_sq if sigma0_sq is not None else theta0
    if null_text is not None:
        null = parse_null(null_text, m.param_space)
    elif point is not None:
        null = Assertion.point(float(point), m.param_space)
    else:
        raise click.UsageError("specify the null via --null, --theta0 or --sigma0-sq")
    if null.is_empty:
        raise click.UsageError("the null does not intersect the parameter space")

    cfg = SupConfig(seed=seed, tail=tail)
    stat = canonical_stat(m)
    try:
        ev = m.empty_focal_event(obs)
        if ev.measure() > 0.0:
            witness = 0.5 * (ev.parts[-1].lo + ev.parts[-1].hi)
            raise EmptyFocalSetError(obs, witness, ev.measure())
        pv = pvalue(m, stat, null, obs, cfg)
        t2 = synthesize_pvalue_prs(m, stat, null, cfg)
        pl = t2.null_plausibility(obs)
    except EmptyFocalSetError as exc:
        parts = [[iv.lo, iv.hi, iv.lo_closed, iv.hi_closed]
                 for iv in m.empty_focal_event(obs).parts]
        _emit("refusal", {
            "error": "empty-focal-set",
            "message": str(exc),
            "empty_focal_u_set": parts,
            "empty_focal_measure": exc.measure,
        })
        sys.exit(3)
    _emit("pval", {
        "pvalue": pv.plausibility,
        "plausibility": pl,
        "method": pv.method,
        "seed": seed,
        "tail": tail,
        "null": repr(null.set),
        "observation": obs,
        "manifest": {
            "command": "pval", "model": m.label,
            "params": {"n": n, "sigma": sigma}, "data_source": data or "inline",
            "seed": seed, "tail_convention": tail, "outputs": [],
        },
        "diagnostics": pv.diagnostics,
    })


@main.command("curve")
@_model_options
@click.option("--x", type=float, default=None)
@click.option("--s2", type=float, default=None)
@click.option("--data", type=click.Path(), default=None)
@click.option("--grid-lo", type=float, required=True)
@click.option("--grid-hi", type=float, required=True)
@click.option("--grid-points", type=int, default=100, show_default=True)
@click.option("--alpha", type=float, default=0.1, show_default=True,
              help="Reference line height on the figure.")
@click.option("--out", type=click.Path(), required=True, help="CSV output path.")
@click.option("--svg", "svg_path", type=click.Path(), default=None,
              help="Figure path; defaults to the CSV path with .svg.")
@click.option("--no-svg", is_flag=True, default=False)
@click.option("--tail", type=click.Choice(["strict", "weak"]), default="strict")
@click.option("--seed", type=int, default=0, envvar="IMPLAUS_SEED")
def cmd_curve(model, n, sigma, lo, hi, x, s2, data, grid_lo, grid_hi, grid_points,
              alpha, out, svg_path, no_svg, tail, seed):
    """Plausibility of the point null along a grid: CSV plus a line figure."""
    if grid_points < 1 or grid_hi < grid_lo:
        raise click.UsageError("empty grid")
    m = _build(model, n, sigma, lo, hi)
    obs = _observation(m, model, x, s2, data)
    cfg = SupConfig(seed=seed, tail=tail)
    stat = canonical_stat(m)
    grid = np.linspace(grid_lo, grid_hi, grid_points)
    rows = []
    for theta0 in grid:
        null = Assertion.point(float(theta0), m.param_space)
        if null.is_empty:
            raise click.UsageError(f"grid point {theta0:g} outside the parameter space")
        rows.append((float(theta0), pvalue(m, stat, null, obs, cfg).plausibility))

    out = Path(out)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta0", "plausibility"])
        for theta0, pl in rows:
            w.writerow([repr(theta0), repr(pl)])
    outputs = [out]

    if not no_svg:
        fig_path = Path(svg_path) if svg_path else out.with_suffix(".svg")
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot([r[0] for r in rows], [r[1] for r in rows], color="black")
        ax.axhline(alpha, linestyle="--", color="gray")
        ax.set_xlabel("null parameter value")
        ax.set_ylabel("plausibility")
        ax.set_ylim(0.0, 1.05)
        fig.savefig(fig_path, format=fig_path.suffix.lstrip(".") or "svg")
        plt.close(fig)
        outputs.append(fig_path)

    manifest = _write_manifest(
        "curve", m.label,
        {"n": n, "sigma": sigma, "grid": [grid_lo, grid_hi, grid_points],
         "alpha": alpha, "observation": obs},
        data or "inline", seed, tail, outputs)
    _emit("curve", {
        "rows": len(rows),
        "outputs": [str(p) for p in outputs],
        "manifest": str(manifest),
    })


@main.command("region")
@_model_options
@click.option("--x", type=float, default=None)
@click.option("--s2", type=float, default=None)
@click.option("--data", type=click.Path(), default=None)
@click.option("--alpha", type=float, default=0.1, show_default=True)
@click.option("--prs", type=click.Choice(["one-sided", "symmetric"]),
              default="one-sided", show_default=True)
@click.option("--grid-lo", type=float, required=True)
@click.option("--grid-hi", type=float, required=True)
@click.option("--grid-points", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, envvar="IMPLAUS_SEED")
def cmd_region(model, n, sigma, lo, hi, x, s2, data, alpha, prs, grid_lo, grid_hi,
               grid_points, seed):
    """Plausibility region {theta : pl({theta}) > alpha}."""
    if not 0.0 < alpha < 1.0:
        raise click.UsageError(f"alpha must be in (0, 1), got {alpha}")
    m = _build(model, n, sigma, lo, hi)
    obs = _observation(m, model, x, s2, data)
    s = one_sided_prs() if prs == "one-sided" else symmetric_prs()
    region = plausibility_region(m, obs, s, alpha, np.linspace(grid_lo, grid_hi, grid_points))
    _emit("region", {
        "alpha": alpha,
        "prs": s.label,
        "lower": region.infimum(),
        "upper": region.supremum(),
        "empty": region.is_empty,
        "observation": obs,
        "seed": seed,
    })


@main.command("validate")
@_model_options
@click.option("--null", "null_text", required=True, help='Audited assertion, e.g. "theta<=0.5".')
@click.option("--theta", type=float, required=True, help="True parameter for the simulation.")
@click.option("--reps", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, envvar="IMPLAUS_SEED")
@click.option("--tail", type=click.Choice(["strict", "weak"]), default="strict")
@click.option("--uniformity", is_flag=True, help="Also audit pl uniformity at --theta.")
@click.option("--coverage", is_flag=True, help="Also audit region coverage at --theta.")
@click.option("--alpha", type=float, default=0.1, show_default=True,
              help="Region level for --coverage.")
@click.option("--negative-control", is_flag=True,
              help="Distort the predictive random set's measure (should FAIL).")
@click.option("--out", type=click.Path(), default=None, help="Also write the JSON report here.")
def cmd_validate(model, n, sigma, lo, hi, null_text, theta, reps, seed, tail,
                 uniformity, coverage, alpha, negative_control, out):
    """Monte Carlo validity audit: P(pl <= alpha) <= alpha when the assertion is true."""
    if reps <= 0:
        raise click.UsageError(f"--reps must be positive, got {reps}")
    m = _build(model, n, sigma, lo, hi)
    a = parse_null(null_text, m.param_space)
    if not a.contains(theta):
        raise click.UsageError(f"theta={theta} does not satisfy the audited assertion")
    cfg = SupConfig(seed=seed, tail=tail)
    s = synthesize_pvalue_prs(m, canonical_stat(m), a, cfg).base
    if negative_control:
        s = distorted_prs(s)
    report = audit_validity(m, s, a, theta, reps, seed)
    payload = {"validity": json.loads(report.to_json()), "passed": report.passed}
    if uniformity:
        u = audit_uniformity(m, s, theta, reps, seed + 1)
        payload["uniformity"] = json.loads(u.to_json())
        payload["passed"] = payload["passed"] and u.passed
    if coverage:
        c = audit_region_coverage(m, s, alpha, theta, reps, seed + 2)
        payload["coverage"] = json.loads(c.to_json())
        payload["passed"] = payload["passed"] and c.passed
    _emit("validate", payload)
    if out is not None:
        out = Path(out)
        out.write_text(json.dumps(payload, indent=2) + "\n")
        _write_manifest("validate", m.label,
                        {"n": n, "sigma": sigma, "null": null_text, "theta": theta,
                         "reps": reps, "negative_control": negative_control},
                        "inline", seed, tail, [out])
    if not payload["passed"]:
        sys.exit(4)


@main.command("coherence")
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--null", "null_texts", multiple=True,
              help="Nested nulls, inner first; default: theta==0 and -0.82<=theta<=0.52.")
@click.option("--x-lo", type=float, default=0.0, show_default=True)
@click.option("--x-hi", type=float, default=3.0, show_default=True)
@click.option("--x-step", type=float, default=0.01, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write the full table as CSV.")
def cmd_coherence(n, sigma, null_texts, x_lo, x_hi, x_step, out):
    """Nested-null p-value reversals versus monotone single-IM plausibility."""
    m = make_model("normal-mean", n=n, sigma=sigma)
    if null_texts:
        nulls = [parse_null(t, m.param_space) for t in null_texts]
    else:
        nulls = [Assertion.point(0.0, m.param_space),
                 Assertion.interval(-0.82, 0.52, m.param_space)]
    steps = int(round((x_hi - x_lo) / x_step))
    xs = [x_lo + i * x_step for i in range(steps + 1)]
    report = coherence_demo(m, nulls, xs)
    outputs = []
    if out is not None:
        out = Path(out)
        with out.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x"] + [f"pvalue_{i}" for i in range(len(nulls))]
                       + [f"plausibility_{i}" for i in range(len(nulls))])
            for x, ps, pls in zip(report.x_grid, report.pvalues, report.plausibilities):
                w.writerow([repr(x)] + [repr(v) for v in ps] + [repr(v) for v in pls])
        outputs.append(out)
        _write_manifest("coherence", m.label,
                        {"n": n, "sigma": sigma,
                         "nulls": list(null_texts) or ["theta==0", "-0.82<=theta<=0.52"],
                         "x_grid": [x_lo, x_hi, x_step]},
                        "inline", 0, "strict", outputs)
    _emit("coherence", {
        "grid_points": len(report.x_grid),
        "reversals_found": len(report.reversals),
        "first_reversals": report.reversals[:5],
        "plausibility_monotone": report.plausibility_monotone,
        "outputs": [str(p) for p in outputs],
    })


@main.command("ingest")
@click.argument("file", type=click.Path())
def cmd_ingest(file):
    """Summarize a one-column CSV/JSON file: n, mean, S^2 (divisor n-1)."""
    values = _read_column(Path(file))
    if len(values) < 2:
        raise click.UsageError("need at least two observations to form S^2")
    n, mean, s2 = sample_summary(values)
    payload = {"n": n, "mean": mean, "s2": s2, "source": str(file)}
    if s2 == 0.0:
        payload["warnings"] = ["constant column: S^2 is exactly 0"]
    _emit("ingest", payload)


if __name__ == "__main__":
    main()
