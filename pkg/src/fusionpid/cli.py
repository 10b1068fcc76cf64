"""Command-line pipeline: ingestion, PID conversion, agreement, synthesis."""

import json
import sys
from importlib import resources

import click
import jsonschema
import numpy as np

from . import __version__
from .agreement import AgreementError, krippendorff_alpha, matrix_from_records, mean_confidence
from .dataset import (
    SchemaError,
    parse_counterfactual,
    parse_partial,
    parse_decomposition,
    triples_from_counterfactual,
    triples_from_partial,
)
from .info import DistributionError, Joint3
from .label_space import LabelSpaceError, build_label_space, encode
from .pid import OracleError, SolverConfig, brute_force_qstar, constraints_from_joint, pid_from_joint, pid_from_solution
from .synth import GATES, GateSpec, canonical_joint, sample


EXIT_NONCONVERGED = 1
EXIT_INPUT_ERROR = 2


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _fail(code, message):
    click.echo(json.dumps({"error": code, "message": message}), err=True)
    sys.exit(EXIT_INPUT_ERROR)


def _load_label_space(text):
    if text is None:
        _fail("missing-label-space", "--label-space is required for this command")
    try:
        if text.lstrip().startswith("{"):
            cfg = json.loads(text)
        else:
            with open(text, encoding="utf-8") as fh:
                cfg = json.load(fh)
    except FileNotFoundError:
        _fail("input-not-found", f"label-space file not found: {text}")
    except json.JSONDecodeError as exc:
        _fail("invalid-label-space", f"label-space JSON is malformed: {exc}")
    try:
        return build_label_space(cfg)
    except LabelSpaceError as exc:
        _fail("invalid-label-space", str(exc))


def _open_input(path):
    try:
        return open(path, encoding="utf-8")
    except FileNotFoundError:
        _fail("input-not-found", f"input file not found: {path}")


def _parse_records(path, fmt, schema):
    parsers = {
        "partial": parse_partial,
        "counterfactual": parse_counterfactual,
        "decomposition": parse_decomposition,
    }
    with _open_input(path) as fh:
        try:
            return parsers[schema](fh, fmt)
        except SchemaError as exc:
            _fail("invalid-records", str(exc))


def _report_schema():
    text = resources.files("fusionpid").joinpath("schemas/run_report.json").read_text()
    return json.loads(text)


def _write_report(report, out):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out is None:
        click.echo(text)
    else:
        # build and validate fully before touching the output path
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _alpha_json(records, value_of, metric):
    try:
        return krippendorff_alpha(matrix_from_records(records, value_of, metric)).to_json()
    except AgreementError as exc:
        return {"alpha": "undefined", "message": str(exc)}


def _agreement_summary(records, schema, metric, space=None):
    def enc(label):
        if space is None:
            return label
        return encode(space, label)

    alphas, confidences = {}, {}
    if schema == "partial":
        for cond in ("m1", "m2", "both"):
            sel = [r for r in records if r.condition == cond]
            alphas[cond] = _alpha_json(sel, lambda r: enc(r.label), metric)
            confidences[cond] = mean_confidence(sel, "confidence") if sel else None
    elif schema == "counterfactual":
        measures = {
            "y1": ("first-m1", "label_first", "confidence_first"),
            "y1+2": ("first-m1", "label_both", "confidence_both"),
            "y2": ("first-m2", "label_first", "confidence_first"),
            "y2+1": ("first-m2", "label_both", "confidence_both"),
        }
        for name, (order, label_field, conf_field) in measures.items():
            sel = [r for r in records if r.order == order]
            alphas[name] = _alpha_json(
                sel, lambda r, f=label_field: enc(getattr(r, f)), metric
            )
            confidences[name] = mean_confidence(sel, conf_field) if sel else None
    else:  # decomposition: 0-5 ratings, interval-style by default
        for name in ("r", "u1", "u2", "s"):
            alphas[name] = _alpha_json(records, lambda r, f=name: getattr(r, f), metric)
            confidences[name] = mean_confidence(records, f"conf_{name}")
    confidences = {k: v for k, v in confidences.items() if v is not None}
    return alphas, confidences


@click.group()
@click.version_option(__version__)
def main():
    """Convert multimodal annotations into interaction values and score agreement."""


solver_options = [
    click.option("--tol-objective", type=float, default=1e-6, show_default=True),
    click.option("--max-iter", type=int, default=10000, show_default=True),
    click.option(
        "--step-rule",
        type=click.Choice(["line-search", "diminishing"]),
        default="line-search",
        show_default=True,
    ),
]


def with_solver_options(fn):
    for opt in reversed(solver_options):
        fn = opt(fn)
    return fn


def _solver_config(tol_objective, max_iter, step_rule):
    try:
        return SolverConfig(
            tol_objective=tol_objective, max_iterations=max_iter, step_rule=step_rule
        )
    except ValueError as exc:
        _fail("invalid-config", str(exc))


@main.command()
@click.option("--input", "path", required=True, type=str)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--schema", type=click.Choice(["partial", "counterfactual"]), required=True)
@click.option("--label-space", "label_space", type=str, required=True, help="inline JSON or a path to a JSON file")
@click.option("--pairing", type=click.Choice(["rotation", "all-pairs"]), default="rotation", show_default=True)
@click.option("--smoothing", type=float, default=0.0, show_default=True)
@click.option("--metric", type=click.Choice(["nominal", "ordinal", "interval"]), default="nominal", show_default=True)
@with_solver_options
@click.option("--out", type=str, default=None, help="report path (stdout if omitted)")
def convert(path, fmt, schema, label_space, pairing, smoothing, metric, tol_objective, max_iter, step_rule, out):
    """Convert partial or counterfactual annotations into R/U1/U2/S."""
    space = _load_label_space(label_space)
    cfg = _solver_config(tol_objective, max_iter, step_rule)
    records = _parse_records(path, fmt, schema)
    try:
        if schema == "partial":
            data = triples_from_partial(records, space, pairing=pairing)
        else:
            data = triples_from_counterfactual(records, space)
        from .pid import convert as run_convert

        result = run_convert(data, smoothing=smoothing, cfg=cfg)
    except (SchemaError, LabelSpaceError, DistributionError) as exc:
        _fail("conversion-failed", str(exc))
    alphas, confidences = _agreement_summary(records, schema, metric, space=space)
    report = {
        "tool": {"name": "fusionpid", "version": __version__},
        "input": {
            "path": path,
            "format": fmt,
            "schema": schema,
            "label_space": space.to_config(),
            "pairing": pairing,
            "smoothing": smoothing,
        },
        "config": {"solver": cfg.to_json()},
        "pid": result.to_json(),
        "agreement": alphas,
        "confidence": confidences,
    }
    jsonschema.validate(report, _report_schema())
    _write_report(report, out)
    if not result.converged:
        sys.exit(EXIT_NONCONVERGED)


@main.command()
@click.option("--input", "path", required=True, type=str)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--schema", type=click.Choice(["partial", "counterfactual", "decomposition"]), required=True)
@click.option("--metric", type=click.Choice(["nominal", "ordinal", "interval"]), default=None)
@click.option("--label-space", "label_space", type=str, default=None)
@click.option("--out", type=str, default=None)
def agreement(path, fmt, schema, metric, label_space, out):
    """Inter-annotator agreement (Krippendorff's alpha) and mean confidences."""
    if metric is None:
        metric = "interval" if schema == "decomposition" else "nominal"
    space = _load_label_space(label_space) if label_space else None
    records = _parse_records(path, fmt, schema)
    if not records:
        _fail("invalid-records", "no records in input")
    try:
        alphas, confidences = _agreement_summary(records, schema, metric, space=space)
    except (AgreementError, LabelSpaceError) as exc:
        _fail("agreement-failed", str(exc))
    report = {
        "tool": {"name": "fusionpid", "version": __version__},
        "input": {"path": path, "format": fmt, "schema": schema, "metric": metric},
        "agreement": alphas,
        "confidence": confidences,
    }
    _write_report(report, out)


@main.command()
@click.option("--input", "path", required=True, type=str, help="Joint3 JSON file")
@with_solver_options
@click.option("--out", type=str, default=None)
def pid(path, tol_objective, max_iter, step_rule, out):
    """Decompose a stored joint distribution into R/U1/U2/S."""
    cfg = _solver_config(tol_objective, max_iter, step_rule)
    with _open_input(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            _fail("invalid-distribution", f"malformed JSON: {exc}")
    try:
        p = Joint3.from_json(obj)
    except (DistributionError, KeyError, TypeError, ValueError) as exc:
        _fail("invalid-distribution", str(exc))
    result = pid_from_joint(p, cfg=cfg)
    _write_report(result.to_json(), out)
    if not result.converged:
        sys.exit(EXIT_NONCONVERGED)


@main.command("oracle-check")
@click.option("--trials", type=int, required=True)
@click.option("--sizes", type=str, default="2", show_default=True, help="comma-separated supports")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--resolution", type=int, default=2000, show_default=True)
@click.option("--tolerance", type=float, default=2e-3, show_default=True)
def oracle_check(trials, sizes, seed, resolution, tolerance):
    """Compare the solver against the grid-search oracle on random joints."""
    if trials < 1:
        _fail("invalid-config", "--trials must be positive")
    try:
        size_list = [int(s) for s in sizes.split(",") if s]
    except ValueError:
        _fail("invalid-config", f"bad --sizes value {sizes!r}")
    if any(n < 2 or n > 3 for n in size_list):
        _fail("invalid-config", "sizes must lie in {2, 3} for oracle tractability")
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    for _ in range(trials):
        n = int(rng.choice(size_list))
        mass = rng.exponential(size=(n, n, n))
        p = Joint3(mass / mass.sum())
        solved = pid_from_joint(p)
        try:
            q_oracle = brute_force_qstar(constraints_from_joint(p), resolution)
        except OracleError as exc:
            _fail("oracle-intractable", str(exc))
        oracle = pid_from_solution(p, q_oracle)
        gap = max(
            abs(solved.r - oracle.r),
            abs(solved.u1 - oracle.u1),
            abs(solved.u2 - oracle.u2),
            abs(solved.s - oracle.s),
        )
        worst = max(worst, gap)
        if gap > tolerance:
            failures += 1
    summary = {
        "trials": trials,
        "sizes": size_list,
        "seed": seed,
        "resolution": resolution,
        "tolerance": tolerance,
        "max_component_discrepancy": worst,
        "failures": failures,
        "passed": failures == 0,
    }
    click.echo(json.dumps(summary, indent=2, sort_keys=True))
    if failures:
        sys.exit(EXIT_NONCONVERGED)


@main.command()
@click.option("--gate", type=click.Choice(GATES), required=True)
@click.option("--noise", type=float, default=0.0, show_default=True, help="output flip probability")
@click.option("--count", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=str, default=None)
def synth(gate, noise, count, seed, out):
    """Sample a gate distribution and emit a y1,y2,y,weight CSV."""
    try:
        spec = GateSpec(gate=gate, noise=noise)
        data = sample(canonical_joint(spec), count, seed)
    except ValueError as exc:
        _fail("invalid-config", str(exc))
    lines = ["y1,y2,y,weight"]
    lines += [f"{a},{b},{c},{w:g}" for a, b, c, w in data.samples]
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
