"""Command-line front end.

Subcommands: ``continue`` (run one continuation), ``study`` (dyadic
convergence table), ``verify`` (transport-invariance and projector
identity residuals), ``list`` (registry of problems and schemes).

Exit codes: 0 success, 1 usage error (unknown ids, malformed
descriptors/files), 2 numerical failure (rank collapse, spectral gap or
domain violations, residuals above the documented thresholds).  Reports
are emitted as JSON (``"schema": 1``) or CSV with identical numeric
payloads; identical configurations produce byte-identical output.
"""

import functools
import json
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import contour as ct
from . import oracle as orc
from .errors import NumericalFailure
from .matrix_core import fro_norm
from .problems import ProblemSpec, builtin_problem_ids, get_problem
from .schemes import base_scheme_ids, get_scheme

# The spec of this tool distinguishes usage errors (1) from numerical
# failures (2); align click's own argument errors with that contract.
click.UsageError.exit_code = 1

DEFAULT_CONTINUE_STEPS = 256
DEFAULT_VERIFY_STEPS = 16
MAX_CLI_ORDER = 4

# Documented residual thresholds for `verify` on suggested contours with
# the default 64 substeps; the identity threshold is looser when the
# derivative comes from finite differences.
PROP1_THRESHOLD = 1e-7
PPROP_THRESHOLD_EXACT = 1e-9
PPROP_THRESHOLD_FD = 1e-6


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except NumericalFailure as exc:
            _fail(f"{type(exc).__name__}: {exc}", 2)
        except ValueError as exc:
            _fail(str(exc), 1)

    return wrapper


def _resolve_contour(problem: ProblemSpec, descriptor: Optional[str],
                     default_steps: int) -> ct.ContourDesc:
    if descriptor is not None:
        return ct.parse_contour(descriptor)
    c = problem.suggested_center
    return ct.ContourDesc(
        kind="circle",
        params=(c, problem.suggested_radius),
        base_steps=default_steps,
    )


def load_basis_file(path: str) -> np.ndarray:
    """Read a starting basis: first line ``n k``, then n rows of k
    ``re,im`` entries separated by spaces."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty basis file {path!r}")
    try:
        n, k = (int(t) for t in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad basis file header {lines[0]!r}") from exc
    if len(lines) != n + 1:
        raise ValueError(f"basis file {path!r} has {len(lines) - 1} rows, expected {n}")
    rows = []
    for ln in lines[1:]:
        entries = ln.split()
        if len(entries) != k:
            raise ValueError(f"basis file row {ln!r} has {len(entries)} entries, expected {k}")
        rows.append([complex(*map(float, e.split(","))) for e in entries])
    return np.array(rows, dtype=np.complex128)


def _resolve_r0(problem: ProblemSpec, mesh: ct.Mesh, r0_file: Optional[str]) -> np.ndarray:
    if r0_file is None:
        return ct.initial_basis(problem.family, complex(mesh.points[0]))
    r0 = load_basis_file(r0_file)
    if r0.shape[0] != problem.family.dim:
        raise ValueError(
            f"basis file dimension {r0.shape[0]} does not match problem dim "
            f"{problem.family.dim}"
        )
    return r0


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(payload: dict, csv_lines: list, fmt: str, out: Optional[str]) -> None:
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        text = "\n".join(csv_lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _scheme_for_cli(scheme_id: str):
    scheme = get_scheme(scheme_id)
    if scheme.order > MAX_CLI_ORDER:
        raise ValueError(
            f"scheme {scheme_id!r} has order {scheme.order}; the CLI exposes "
            f"orders up to {MAX_CLI_ORDER}"
        )
    return scheme


@click.group()
def cli():
    """Continuation of analytic invariant-subspace bases along contours."""


common_options = [
    click.option("--contour", "contour_desc", default=None,
                 help="circle:<re>,<im>:<radius>:<L> or polyline:<re,im>;...:<L>"),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json"),
    click.option("--out", default=None, help="Write the report to a file instead of stdout."),
]


def add_options(opts):
    def deco(f):
        for opt in reversed(opts):
            f = opt(f)
        return f

    return deco


@cli.command("continue")
@click.option("--problem", "problem_id", required=True)
@click.option("--scheme", "scheme_id", required=True)
@add_options(common_options)
@click.option("--r0-file", default=None, help="Starting basis file (default: auto).")
@click.option("--init-policy", type=click.Choice(["require", "project"]), default="require")
@handle_errors
def cmd_continue(problem_id, scheme_id, contour_desc, fmt, out, r0_file, init_policy):
    """Continue a basis along a contour and report closure/drift/cost."""
    problem = get_problem(problem_id)
    scheme = _scheme_for_cli(scheme_id)
    desc = _resolve_contour(problem, contour_desc, DEFAULT_CONTINUE_STEPS)
    mesh = desc.mesh()
    r0 = _resolve_r0(problem, mesh, r0_file)
    report = ct.continue_basis(problem.family, scheme, mesh, r0, init_policy=init_policy)
    result = {
        "closure_error": report.closure,
        "drift": report.drift,
        "rank_ok": report.rank_ok,
        "frames": len(report.frames),
        "steps": report.counters.steps,
        "projector_evals_unique": report.counters.projector_evals_unique,
        "projector_evals_total": report.counters.projector_evals_total,
        "mat_mults": report.counters.mat_mults,
    }
    payload = {
        "schema": 1,
        "command": "continue",
        "problem": problem.id,
        "scheme": scheme.id,
        "init_policy": init_policy,
        "result": result,
    }
    keys = ["closure_error", "drift", "rank_ok", "frames", "steps",
            "projector_evals_unique", "projector_evals_total", "mat_mults"]
    csv_lines = [
        ",".join(keys),
        ",".join(_csv_value(result[key]) for key in keys),
    ]
    _emit(payload, csv_lines, fmt, out)


@cli.command("study")
@click.option("--problem", "problem_id", required=True)
@click.option("--scheme", "scheme_id", required=True)
@add_options(common_options)
@click.option("--refinements", default=4, show_default=True)
@click.option("--oracle-substeps", default=64, show_default=True,
              help="Reference-integrator substeps per segment (0 disables the column).")
@handle_errors
def cmd_study(problem_id, scheme_id, contour_desc, fmt, out, refinements, oracle_substeps):
    """Dyadic convergence study: runs at L, 2L, 4L, ... with fitted orders."""
    problem = get_problem(problem_id)
    scheme = _scheme_for_cli(scheme_id)
    desc = _resolve_contour(problem, contour_desc, 64)
    result = ct.convergence_study(
        problem.family, scheme, desc.mesh, desc.base_steps, refinements,
        oracle_substeps=oracle_substeps,
    )
    rows = [
        {
            "L": row.steps,
            "closure_error": row.closure,
            "oracle_error": row.oracle_error,
            "p_evals": row.projector_evals,
            "mat_mults": row.mat_mults,
            "order": row.order,
        }
        for row in result.rows
    ]
    payload = {
        "schema": 1,
        "command": "study",
        "problem": problem.id,
        "scheme": scheme.id,
        "rows": rows,
        "median_order": result.median_order,
    }
    keys = ["L", "closure_error", "oracle_error", "p_evals", "mat_mults", "order"]
    csv_lines = [",".join(keys)]
    csv_lines += [",".join(_csv_value(row[key]) for key in keys) for row in rows]
    csv_lines.append("median,,,,," + _csv_value(result.median_order))
    _emit(payload, csv_lines, fmt, out)


@cli.command("verify")
@click.option("--problem", "problem_id", required=True)
@add_options(common_options)
@click.option("--oracle-substeps", default=64, show_default=True)
@handle_errors
def cmd_verify(problem_id, contour_desc, fmt, out, oracle_substeps):
    """Check the transport-invariance properties and the identity P P' P = 0."""
    problem = get_problem(problem_id)
    desc = _resolve_contour(problem, contour_desc, DEFAULT_VERIFY_STEPS)
    mesh = desc.mesh()
    ct.check_mesh_in_domain(problem, mesh)
    r0 = ct.initial_basis(problem.family, complex(mesh.points[0]))
    cfg = orc.OracleConfig(substeps_per_segment=oracle_substeps)
    report = orc.verify_prop1(problem.family, mesh, r0, cfg)

    pts = mesh.points[:-1] if mesh.closed else mesh.points
    stride = max(1, len(pts) // 32)
    pprop = orc.check_pprop(problem.family, pts[::stride][:32], cfg)

    pprop_threshold = (
        PPROP_THRESHOLD_EXACT if problem.family.deriv is not None else PPROP_THRESHOLD_FD
    )
    residuals = {
        "pr_minus_r": report.pr_minus_r,
        "p_rprime": report.p_rprime,
        "kato_vs_reduced": report.kato_vs_reduced,
        "pprop": pprop,
    }
    thresholds = {
        "pr_minus_r": PROP1_THRESHOLD,
        "p_rprime": PROP1_THRESHOLD,
        "kato_vs_reduced": PROP1_THRESHOLD,
        "pprop": pprop_threshold,
    }
    passed = report.rank_constant and all(
        residuals[key] <= thresholds[key] for key in residuals
    )
    payload = {
        "schema": 1,
        "command": "verify",
        "problem": problem.id,
        "substeps": oracle_substeps,
        "residuals": residuals,
        "thresholds": thresholds,
        "rank_constant": report.rank_constant,
        "passed": passed,
    }
    csv_lines = ["metric,value,threshold"]
    csv_lines += [
        f"{key},{_csv_value(residuals[key])},{_csv_value(thresholds[key])}"
        for key in ["pr_minus_r", "p_rprime", "kato_vs_reduced", "pprop"]
    ]
    csv_lines.append(f"rank_constant,{_csv_value(report.rank_constant)},")
    csv_lines.append(f"passed,{_csv_value(passed)},")
    _emit(payload, csv_lines, fmt, out)
    if not passed:
        sys.exit(2)


@cli.command("list")
def cmd_list():
    """List problems and schemes with orders and per-step cost signatures."""
    click.echo("schemes:")
    for sid in base_scheme_ids():
        scheme = get_scheme(sid)
        click.echo(f"  {scheme.id} order={scheme.order} cost={scheme.cost_signature}")
    click.echo("  lift:<base> order=base+1 cost=3x base per step")
    click.echo("problems:")
    for pid in builtin_problem_ids():
        problem = get_problem(pid)
        fam = problem.family
        click.echo(f"  {problem.id} dim={fam.dim} rank={fam.rank}")
    click.echo("  random:<seed>:<n>:<k> dim=n rank=k (seeded family)")


def main():
    cli()


if __name__ == "__main__":
    main()
