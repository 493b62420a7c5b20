"""Command-line front end.

Subcommands: ``report`` (sample a scenario, write a JSON analysis),
``verify`` (run named invariant suites, TAP output), ``ode`` (leaf
curvature trajectories as CSV), ``profile`` (profile curve CSV and OBJ
mesh of the revolution surface).

Exit codes: 0 success, 1 verification failure, 2 invalid input or
domain error.  The environment variable ``UNITFIELD_TOL`` overrides the
default tolerance where ``--tol`` is not given: the classification
tolerance in ``report`` and every per-check threshold in ``verify``.
Output is deterministic: identical flags give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .checks import ALL_SUITES, run_suites
from .classified import (
    ClassifiedSurface,
    integrate_k,
    mesh_export,
    profile_curve,
    trajectory_implicit_residuals,
    write_curvature_csv,
    write_obj,
    write_profile_csv,
)
from .errors import ScenarioError, UmbilicityPole, UnitfieldError
from .fieldgeo import omega_foliation, omega_general, tg_condition_residual
from .scenarios import (
    build_custom_scenario,
    builtin_scenarios,
    detect_foliation,
    sample_points,
)

# External suite name kept stable for script consumers; the module uses
# the descriptive name internally.
_SUITE_ALIASES = {"lemma3": "leaf-identities"}


def _env_tolerance():
    raw = os.environ.get("UNITFIELD_TOL")
    if raw is None:
        return None
    try:
        value = float(raw)
    except ValueError:
        raise ScenarioError(f"UNITFIELD_TOL must be a number, got {raw!r}")
    if not value > 0.0:
        raise ScenarioError(f"UNITFIELD_TOL must be positive, got {value}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


# --- report -------------------------------------------------------------------------


def _split(text, sep=";"):
    return [part.strip() for part in text.split(sep)]


def _resolve_scenario(args):
    registry = builtin_scenarios()
    custom_flags = (args.coords, args.metric, args.field, args.region)
    if args.scenario != "custom":
        if args.scenario not in registry:
            known = ", ".join(registry)
            raise ScenarioError(
                f"unknown scenario {args.scenario!r}; choose one of {known}, custom"
            )
        if any(flag is not None for flag in custom_flags):
            raise ScenarioError(
                "--coords/--metric/--field/--region apply only to 'custom'"
            )
        return registry[args.scenario]
    if any(flag is None for flag in custom_flags):
        raise ScenarioError(
            "scenario 'custom' needs all of --coords, --metric, --field, --region"
        )
    coords = _split(args.coords, ",")
    region = []
    for part in _split(args.region):
        pieces = part.split(",")
        if len(pieces) != 2:
            raise ScenarioError(f"region interval {part!r} is not 'lo,hi'")
        try:
            region.append((float(pieces[0]), float(pieces[1])))
        except ValueError:
            raise ScenarioError(f"region interval {part!r} is not numeric")
    return build_custom_scenario(
        coords, _split(args.metric), _split(args.field), region
    )


def _point_record(scenario, x, compute, tol):
    chart, field = scenario.chart, scenario.field
    om = compute(field, x)
    jd = chart.jacobi_operator(x, field.value(x))
    condition = None
    if om.frame.signed:
        condition = []
        xi = field.value(x)
        for s in range(1, chart.dim):
            e_s = om.frame.e[:, s]
            K_s = chart.curvature_inner(x, e_s, xi, xi, e_s)
            try:
                condition.append(float(tg_condition_residual(om.lambdas[s], K_s)))
            except UmbilicityPole:
                condition.append(None)
    return {
        "coordinates": [float(c) for c in x],
        "lambdas": [float(v) for v in om.lambdas],
        "signed": bool(om.frame.signed),
        "jacobi_eigenvalues": [float(v) for v in jd.eigenvalues],
        "omega": om.values.tolist(),
        "max_abs": float(om.max_abs()),
        "trace_norm": float(om.trace_norm()),
        "condition_residuals": condition,
    }


def cmd_report(args) -> int:
    try:
        scenario = _resolve_scenario(args)
        tol = args.tol
        if tol is None:
            tol = _env_tolerance()
        if tol is None:
            tol = scenario.tolerance
        points = sample_points(scenario.region, args.points)
        foliation = scenario.foliation and detect_foliation(scenario, points)
        compute = omega_foliation if foliation else omega_general
        records = [_point_record(scenario, x, compute, tol) for x in points]
    except UnitfieldError as exc:
        message = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(message, sort_keys=True), file=sys.stderr)
        return 2
    max_abs = max(r["max_abs"] for r in records)
    trace_norm = max(r["trace_norm"] for r in records)
    report = {
        "scenario": scenario.name,
        "tool_version": __version__,
        "tolerance": float(tol),
        "route": "foliation" if foliation else "general",
        "points": records,
        "summary": {
            "count": len(records),
            "max_abs": max_abs,
            "trace_norm": trace_norm,
            "totally_geodesic": bool(max_abs <= tol),
            "minimal": bool(trace_norm <= tol),
        },
    }
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


# --- verify -------------------------------------------------------------------------


def cmd_verify(args) -> int:
    try:
        tol = args.tol if args.tol is not None else _env_tolerance()
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    token = _SUITE_ALIASES.get(args.suite, args.suite)
    names = list(ALL_SUITES) if token == "all" else [token]
    results = run_suites(names, tol_override=tol)
    print(f"1..{len(results)}")
    failed = 0
    for number, res in enumerate(results, start=1):
        status = "ok" if res.passed else "not ok"
        if not res.passed:
            failed += 1
        print(
            f"{status} {number} - {res.name} "
            f"(residual={res.residual:.3g}, tol={res.tolerance:.3g})"
        )
    print(f"# {len(results) - failed} passed, {failed} failed")
    return 1 if failed else 0


# --- ode ----------------------------------------------------------------------------


def cmd_ode(args) -> int:
    try:
        states = integrate_k(args.k0, u_span=args.u_span, target_k=args.target_k)
    except UnitfieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    residuals = trajectory_implicit_residuals(states)

    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["u", "k", "implicit_residual"])
        for state, res in zip(states, residuals):
            writer.writerow([repr(state.u), repr(state.k), repr(float(res))])

    if args.out is None:
        emit(sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    return 0


# --- profile ------------------------------------------------------------------------


def _curvature_path(obj_path):
    base, dot, ext = obj_path.rpartition(".")
    if dot and ext.lower() == "obj":
        return f"{base}.curvature.csv"
    return f"{obj_path}.curvature.csv"


def cmd_profile(args) -> int:
    try:
        surface = ClassifiedSurface(branch=(args.t_min, args.t_max))
        ts = np.linspace(args.t_min, args.t_max, args.samples)
        rows = [profile_curve(surface, t) for t in ts]
        write_profile_csv(rows, args.csv if args.csv is not None else sys.stdout)
        if args.obj is not None:
            mesh = mesh_export(surface, t_samples=args.samples, v_samples=args.v_samples)
            write_obj(mesh, args.obj)
            curvature = args.curvature_csv or _curvature_path(args.obj)
            write_curvature_csv(mesh, curvature)
    except UnitfieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unitfield",
        description=(
            "Second fundamental form of unit vector fields viewed as "
            "submanifolds of the unit tangent bundle."
        ),
        epilog=(
            "Exit codes: 0 success, 1 verification failure, 2 invalid input. "
            "UNITFIELD_TOL overrides default tolerances."
        ),
    )
    parser.add_argument("--version", action="version", version=f"unitfield {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    rp = sub.add_parser(
        "report", help="sample a scenario and write a JSON analysis report"
    )
    rp.add_argument("scenario", help="builtin scenario name, or 'custom'")
    rp.add_argument("--points", type=_positive_int, default=20, help="sample count")
    rp.add_argument(
        "--tol",
        type=_positive_float,
        default=None,
        help="classification tolerance (default: scenario tolerance)",
    )
    rp.add_argument("--out", default=None, help="output file (default: stdout)")
    rp.add_argument("--coords", default=None, help="custom: comma-separated coordinates")
    rp.add_argument(
        "--metric",
        default=None,
        help="custom: semicolon-separated upper-triangle entries, row-major",
    )
    rp.add_argument(
        "--field", default=None, help="custom: semicolon-separated field components"
    )
    rp.add_argument(
        "--region",
        default=None,
        help="custom: semicolon-separated 'lo,hi' sampling intervals",
    )
    rp.set_defaults(func=cmd_report)

    vp = sub.add_parser("verify", help="run invariant suites, report TAP lines")
    vp.add_argument(
        "--suite",
        default="all",
        choices=["all", "lemma3", "oracle", "curvature", "ode", "structure"],
        help="which suite to run (lemma3 = leaf identity suite)",
    )
    vp.add_argument(
        "--tol",
        type=_positive_float,
        default=None,
        help="override every per-check tolerance",
    )
    vp.set_defaults(func=cmd_verify)

    op = sub.add_parser("ode", help="integrate the leaf curvature equation")
    op.add_argument("--k0", type=float, required=True, help="initial curvature")
    group = op.add_mutually_exclusive_group(required=True)
    group.add_argument("--target-k", type=float, help="stop at this curvature")
    group.add_argument("--u-span", type=float, help="integrate over this u interval")
    op.add_argument("--out", default=None, help="CSV file (default: stdout)")
    op.set_defaults(func=cmd_ode)

    pp = sub.add_parser("profile", help="export the profile curve and mesh")
    pp.add_argument("--t-min", type=float, required=True)
    pp.add_argument("--t-max", type=float, required=True)
    pp.add_argument("--samples", type=_positive_int, default=100)
    pp.add_argument("--csv", default=None, help="profile CSV path (default: stdout)")
    pp.add_argument("--obj", default=None, help="also write the revolution mesh here")
    pp.add_argument(
        "--curvature-csv",
        default=None,
        help="per-vertex curvature CSV (default: derived from --obj)",
    )
    pp.add_argument(
        "--v-samples", type=_positive_int, default=64, help="angular mesh resolution"
    )
    pp.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
