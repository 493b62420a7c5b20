"""Acceptance gate: ten headline properties, one reported line each.

Each test prints ``criterion NN [PASS|FAIL] description (detail)`` directly
to the terminal so the gate is auditable from the pytest log alone.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

from unitfield.checks import suite_curvature, suite_structure
from unitfield.classified import (
    ClassifiedSurface,
    classified_field,
    classified_metric,
    gauss_curvature_value,
    geodesic_curvature_of_parallels,
    integrate_k,
    profile_curve,
)
from unitfield.dsl import differentiate, evaluate, parse
from unitfield.fieldgeo import (
    leaf_identity_residuals,
    omega_foliation,
    omega_general,
    tg_condition_residual,
)
from unitfield.oracle import brute_second_fundamental_form
from unitfield.scenarios import builtin_scenarios, sample_points

SCENARIOS = builtin_scenarios()

INNER = (0.2, 0.8)
OUTER = (1.2, 5.0)


def branch_scenario(branch, n=1):
    surface = ClassifiedSurface(branch=branch, n=n)
    chart = classified_metric(surface)
    field = classified_field(chart)
    region = (branch,) + tuple((0.0, 1.0) for _ in range(max(n, 1)))
    return surface, chart, field, region


@pytest.fixture()
def criterion(capsys):
    def report(number, description, passed, detail=""):
        line = f"criterion {number:02d} [{'PASS' if passed else 'FAIL'}] {description}"
        if detail:
            line += f" ({detail})"
        with capsys.disabled():
            print(line)
        assert passed, line

    return report


def test_criterion_01_oracle_equivalence(criterion):
    names = ["flat2-parallel", "flat3-parallel", "sphere2", "classified", "classified-n2"]
    worst = {}
    for name in names:
        sc = SCENARIOS[name]
        tol = 5e-4 if name == "classified-n2" else 2e-4
        gap = 0.0
        for x in sample_points(sc.region, 20):
            closed = omega_general(sc.field, x)
            brute = brute_second_fundamental_form(sc.field, x)
            gap = max(gap, float(np.max(np.abs(closed.values - brute.values))))
        worst[name] = (gap, tol)
    passed = all(gap < tol for gap, tol in worst.values())
    detail = ", ".join(f"{k} {v[0]:.2e}<{v[1]:.0e}" for k, v in worst.items())
    criterion(1, "closed form matches brute-force oracle on five scenarios", passed, detail)


def test_criterion_02_classified_family_is_totally_geodesic(criterion):
    worst = 0.0
    for branch in (INNER, OUTER):
        _, _, field, region = branch_scenario(branch)
        for x in sample_points(region, 20):
            worst = max(worst, omega_foliation(field, x).max_abs())
    criterion(
        2,
        "classified metric (a=1): max|omega| < 1e-6 on both branches",
        worst < 1e-6,
        f"max {worst:.2e}",
    )


def test_criterion_03_curvature_condition(criterion):
    sc = SCENARIOS["classified"]
    worst = 0.0
    for x in sample_points(sc.region, 20):
        jd = sc.chart.jacobi_operator(x, sc.field.value(x))
        res = tg_condition_residual(x[0], float(jd.eigenvalues[0]))
        worst = max(worst, abs(res))
    sph = SCENARIOS["sphere2"]
    sphere_gap = 0.0
    for x in sample_points(sph.region, 20):
        k = geodesic_curvature_of_parallels(sph.chart, x)
        jd = sph.chart.jacobi_operator(x, sph.field.value(x))
        res = tg_condition_residual(k, float(jd.eigenvalues[0]))
        want = -(1.0 + k * k) / (k * k - 1.0)
        sphere_gap = max(sphere_gap, abs(res - want))
    passed = worst < 1e-9 and sphere_gap < 1e-8
    criterion(
        3,
        "K = 2k^2/(k^2-1) residual: < 1e-9 classified, sphere offset -(1+k^2)/(k^2-1) within 1e-8",
        passed,
        f"classified {worst:.2e}, sphere {sphere_gap:.2e}",
    )


def test_criterion_04_sphere_minimal_never_geodesic(criterion):
    sc = SCENARIOS["sphere2"]
    comp_gap = 0.0
    trace_gap = 0.0
    for u in (math.pi / 6, math.pi / 4, math.pi / 3):
        om = omega_foliation(sc.field, (u, 0.3))
        comp_gap = max(comp_gap, abs(om.value(1, 1, 0) + 0.5))
        trace_gap = max(trace_gap, float(np.max(np.abs(om.traces()))))
    passed = comp_gap < 1e-6 and trace_gap < 1e-8
    criterion(
        4,
        "Hopf-like sphere field: omega_{1|10} = -1/2 within 1e-6, traceless within 1e-8",
        passed,
        f"component {comp_gap:.2e}, trace {trace_gap:.2e}",
    )


def test_criterion_05_ode_matches_implicit_solution(criterion):
    states = integrate_k(2.0, target_k=3.0)
    want = 2 * math.atan(3.0) + 1.0 / 3.0 - 2 * math.atan(2.0) - 0.5
    gap = abs(states[-1].u - want)
    criterion(
        5,
        "leaf ODE k -> 3 from k = 2: delta u matches 2 arctan k + 1/k within 1e-8",
        gap < 1e-8,
        f"gap {gap:.2e}",
    )


def test_criterion_06_gaussian_curvature_and_signs(criterion):
    worst = 0.0
    signs_ok = True
    for branch, sign in ((INNER, -1.0), (OUTER, 1.0)):
        _, chart, _, _ = branch_scenario(branch)
        for t in np.linspace(branch[0], branch[1], 10):
            x = np.array([t, 0.5])
            K = chart.sectional_curvature(x, (1.0, 0.0), (0.0, 1.0))
            worst = max(worst, abs(K - gauss_curvature_value(t)))
            signs_ok = signs_ok and sign * K > 0
    passed = worst < 1e-6 and signs_ok
    criterion(
        6,
        "Gaussian curvature equals 2t^2/(t^2-1) within 1e-6, negative inner / positive outer",
        passed,
        f"max gap {worst:.2e}, signs {'ok' if signs_ok else 'violated'}",
    )


def test_criterion_07_profile_curve(criterion):
    surface = ClassifiedSurface(branch=OUTER)
    dx = differentiate(parse("t/(t^2+1)", ("t",)), "t")
    dz = differentiate(parse("(2*t^2+1)^(3/2)/(t*(t^2+1))", ("t",)), "t")
    iso_gap = 0.0
    for branch in (INNER, OUTER):
        _, chart, _, _ = branch_scenario(branch)
        for t in np.linspace(branch[0], branch[1], 25):
            speed2 = evaluate(dx, {"t": t}) ** 2 + evaluate(dz, {"t": t}) ** 2
            g_tt = chart.metric_at((t, 0.5))[0, 0]
            iso_gap = max(iso_gap, abs(speed2 - g_tt))
    p2 = profile_curve(surface, 2.0)
    triple_gap = max(abs(p2.x - 0.4), abs(p2.z - 2.7), abs(p2.K - 8.0 / 3.0))
    wide = ClassifiedSurface(branch=(1.2, 2000.0))
    tail_gap = abs(profile_curve(wide, 1e3).z - 2 * math.sqrt(2.0))
    passed = iso_gap < 1e-10 and triple_gap < 1e-12 and tail_gap < 1e-6
    criterion(
        7,
        "profile curve: isometric within 1e-10, (x,z,K)(2) = (0.4, 2.7, 8/3) within 1e-12, z -> 2 sqrt 2",
        passed,
        f"isometry {iso_gap:.2e}, triple {triple_gap:.2e}, tail {tail_gap:.2e}",
    )


def test_criterion_08_leaf_identities(criterion):
    worst = 0.0
    for name in ("sphere2", "classified"):
        sc = SCENARIOS[name]
        for x in sample_points(sc.region, 20):
            worst = max(worst, leaf_identity_residuals(sc.field, x).max_residual())
    criterion(
        8,
        "three half-tensor leaf identities hold within 1e-6 on sphere2 and classified",
        worst < 1e-6,
        f"max residual {worst:.2e}",
    )


def test_criterion_09_higher_dimensional_members(criterion):
    worst = 0.0
    for name in ("classified-n2", "classified-n3"):
        sc = SCENARIOS[name]
        for x in sample_points(sc.region, 20):
            worst = max(worst, omega_foliation(sc.field, x).max_abs())
    criterion(
        9,
        "classified-n2 and classified-n3 are totally geodesic within 1e-5",
        worst < 1e-5,
        f"max {worst:.2e}",
    )


def test_criterion_10_structural_invariants_and_verify(criterion):
    results = suite_curvature() + suite_structure()
    failed = [r.name for r in results if not r.passed]
    proc = subprocess.run(
        [sys.executable, "-m", "unitfield.cli", "verify", "--suite", "all"],
        capture_output=True,
        text=True,
    )
    passed = not failed and proc.returncode == 0
    detail = f"{len(results)} invariant checks, verify exit {proc.returncode}"
    if failed:
        detail += f", failed: {failed[:3]}"
    criterion(10, "structural invariants pass and `verify --suite all` exits 0", passed, detail)
