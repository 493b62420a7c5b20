"""Named verification suites over the builtin scenarios.

Each suite returns an ordered list of :class:`CheckResult` rows.  A row
summarises one invariant on one scenario: the residual is the max over
the sampled points, so failures are visible without drowning the output
in per-point lines.  The CLI renders these as TAP; the test suite
asserts on them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bundle import (
    BundlePoint,
    BundleTangent,
    connection_map,
    field_tangent_map,
    horizontal_lift,
    project_pushforward,
    sasaki_inner,
    vertical_lift,
)
from .classified import (
    ClassifiedSurface,
    arc_length_chart,
    classified_metric,
    du_dk,
    gauss_curvature_value,
    geodesic_curvature_of_parallels,
    implicit_solution,
    integrate_k,
    trajectory_implicit_residuals,
)
from .fieldgeo import (
    classify,
    field_singular_frames,
    leaf_identity_residuals,
    omega_foliation,
    omega_general,
    reorder_frames,
    submanifold_frames,
    tg_condition_residual,
)
from .oracle import brute_second_fundamental_form, sasaki_metric_matrix
from .scenarios import Scenario, builtin_scenarios, sample_points


@dataclass(frozen=True)
class CheckResult:
    """One verified invariant: residual against its tolerance."""

    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""


def _result(name, residual, tol, tol_override=None, detail="") -> CheckResult:
    tol = float(tol if tol_override is None else tol_override)
    residual = float(residual)
    return CheckResult(name, bool(residual <= tol), residual, tol, detail)


def _bool_result(name, passed, tol_override=None, detail="") -> CheckResult:
    # For claims that are predicates rather than residuals (sign checks);
    # residual is 0/1 so the same tolerance machinery applies.
    res = 0.0 if passed else 1.0
    return CheckResult(name, bool(passed), res, 0.5, detail)


def _points(sc: Scenario, count: int) -> np.ndarray:
    return sample_points(sc.region, count)


# --- curvature ---------------------------------------------------------------------


def _compatibility_residual(chart, x) -> float:
    g = chart.metric_at(x)
    dg = chart.metric_derivs(x)
    gamma = chart.christoffel(x)
    term = np.einsum("lki,lj->kij", gamma, g) + np.einsum("lkj,li->kij", gamma, g)
    return float(np.max(np.abs(dg - term)))


def _symmetry_residuals(chart, x):
    L = chart.lowered_curvature(x)
    skew_args = np.max(np.abs(L + np.einsum("ljik->lijk", L)))
    skew_vals = np.max(np.abs(L + np.einsum("kijl->lijk", L)))
    pair = np.max(np.abs(L - np.einsum("jkli->lijk", L)))
    bianchi = np.max(
        np.abs(L + np.einsum("ljki->lijk", L) + np.einsum("lkij->lijk", L))
    )
    return float(max(skew_args, skew_vals, pair, bianchi))


def suite_curvature(points: int = 12, tol_override=None) -> list:
    """Curvature-tensor structure plus the constant- and classified-
    curvature values and their sign claims."""
    out = []
    registry = builtin_scenarios()

    for name, sc in registry.items():
        pts = _points(sc, points)
        compat = max(_compatibility_residual(sc.chart, x) for x in pts)
        out.append(
            _result(f"curvature: {name} metric compatibility", compat, 1e-10, tol_override)
        )
        sym = max(_symmetry_residuals(sc.chart, x) for x in pts)
        out.append(
            _result(f"curvature: {name} tensor symmetries", sym, 1e-10, tol_override)
        )

    for name in ("flat2-parallel", "flat3-parallel"):
        sc = registry[name]
        pts = _points(sc, points)
        flat = max(np.max(np.abs(sc.chart.curvature_tensor(x))) for x in pts)
        out.append(
            _result(f"curvature: {name} tensor vanishes", flat, 1e-12, tol_override)
        )

    sc = registry["sphere2"]
    pts = _points(sc, points)
    basis = np.eye(2)
    worst = max(
        abs(sc.chart.sectional_curvature(x, basis[:, 0], basis[:, 1]) - 1.0)
        for x in pts
    )
    out.append(
        _result("curvature: sphere2 sectional curvature is 1", worst, 1e-8, tol_override)
    )

    for name in ("classified", "classified-n2", "classified-n3"):
        sc = registry[name]
        pts = _points(sc, points)
        d = len(sc.region)
        worst = 0.0
        for x in pts:
            want = gauss_curvature_value(x[0])
            for j in range(1, d):
                e0 = np.eye(d)[:, 0]
                ej = np.eye(d)[:, j]
                got = sc.chart.sectional_curvature(x, e0, ej)
                worst = max(worst, abs(got - want))
        out.append(
            _result(
                f"curvature: {name} field-tangent planes have K = 2t^2/(t^2-1)",
                worst,
                1e-6,
                tol_override,
            )
        )

    # Sign claims on both branches of the two-dimensional metric.
    inner = ClassifiedSurface(branch=(0.2, 0.8))
    chart_in = classified_metric(inner)
    ts_in = np.linspace(0.25, 0.75, points)
    vals_in = [
        chart_in.sectional_curvature(np.array([t, 0.3]), np.eye(2)[:, 0], np.eye(2)[:, 1])
        for t in ts_in
    ]
    out.append(
        _bool_result(
            "curvature: inner branch (t^2 < 1) has K < 0",
            all(v < 0 for v in vals_in),
            tol_override,
            detail=f"range [{min(vals_in):.4g}, {max(vals_in):.4g}]",
        )
    )
    sc = registry["classified"]
    ts_out = np.linspace(1.3, 4.8, points)
    vals_out = [
        sc.chart.sectional_curvature(np.array([t, 0.3]), np.eye(2)[:, 0], np.eye(2)[:, 1])
        for t in ts_out
    ]
    out.append(
        _bool_result(
            "curvature: outer branch (t^2 > 1) has K > 0",
            all(v > 0 for v in vals_out),
            tol_override,
            detail=f"range [{min(vals_out):.4g}, {max(vals_out):.4g}]",
        )
    )

    # Same curvature through plain finite differences of the metric entries
    # (no expression derivatives involved).
    def metric_matrix(x):
        t = x[0]
        gtt = (t * t - 1.0) ** 2 / (t**4 * (t * t + 1.0) ** 2)
        gvv = t * t / (t * t + 1.0) ** 2
        return np.diag([gtt, gvv])

    from .manifold import ChartMetric

    fd_chart = ChartMetric.from_callables(("t", "v"), metric_matrix)
    worst = max(
        abs(
            fd_chart.sectional_curvature(np.array([t, 0.3]), np.eye(2)[:, 0], np.eye(2)[:, 1])
            - gauss_curvature_value(t)
        )
        for t in np.linspace(1.3, 4.8, 6)
    )
    out.append(
        _result(
            "curvature: classified curvature via finite differences",
            worst,
            1e-4,
            tol_override,
        )
    )

    # Leaf-condition residuals: zero along the classified family, the
    # known nonzero constant on the sphere.
    for name in ("classified", "classified-n2", "classified-n3"):
        sc = registry[name]
        pts = _points(sc, min(points, 8))
        worst = 0.0
        for x in pts:
            k = x[0]
            jd = sc.chart.jacobi_operator(x, sc.field.value(x))
            for K in jd.eigenvalues:
                worst = max(worst, abs(tg_condition_residual(k, K)))
        out.append(
            _result(
                f"curvature: {name} satisfies the umbilicity condition",
                worst,
                1e-9,
                tol_override,
            )
        )
    sc = registry["sphere2"]
    worst = 0.0
    for x in _points(sc, min(points, 8)):
        k = -math.cos(x[0]) / math.sin(x[0])
        jd = sc.chart.jacobi_operator(x, sc.field.value(x))
        want = -(1.0 + k * k) / (k * k - 1.0)
        got = tg_condition_residual(k, jd.eigenvalues[0])
        worst = max(worst, abs(got - want))
    out.append(
        _result(
            "curvature: sphere2 misses the umbilicity condition by (1+k^2)/(k^2-1)",
            worst,
            1e-8,
            tol_override,
        )
    )
    return out


# --- leaf identities ---------------------------------------------------------------


def suite_leaf_identities(points: int = 20, tol_override=None) -> list:
    """The three curvature/shape identities on leaves of the orthogonal
    foliation, checked against independently computed tensors."""
    out = []
    registry = builtin_scenarios()
    for name in ("sphere2", "classified", "classified-n2"):
        sc = registry[name]
        pts = _points(sc, points)
        worst = {"tangential": 0.0, "mixed": 0.0, "reversed": 0.0}
        for x in pts:
            rep = leaf_identity_residuals(sc.field, x)
            worst["tangential"] = max(worst["tangential"], rep.tangential)
            worst["mixed"] = max(worst["mixed"], rep.mixed)
            worst["reversed"] = max(worst["reversed"], rep.reversed)
        for key, label in (
            ("tangential", "half tensor against leaf shape derivative"),
            ("mixed", "half tensor against squared shape operator"),
            ("reversed", "reversed half tensor against curvature term"),
        ):
            out.append(
                _result(
                    f"leaf-identities: {name} {label}",
                    worst[key],
                    1e-6,
                    tol_override,
                    detail=f"{points} points",
                )
            )
    return out


# --- oracle ------------------------------------------------------------------------


def suite_oracle(points: int = 20, tol_override=None) -> list:
    """Closed-form second fundamental form against the finite-difference
    ambient computation, and the leaf route against the general route."""
    out = []
    registry = builtin_scenarios()
    for name, sc in registry.items():
        pts = _points(sc, points)
        worst = 0.0
        for x in pts:
            om = omega_general(sc.field, x)
            ob = brute_second_fundamental_form(sc.field, x)
            worst = max(worst, float(np.max(np.abs(om.values - ob.values))))
        out.append(
            _result(
                f"oracle: {name} closed form matches ambient finite differences",
                worst,
                sc.oracle_tol,
                tol_override,
                detail=f"{points} points",
            )
        )
    for name, sc in registry.items():
        if not sc.foliation:
            continue
        pts = _points(sc, min(points, 10))
        worst = 0.0
        for x in pts:
            om = omega_general(sc.field, x)
            of = omega_foliation(sc.field, x)
            worst = max(worst, float(np.max(np.abs(om.values - of.values))))
        out.append(
            _result(
                f"oracle: {name} leaf route matches general route",
                worst,
                1e-6,
                tol_override,
            )
        )
    return out


# --- ode ---------------------------------------------------------------------------


def suite_ode(tol_override=None) -> list:
    """Leaf-curvature ODE trajectories against the implicit solution and
    against geodesic curvature measured in the reconstructed metric."""
    out = []

    worst_inner = 0.0
    for k0 in np.linspace(0.08, 0.85, 10):
        states = integrate_k(float(k0), u_span=1.0)
        worst_inner = max(worst_inner, float(trajectory_implicit_residuals(states).max()))
    out.append(
        _result(
            "ode: inner-branch trajectories track the implicit solution",
            worst_inner,
            1e-8,
            tol_override,
            detail="10 starts in (0, 1)",
        )
    )

    worst_outer = 0.0
    for k0 in np.linspace(1.25, 4.0, 10):
        states = integrate_k(float(k0), target_k=float(k0) + 0.5)
        worst_outer = max(worst_outer, float(trajectory_implicit_residuals(states).max()))
    out.append(
        _result(
            "ode: outer-branch trajectories track the implicit solution",
            worst_outer,
            1e-8,
            tol_override,
            detail="10 starts in (1, inf)",
        )
    )

    states = integrate_k(2.0, target_k=3.0)
    du = states[-1].u
    exact = implicit_solution(3.0) - implicit_solution(2.0)
    out.append(
        _result(
            "ode: interval from k=2 to k=3 matches the closed form",
            abs(du - exact),
            1e-8,
            tol_override,
            detail=f"du = {du!r}",
        )
    )

    states = integrate_k(0.0, u_span=1.0)
    drift = max(abs(st.k) for st in states)
    out.append(
        _result("ode: k = 0 stays a fixed point", drift, 1e-12, tol_override)
    )

    out.append(
        _result(
            "ode: slope reciprocal at k=2 is 3/20",
            abs(du_dk(2.0) - 0.15),
            1e-15,
            tol_override,
        )
    )

    # Reconstructed arc-length metric: parallels have geodesic curvature
    # k(u) = t(u), so the metric itself realises the ODE solutions.
    for branch, samples in (((1.2, 5.0), (1.5, 2.0, 3.7)), ((0.2, 0.8), (0.3, 0.5, 0.7))):
        chart, _, u_of_t = arc_length_chart(ClassifiedSurface(branch=branch))
        worst = 0.0
        for t in samples:
            u = u_of_t(t)
            k = geodesic_curvature_of_parallels(chart, np.array([u, 0.2]))
            worst = max(worst, abs(k - t))
        out.append(
            _result(
                f"ode: arc-length chart on branch {branch} has parallel curvature k = t",
                worst,
                1e-8,
                tol_override,
            )
        )
    return out


# --- structure ---------------------------------------------------------------------


def _structure_point_residuals(sc: Scenario, x) -> dict:
    chart, xi = sc.chart, sc.field
    d = chart.dim
    g = chart.metric_at(x)
    u = xi.value(x)
    p = BundlePoint(x, u)
    eye = np.eye(d)
    res = {}

    lift = recon = metric_match = 0.0
    G = sasaki_metric_matrix(chart, x, u)
    for i in range(d):
        X = eye[:, i]
        h = horizontal_lift(chart, p, X)
        v = vertical_lift(chart, p, X)
        lift = max(
            lift,
            float(np.max(np.abs(project_pushforward(h).comp - X))),
            float(np.max(np.abs(connection_map(chart, h).comp))),
            float(np.max(np.abs(project_pushforward(v).comp))),
            float(np.max(np.abs(connection_map(chart, v).comp - X))),
        )
        for j in range(d):
            Y = eye[:, j]
            t = BundleTangent(p, X, Y)
            back = horizontal_lift(chart, p, project_pushforward(t).comp)
            back = back + vertical_lift(chart, p, connection_map(chart, t).comp)
            recon = max(
                recon,
                float(np.max(np.abs(back.dx - t.dx))),
                float(np.max(np.abs(back.du - t.du))),
            )
            t2 = BundleTangent(p, Y, X)
            w1 = np.concatenate([t.dx, t.du])
            w2 = np.concatenate([t2.dx, t2.du])
            metric_match = max(
                metric_match,
                abs(sasaki_inner(chart, t, t2) - float(w1 @ G @ w2)),
            )
    res["lift identities"] = (lift, 1e-10)
    res["lift reconstruction"] = (recon, 1e-12)
    res["metric against block matrix"] = (metric_match, 1e-10)

    A = -xi.covariant_jacobian(x)
    induced = g + A.T @ g @ A
    ind = tang = 0.0
    images = [field_tangent_map(chart, xi, x, eye[:, i]) for i in range(d)]
    for i in range(d):
        Ku = connection_map(chart, images[i]).comp
        tang = max(tang, abs(float(Ku @ g @ u)))
        for j in range(d):
            got = sasaki_inner(chart, images[i], images[j])
            ind = max(ind, abs(got - induced[i, j]))
    res["field image stays unit-tangent"] = (tang, 1e-9)
    res["induced metric pullback"] = (ind, 1e-8)

    fr = field_singular_frames(xi, x)
    sing = 0.0
    Astar = np.linalg.solve(g, A.T @ g)
    for i in range(d):
        sing = max(
            sing,
            float(np.max(np.abs(A @ fr.e[:, i] - fr.lam[i] * fr.f[:, i]))),
            float(np.max(np.abs(Astar @ fr.f[:, i] - fr.lam[i] * fr.e[:, i]))),
        )
    res["singular frame relations"] = (sing, 1e-8)

    tangents, normals = submanifold_frames(chart, fr)
    frame = tangents + normals
    gram = 0.0
    for a, ta in enumerate(frame):
        for b, tb in enumerate(frame):
            got = sasaki_inner(chart, ta, tb)
            gram = max(gram, abs(got - (1.0 if a == b else 0.0)))
    res["bundle frame orthonormality"] = (gram, 1e-10)
    normal = max(
        abs(float(connection_map(chart, n).comp @ g @ u)) for n in normals
    )
    res["normals stay unit-tangent"] = (normal, 1e-9)

    om = omega_general(xi, x)
    res["second fundamental form symmetry"] = (om.symmetry_residual(), 1e-8)

    if d > 2:
        order = list(range(d - 1, 0, -1))
        om2 = omega_general(xi, x, frames=reorder_frames(fr, order))
        c1, c2 = classify(om), classify(om2)
        invariance = abs(om.max_abs() - om2.max_abs())
        if (c1.totally_geodesic, c1.minimal) != (c2.totally_geodesic, c2.minimal):
            invariance = 1.0
        res["classification frame-order invariance"] = (invariance, 1e-10)
    return res


def suite_structure(points: int = 6, tol_override=None) -> list:
    """Bundle lift identities, frame orthonormality, induced metric, and
    classification invariance on every builtin scenario."""
    out = []
    for name, sc in builtin_scenarios().items():
        pts = _points(sc, points)
        worst: dict = {}
        for x in pts:
            for label, (residual, tol) in _structure_point_residuals(sc, x).items():
                prev = worst.get(label, (0.0, tol))[0]
                worst[label] = (max(prev, residual), tol)
        for label, (residual, tol) in worst.items():
            out.append(
                _result(f"structure: {name} {label}", residual, tol, tol_override)
            )
    return out


# --- registry ----------------------------------------------------------------------

ALL_SUITES = {
    "curvature": suite_curvature,
    "oracle": suite_oracle,
    "leaf-identities": suite_leaf_identities,
    "ode": suite_ode,
    "structure": suite_structure,
}


def run_suites(names, tol_override=None) -> list:
    """Concatenated results of the named suites, in registry order."""
    out = []
    for name in names:
        out.extend(ALL_SUITES[name](tol_override=tol_override))
    return out
