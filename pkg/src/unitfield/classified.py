"""The classified metric family and its associated surface of revolution.

A radial unit field on ds^2 = g_tt dt^2 + a^2 t^2/(t^2+1)^2 dv^2 with
g_tt = (t^2-1)^2 / (t^4 (t^2+1)^2) is totally geodesic in the unit
tangent bundle; the parameter t equals the geodesic curvature of the
t = const circles.  This module provides the leaf-curvature ODE
k' = k^2 (k^2+1) / (k^2-1) together with its implicit solution
u = 2 arctan k + 1/k + u0, the metric constructor for leaf dimension
n >= 1, the profile curve (x(t), z(t)) realizing the n = 1 case as a
surface of revolution in Euclidean 3-space, and mesh/CSV export.
"""

from __future__ import annotations

import csv
import math
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import (
    BranchError,
    BranchExit,
    FormError,
    PoleError,
    SamplingError,
    ZeroCurvature,
)
from .manifold import ChartMetric, UnitField

POLE_GUARD = 1e-3
DEFAULT_GUARD_MARGIN = 0.05
DEFAULT_T_CAP = 50.0

G_TT = "(t^2-1)^2/(t^4*(t^2+1)^2)"
XI_T = "t^2*(t^2+1)/(t^2-1)"
PROFILE_X = "t/(t^2+1)"
PROFILE_Z = "(2*t^2+1)^(3/2)/(t*(t^2+1))"
GAUSS_K = "2*t^2/(t^2-1)"

_BOUNDARIES = (-1.0, 0.0, 1.0)


def branch_of(t: float):
    """Index of the t-interval among (-inf,-1), (-1,0), (0,1), (1,inf),
    or None on a boundary."""
    if t in _BOUNDARIES:
        return None
    if t < -1.0:
        return 0
    if t < 0.0:
        return 1
    if t < 1.0:
        return 2
    return 3


@dataclass(frozen=True)
class ClassifiedSurface:
    """Parameters of one member of the classified family.

    ``a`` scales the parallel radius f(t) = a t/(t^2+1); ``branch`` is a
    closed t-interval inside one of the four admissible intervals;
    ``n`` is the leaf dimension (n = 1 is the surface case).
    """

    a: float = 1.0
    branch: tuple = (1.2, 5.0)
    n: int = 1

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"scale a must be positive, got {self.a}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"leaf dimension must be an integer >= 1, got {self.n}")
        lo, hi = self.branch
        if not lo < hi:
            raise BranchError(f"empty branch interval ({lo}, {hi})")
        blo, bhi = branch_of(lo), branch_of(hi)
        if blo is None or bhi is None or blo != bhi:
            raise BranchError(
                f"branch ({lo}, {hi}) touches or crosses a boundary of "
                "(-inf,-1), (-1,0), (0,1), (1,inf)"
            )

    def branch_index(self) -> int:
        return branch_of(self.branch[0])


def classified_metric(
    s: ClassifiedSurface,
    guard_margin: float = DEFAULT_GUARD_MARGIN,
    t_cap: float = DEFAULT_T_CAP,
) -> ChartMetric:
    """Chart metric of the family: coords (t, v) for n = 1, else
    (t, v1..vn); components are DSL expressions (analytic derivatives).

    The domain guard excludes |t| < guard_margin, |t^2 - 1| < guard_margin,
    |t| > t_cap, and everything outside the branch interval.
    """
    if s.n == 1:
        coords = ("t", "v")
    else:
        coords = ("t",) + tuple(f"v{i}" for i in range(1, s.n + 1))
    g_vv = f"{s.a * s.a!r}*t^2/(t^2+1)^2"
    comps = {(0, 0): G_TT}
    for i in range(1, s.n + 1):
        comps[(i, i)] = g_vv
    lo, hi = s.branch

    def guard(x, lo=lo, hi=hi, margin=guard_margin, cap=t_cap):
        t = x[0]
        return (
            lo <= t <= hi
            and abs(t) >= margin
            and abs(t * t - 1.0) >= margin
            and abs(t) <= cap
        )

    return ChartMetric.from_expressions(coords, comps, domain_guard=guard)


def classified_field(chart: ChartMetric) -> UnitField:
    """The unit field normal to the t = const leaves, valid on every
    branch: xi^t = t^2 (t^2+1)/(t^2-1), parallel components zero."""
    exprs = [XI_T] + ["0"] * (chart.dim - 1)
    return UnitField.from_expressions(chart, exprs)


# --- leaf-curvature ODE ---------------------------------------------------------


@dataclass(frozen=True)
class ODEState:
    """Arc length u along the field's geodesics and leaf curvature k(u)."""

    u: float
    k: float


def ode_rhs(k: float) -> float:
    """dk/du = k^2 (k^2+1) / (k^2-1)."""
    k = float(k)
    denom = k * k - 1.0
    if abs(denom) <= 1e-10:
        raise PoleError(f"pole at k^2 = 1 (k = {k})")
    return k * k * (k * k + 1.0) / denom


def implicit_solution(k: float, u0: float = 0.0) -> float:
    """u(k) = 2 arctan k + 1/k + u0, the first integral of the ODE."""
    k = float(k)
    if k == 0.0:
        raise ZeroCurvature("implicit solution undefined at k = 0")
    return 2.0 * math.atan(k) + 1.0 / k + u0


def du_dk(k: float) -> float:
    """Derivative of the implicit solution: (k^2-1)/(k^2 (k^2+1))."""
    k = float(k)
    if k == 0.0:
        raise ZeroCurvature("du/dk undefined at k = 0")
    return (k * k - 1.0) / (k * k * (k * k + 1.0))


def integrate_k(
    k0: float,
    u_span: float | None = None,
    target_k: float | None = None,
    rtol: float = 1e-10,
    max_abs_k: float = 1e6,
) -> list:
    """Adaptive 4th/5th-order Runge-Kutta trajectory of the leaf ODE.

    Provide either a u-interval length or a target curvature (the span
    is then bracketed from the implicit solution and integration stops
    at the crossing).  The trajectory halts with BranchExit before
    |k^2 - 1| < 1e-3 or |k| > max_abs_k.
    """
    k0 = float(k0)
    if abs(k0 * k0 - 1.0) <= POLE_GUARD:
        raise PoleError(f"pole at k^2 = 1 (k0 = {k0})")
    if (u_span is None) == (target_k is None):
        raise ValueError("provide exactly one of u_span, target_k")

    if target_k is not None:
        target_k = float(target_k)
        if branch_of(target_k) != branch_of(k0):
            raise BranchError(
                f"target k = {target_k} lies on a different branch than k0 = {k0}"
            )
        if abs(target_k * target_k - 1.0) <= POLE_GUARD:
            raise PoleError(f"pole at k^2 = 1 (target {target_k})")
        du = implicit_solution(target_k) - implicit_solution(k0)
        if du == 0.0:
            return [ODEState(0.0, k0)]
        span = 1.25 * du
    else:
        span = float(u_span)
        if span == 0.0:
            return [ODEState(0.0, k0)]

    def rhs(u, y):
        k = y[0]
        denom = k * k - 1.0
        if abs(denom) < 1e-12:
            denom = math.copysign(1e-12, denom if denom != 0.0 else 1.0)
        return [k * k * (k * k + 1.0) / denom]

    def ev_pole(u, y):
        return abs(y[0] * y[0] - 1.0) - POLE_GUARD

    ev_pole.terminal = True

    def ev_blowup(u, y):
        return abs(y[0]) - max_abs_k

    ev_blowup.terminal = True

    events = [ev_pole, ev_blowup]
    if target_k is not None:

        def ev_target(u, y):
            return y[0] - target_k

        ev_target.terminal = True
        events.append(ev_target)

    sol = solve_ivp(
        rhs,
        (0.0, span),
        [k0],
        method="RK45",
        rtol=rtol,
        atol=1e-12,
        events=events,
        dense_output=False,
    )
    states = [ODEState(float(u), float(k)) for u, k in zip(sol.t, sol.y[0])]

    pole_hit = len(sol.t_events[0]) > 0
    blow_hit = len(sol.t_events[1]) > 0
    if pole_hit or blow_hit:
        last = states[-1]
        reason = "k^2 approaching 1" if pole_hit else "|k| blowing up"
        raise BranchExit(
            f"trajectory left the branch ({reason}) at u = {last.u:.6g}, "
            f"k = {last.k:.6g}"
        )
    if target_k is not None:
        if len(sol.t_events[2]) == 0:
            raise BranchExit(
                f"target k = {target_k} not reached within the bracketed span"
            )
        ue = float(sol.t_events[2][0])
        ke = float(sol.y_events[2][0][0])
        if not states or states[-1].u != ue:
            states = [st for st in states if (st.u < ue) == (span > 0)] + [
                ODEState(ue, ke)
            ]
    return states


def trajectory_implicit_residuals(states) -> np.ndarray:
    """|implicit_solution(k_i, u0) - u_i| with u0 fixed by the first state.

    For the k = 0 fixed point the residual is the curvature drift."""
    first = states[0]
    if abs(first.k) < 1e-12:
        return np.array([abs(st.k - first.k) for st in states])
    u0 = first.u - implicit_solution(first.k)
    return np.array([abs(implicit_solution(st.k, u0) - st.u) for st in states])


# --- profile curve and mesh -------------------------------------------------------


@dataclass(frozen=True)
class ProfilePoint:
    """Meridian point of the revolution surface: radius x, height z,
    Gaussian curvature K; ``singular`` marks the cone point t = 1."""

    t: float
    x: float
    z: float
    K: float
    singular: bool


def gauss_curvature_value(t: float) -> float:
    """Closed-form curvature 2t^2/(t^2-1) of the two-dimensional metric;
    nan on the parabolic circle t = 1."""
    t = float(t)
    if abs(t * t - 1.0) <= 1e-12:
        return math.nan
    return 2.0 * t * t / (t * t - 1.0)


def profile_curve(s: ClassifiedSurface, t: float) -> ProfilePoint:
    """(x, z, K) at parameter t > 0, with x = t/(t^2+1) and
    z = (2t^2+1)^(3/2) / (t (t^2+1)) (additive constant fixed to 0,
    positive-derivative branch)."""
    if s.a != 1.0:
        raise ValueError("the profile curve is only realized for a = 1")
    t = float(t)
    if t <= 0.0:
        raise BranchError(f"profile parameter must be positive, got {t}")
    x = t / (t * t + 1.0)
    z = (2.0 * t * t + 1.0) ** 1.5 / (t * (t * t + 1.0))
    singular = abs(t - 1.0) <= 1e-12
    K = math.nan if singular else gauss_curvature_value(t)
    return ProfilePoint(t, x, z, K, singular)


@dataclass(frozen=True)
class Mesh:
    """Triangle mesh of the revolution surface, t-major vertex order."""

    vertices: np.ndarray  # (N, 3)
    faces: np.ndarray  # (M, 3), 0-based
    t: np.ndarray  # (N,)
    v: np.ndarray  # (N,)
    curvature: np.ndarray  # (N,)


def mesh_export(
    s: ClassifiedSurface,
    t_samples: int,
    v_samples: int,
    t_min: float | None = None,
    t_max: float | None = None,
) -> Mesh:
    """Sample the surface of revolution on a t x v grid, closed in v.

    Vertices are (x(t) cos v, x(t) sin v, z(t)); each grid quad is split
    into two triangles; per-vertex Gaussian curvature is attached.
    """
    if s.n != 1 or s.a != 1.0:
        raise ValueError("mesh export is defined for n = 1, a = 1")
    if t_samples < 2 or v_samples < 3:
        raise SamplingError(
            f"need t_samples >= 2 and v_samples >= 3, got {t_samples}, {v_samples}"
        )
    lo = s.branch[0] if t_min is None else float(t_min)
    hi = s.branch[1] if t_max is None else float(t_max)
    if branch_of(lo) is None or branch_of(lo) != branch_of(hi) or not lo < hi:
        raise BranchError(f"mesh range ({lo}, {hi}) must stay inside one branch")
    if lo <= 0.0:
        raise BranchError("mesh range must be positive (profile needs t > 0)")

    ts = np.linspace(lo, hi, t_samples)
    vs = 2.0 * math.pi * np.arange(v_samples) / v_samples
    verts = np.empty((t_samples * v_samples, 3))
    tcol = np.empty(t_samples * v_samples)
    vcol = np.empty(t_samples * v_samples)
    kcol = np.empty(t_samples * v_samples)
    for i, t in enumerate(ts):
        p = profile_curve(s, t)
        for j, v in enumerate(vs):
            idx = i * v_samples + j
            verts[idx] = (p.x * math.cos(v), p.x * math.sin(v), p.z)
            tcol[idx] = t
            vcol[idx] = v
            kcol[idx] = p.K
    faces = []
    for i in range(t_samples - 1):
        for j in range(v_samples):
            jn = (j + 1) % v_samples
            v00 = i * v_samples + j
            v01 = i * v_samples + jn
            v11 = (i + 1) * v_samples + jn
            v10 = (i + 1) * v_samples + j
            faces.append((v00, v01, v11))
            faces.append((v00, v11, v10))
    return Mesh(verts, np.array(faces, dtype=int), tcol, vcol, kcol)


@contextmanager
def _text_sink(path, newline):
    """Open ``path`` for writing, or pass a file-like object through."""
    if hasattr(path, "write"):
        yield path
    else:
        with open(path, "w", encoding="utf-8", newline=newline) as fh:
            yield fh


def write_obj(mesh: Mesh, path):
    with _text_sink(path, "\n") as fh:
        for vx, vy, vz in mesh.vertices:
            fh.write(f"v {vx!r} {vy!r} {vz!r}\n")
        for a, b, c in mesh.faces:
            fh.write(f"f {a + 1} {b + 1} {c + 1}\n")


def write_curvature_csv(mesh: Mesh, path):
    """Per-vertex curvature keyed by 1-based vertex index (matching OBJ)."""
    with _text_sink(path, "") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "t", "v", "K"])
        for idx in range(len(mesh.vertices)):
            writer.writerow(
                [idx + 1, repr(mesh.t[idx]), repr(mesh.v[idx]), repr(mesh.curvature[idx])]
            )


def write_profile_csv(points, path):
    with _text_sink(path, "") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "z", "K", "singular_flag"])
        for p in points:
            writer.writerow([repr(p.t), repr(p.x), repr(p.z), repr(p.K), int(p.singular)])


# --- warped-product helpers ---------------------------------------------------------


def geodesic_curvature_of_parallels(m: ChartMetric, x) -> float:
    """k = -(d_u g)/g for a metric du^2 + g(u)^2 sum (dv^a)^2.

    The chart must be in arc-length orthogonal form: g_uu = 1, no cross
    terms, and equal parallel components."""
    x = m.check_point(np.asarray(x, dtype=float))
    g = m.metric_at(x)
    d = m.dim
    if abs(g[0, 0] - 1.0) > 1e-9:
        raise FormError(f"g_uu = {g[0, 0]}, expected 1 (arc-length form)")
    off = float(np.max(np.abs(g - np.diag(np.diag(g)))))
    if off > 1e-9:
        raise FormError(f"cross terms up to {off:.3e}; need orthogonal form")
    scale = abs(g[1, 1])
    for i in range(2, d):
        if abs(g[i, i] - g[1, 1]) > 1e-9 * max(1.0, scale):
            raise FormError("parallel components differ; not a warped product")
    dg = m.metric_derivs(x)
    return float(-dg[0, 1, 1] / (2.0 * g[1, 1]))


def arc_length_chart(s: ClassifiedSurface):
    """Reparametrize the classified metric by arc length along the
    t-lines: returns (chart in (u, v..) coordinates, t_of_u, u_of_t).

    u(t) = 2 arctan t + 1/t; the inverse is found by bracketing plus a
    Newton polish.  The chart is callable-backed (finite differences).
    """
    lo, hi = s.branch
    pad = 0.02 * (hi - lo)
    interval = [(-math.inf, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, math.inf)][
        s.branch_index()
    ]
    blo = lo - pad if math.isinf(interval[0]) else max(lo - pad, interval[0] + 1e-6)
    bhi = hi + pad if math.isinf(interval[1]) else min(hi + pad, interval[1] - 1e-6)

    def u_of_t(t):
        return 2.0 * math.atan(t) + 1.0 / t

    u_a, u_b = sorted((u_of_t(blo), u_of_t(bhi)))

    def t_of_u(u):
        if not u_a <= u <= u_b:
            raise BranchError(f"u = {u} outside the reparametrized branch")
        t = brentq(lambda tt: u_of_t(tt) - u, blo, bhi, xtol=1e-14)
        for _ in range(2):
            der = du_dk(t)
            if der != 0.0:
                t = t - (u_of_t(t) - u) / der
        return t

    if s.n == 1:
        coords = ("u", "v")
    else:
        coords = ("u",) + tuple(f"v{i}" for i in range(1, s.n + 1))

    def metric_cb(xy):
        t = t_of_u(xy[0])
        f = s.a * t / (t * t + 1.0)
        out = np.eye(s.n + 1)
        out[1:, 1:] *= f * f
        return out

    margin = 0.001 * (u_b - u_a)
    chart = ChartMetric.from_callables(
        coords,
        metric_cb,
        domain_guard=lambda xy: u_a + margin <= xy[0] <= u_b - margin,
    )
    return chart, t_of_u, u_of_t
