"""Named chart-plus-field scenarios and deterministic sampling.

The builtin registry covers the parallel fields on flat space, the
radial field on the polar sphere chart, and the classified family for
leaf dimensions 1..3; ``custom`` scenarios are assembled from user
expressions.  Sample points come from an unscrambled Halton sequence
(reproducible across runs) shrunk away from the region boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .classified import ClassifiedSurface, classified_field, classified_metric
from .errors import ScenarioError
from .manifold import ChartMetric, UnitField

DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class Scenario:
    """A chart, a unit field on it, and where to sample it.

    ``region`` gives per-coordinate closed sampling bounds; ``foliation``
    marks fields that are geodesic with integrable orthogonal complement
    (so leaf-based operators apply); ``oracle_tol`` is the agreement
    tolerance against the brute-force oracle.
    """

    name: str
    chart: ChartMetric
    field: UnitField
    region: tuple
    tolerance: float = 1e-6
    foliation: bool = True
    oracle_tol: float = 2e-4
    expect_totally_geodesic: bool | None = None
    expect_minimal: bool | None = None
    description: str = ""


def sample_points(region, count: int, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    """``count`` low-discrepancy points inside ``region``, shrunk by
    ``margin`` of each range (FD stencils need interior room).

    Deterministic: unscrambled Halton, first point (the origin) skipped.
    """
    lo = np.array([a for a, _ in region], dtype=float)
    hi = np.array([b for _, b in region], dtype=float)
    lo_m = lo + margin * (hi - lo)
    hi_m = hi - margin * (hi - lo)
    engine = qmc.Halton(d=len(region), scramble=False)
    engine.fast_forward(1)
    unit = engine.random(count)
    return lo_m + unit * (hi_m - lo_m)


def _flat_scenario(dim: int) -> Scenario:
    names = ("x", "y", "z", "w")[:dim]
    chart = ChartMetric.from_expressions(
        names, {(i, i): "1" for i in range(dim)}
    )
    field = UnitField.from_expressions(chart, ["1"] + ["0"] * (dim - 1))
    return Scenario(
        name=f"flat{dim}-parallel",
        chart=chart,
        field=field,
        region=tuple((-1.0, 1.0) for _ in range(dim)),
        expect_totally_geodesic=True,
        expect_minimal=True,
        description=f"parallel field on Euclidean {dim}-space",
    )


def _sphere_scenario() -> Scenario:
    chart = ChartMetric.from_expressions(
        ("u", "v"),
        {(0, 0): "1", (1, 1): "sin(u)^2"},
        domain_guard=lambda x: 0.02 < x[0] < math.pi - 0.02,
    )
    field = UnitField.from_expressions(chart, ["1", "0"])
    return Scenario(
        name="sphere2",
        chart=chart,
        field=field,
        region=((0.4, 2.7), (0.0, 2.0 * math.pi)),
        expect_totally_geodesic=False,
        expect_minimal=True,
        description="radial field on the unit sphere, polar chart",
    )


def _classified_scenario(n: int) -> Scenario:
    surface = ClassifiedSurface(a=1.0, branch=(1.2, 5.0), n=n)
    chart = classified_metric(surface)
    field = classified_field(chart)
    region = ((1.2, 5.0),) + tuple((0.0, 1.0) for _ in range(n))
    name = "classified" if n == 1 else f"classified-n{n}"
    return Scenario(
        name=name,
        chart=chart,
        field=field,
        region=region,
        oracle_tol=2e-4 if n == 1 else 5e-4,
        expect_totally_geodesic=True,
        expect_minimal=True,
        description=f"classified metric, leaf dimension {n}, outer branch",
    )


def builtin_scenarios() -> dict:
    """The named registry; fresh objects each call, keyed by name."""
    entries = [
        _flat_scenario(2),
        _flat_scenario(3),
        _sphere_scenario(),
        _classified_scenario(1),
        _classified_scenario(2),
        _classified_scenario(3),
    ]
    return {s.name: s for s in entries}


def build_custom_scenario(
    coords,
    metric_entries,
    field_entries,
    region,
    tolerance: float = 1e-6,
    name: str = "custom",
) -> Scenario:
    """Scenario from expression strings.

    ``metric_entries`` lists the upper triangle row-major (g_00, g_01,
    ..., g_11, ...); ``field_entries`` lists the d field components;
    ``region`` gives (lo, hi) per coordinate.
    """
    coords = tuple(c.strip() for c in coords)
    d = len(coords)
    expected = d * (d + 1) // 2
    if len(metric_entries) != expected:
        raise ScenarioError(
            f"need {expected} upper-triangle metric entries for d={d}, "
            f"got {len(metric_entries)}"
        )
    if len(field_entries) != d:
        raise ScenarioError(f"need {d} field components, got {len(field_entries)}")
    if len(region) != d:
        raise ScenarioError(f"need {d} sampling intervals, got {len(region)}")
    comps = {}
    pos = 0
    for i in range(d):
        for j in range(i, d):
            comps[(i, j)] = metric_entries[pos]
            pos += 1
    try:
        chart = ChartMetric.from_expressions(coords, comps)
        field = UnitField.from_expressions(chart, field_entries)
    except Exception as exc:
        raise ScenarioError(f"custom scenario does not parse: {exc}") from exc
    region = tuple((float(a), float(b)) for a, b in region)
    for a, b in region:
        if not a < b:
            raise ScenarioError(f"empty sampling interval ({a}, {b})")
    return Scenario(
        name=name,
        chart=chart,
        field=field,
        region=region,
        tolerance=tolerance,
        description="user-supplied expressions",
    )


def detect_foliation(scenario: Scenario, points: np.ndarray) -> bool:
    """Probe whether leaf-based operators apply on this sample."""
    from .errors import NotGeodesic, NotIntegrable, NotSelfAdjoint

    try:
        from .fieldgeo import leaf_data

        leaf_data(scenario.field, points[0])
        return True
    except (NotGeodesic, NotIntegrable, NotSelfAdjoint):
        return False
