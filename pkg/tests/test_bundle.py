"""Tangent-bundle metric: lifts, connection map, induced metric."""

import math

import numpy as np
import pytest

from unitfield.bundle import (
    BundlePoint,
    BundleTangent,
    check_unit_point,
    connection_map,
    field_tangent_map,
    horizontal_lift,
    project_pushforward,
    sasaki_inner,
    vertical_lift,
)
from unitfield.errors import BaseMismatch, NotUnit
from unitfield.manifold import ChartMetric, UnitField
from unitfield.oracle import sasaki_metric_matrix


@pytest.fixture(scope="module")
def sphere_chart():
    return ChartMetric.from_expressions(("u", "v"), {(0, 0): "1", (1, 1): "sin(u)^2"})


@pytest.fixture(scope="module")
def sphere_field(sphere_chart):
    return UnitField.from_expressions(sphere_chart, ["1", "0"])


@pytest.fixture(scope="module")
def bundle_point(sphere_chart):
    x = np.array([math.pi / 3, 0.5])
    return BundlePoint(x, np.array([1.0, 0.0]))


class TestLifts:
    def test_horizontal_lift_projects_back(self, sphere_chart, bundle_point):
        X = np.array([0.7, -0.4])
        h = horizontal_lift(sphere_chart, bundle_point, X)
        assert np.allclose(project_pushforward(h).comp, X)
        assert np.allclose(connection_map(sphere_chart, h).comp, 0.0, atol=1e-15)

    def test_vertical_lift_is_connection_preimage(self, sphere_chart, bundle_point):
        X = np.array([0.7, -0.4])
        v = vertical_lift(sphere_chart, bundle_point, X)
        assert np.allclose(project_pushforward(v).comp, 0.0)
        assert np.allclose(connection_map(sphere_chart, v).comp, X)

    def test_every_tangent_splits(self, sphere_chart, bundle_point):
        t = BundleTangent(bundle_point, np.array([0.2, 1.0]), np.array([-0.5, 0.3]))
        h = horizontal_lift(sphere_chart, bundle_point, project_pushforward(t).comp)
        v = vertical_lift(sphere_chart, bundle_point, connection_map(sphere_chart, t).comp)
        back = h + v
        assert np.allclose(back.dx, t.dx, atol=1e-15)
        assert np.allclose(back.du, t.du, atol=1e-15)

    def test_flat_chart_connection_map_is_du(self):
        m = ChartMetric.from_expressions(("x", "y"), {(0, 0): "1", (1, 1): "1"})
        p = BundlePoint(np.array([0.3, 0.8]), np.array([0.6, 0.8]))
        t = BundleTangent(p, np.array([1.0, 2.0]), np.array([3.0, 4.0]))
        assert np.allclose(connection_map(m, t).comp, [3.0, 4.0])


class TestMetric:
    def test_lift_orthogonality(self, sphere_chart, bundle_point):
        g = sphere_chart.metric_at(bundle_point.x)
        X = np.array([0.7, -0.4])
        Y = np.array([0.1, 0.9])
        h_x = horizontal_lift(sphere_chart, bundle_point, X)
        h_y = horizontal_lift(sphere_chart, bundle_point, Y)
        v_x = vertical_lift(sphere_chart, bundle_point, X)
        v_y = vertical_lift(sphere_chart, bundle_point, Y)
        want = float(X @ g @ Y)
        assert sasaki_inner(sphere_chart, h_x, h_y) == pytest.approx(want)
        assert sasaki_inner(sphere_chart, v_x, v_y) == pytest.approx(want)
        assert sasaki_inner(sphere_chart, h_x, v_y) == pytest.approx(0.0, abs=1e-15)

    def test_matches_block_matrix(self, sphere_chart, bundle_point):
        G = sasaki_metric_matrix(sphere_chart, bundle_point.x, bundle_point.u)
        t1 = BundleTangent(bundle_point, np.array([0.2, 1.0]), np.array([-0.5, 0.3]))
        t2 = BundleTangent(bundle_point, np.array([1.0, 0.0]), np.array([0.4, -1.2]))
        w1 = np.concatenate([t1.dx, t1.du])
        w2 = np.concatenate([t2.dx, t2.du])
        assert sasaki_inner(sphere_chart, t1, t2) == pytest.approx(
            float(w1 @ G @ w2), abs=1e-14
        )

    def test_base_mismatch(self, sphere_chart, bundle_point):
        other = BundlePoint(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        t1 = BundleTangent(bundle_point, np.zeros(2), np.zeros(2))
        t2 = BundleTangent(other, np.zeros(2), np.zeros(2))
        with pytest.raises(BaseMismatch):
            sasaki_inner(sphere_chart, t1, t2)
        with pytest.raises(BaseMismatch):
            t1 + t2

    def test_check_unit_point(self, sphere_chart):
        x = np.array([math.pi / 3, 0.5])
        check_unit_point(sphere_chart, BundlePoint(x, np.array([1.0, 0.0])))
        with pytest.raises(NotUnit):
            check_unit_point(sphere_chart, BundlePoint(x, np.array([1.0, 1.0])))


class TestFieldTangentMap:
    def test_image_norm_splits_into_base_and_shape_parts(
        self, sphere_chart, sphere_field
    ):
        # |d xi(X)|^2 = |X|^2 + |nabla_X xi|^2; for the polar field on the
        # sphere at u the second term is cot(u)^2 for the unit parallel X.
        u = math.pi / 3
        x = np.array([u, 0.5])
        X = np.array([0.0, 1.0 / math.sin(u)])
        image = field_tangent_map(sphere_chart, sphere_field, x, X)
        got = sasaki_inner(sphere_chart, image, image)
        assert got == pytest.approx(1.0 + 1.0 / math.tan(u) ** 2)

    def test_base_point_carries_field_value(self, sphere_chart, sphere_field):
        x = np.array([1.2, 0.1])
        image = field_tangent_map(sphere_chart, sphere_field, x, np.array([1.0, 0.0]))
        assert np.allclose(image.base.u, sphere_field.value(x))

    def test_image_is_tangent_to_unit_sphere_bundle(self, sphere_chart, sphere_field):
        x = np.array([1.2, 0.1])
        g = sphere_chart.metric_at(x)
        u = sphere_field.value(x)
        for X in (np.array([1.0, 0.0]), np.array([0.3, -0.8])):
            image = field_tangent_map(sphere_chart, sphere_field, x, X)
            vertical = connection_map(sphere_chart, image).comp
            assert abs(float(vertical @ g @ u)) < 1e-14

    def test_induced_metric_formula(self):
        from unitfield.classified import ClassifiedSurface, classified_field, classified_metric

        chart = classified_metric(ClassifiedSurface())
        field = classified_field(chart)
        x = np.array([2.0, 0.5])
        g = chart.metric_at(x)
        A = -field.covariant_jacobian(x)
        induced = g + A.T @ g @ A
        for i in range(2):
            for j in range(2):
                e_i, e_j = np.eye(2)[:, i], np.eye(2)[:, j]
                got = sasaki_inner(
                    chart,
                    field_tangent_map(chart, field, x, e_i),
                    field_tangent_map(chart, field, x, e_j),
                )
                assert got == pytest.approx(induced[i, j], abs=1e-14)
