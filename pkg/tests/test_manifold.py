"""Chart metrics: values, derivatives, curvature, frames, unit fields."""

import math

import numpy as np
import pytest

from unitfield.errors import (
    DegenerateMetric,
    DegeneratePlane,
    DependentInput,
    DomainError,
    NotUnit,
)
from unitfield.manifold import ChartMetric, UnitField, fix_signs


@pytest.fixture(scope="module")
def sphere_chart():
    return ChartMetric.from_expressions(("u", "v"), {(0, 0): "1", (1, 1): "sin(u)^2"})


@pytest.fixture(scope="module")
def warped_chart():
    return ChartMetric.from_expressions(
        ("x", "y"),
        {(0, 0): "1+0.3*sin(y)", (0, 1): "0.1*x*y", (1, 1): "2+cos(x)"},
    )


class TestConstruction:
    def test_values_and_symmetry(self, warped_chart):
        x = np.array([0.4, 0.7])
        g = warped_chart.metric_at(x)
        assert g[0, 1] == g[1, 0] == pytest.approx(0.1 * 0.4 * 0.7)
        assert g[0, 0] == pytest.approx(1 + 0.3 * math.sin(0.7))

    def test_nested_list_input(self):
        m = ChartMetric.from_expressions(("x", "y"), [["2", "0"], ["0", "3"]])
        assert np.allclose(m.metric_at(np.zeros(2)), np.diag([2.0, 3.0]))

    def test_duplicate_entry_rejected(self):
        with pytest.raises(ValueError):
            ChartMetric.from_expressions(
                ("x", "y"), {(0, 0): "1", (0, 1): "1", (1, 0): "2", (1, 1): "1"}
            )

    def test_asymmetric_list_rejected(self):
        with pytest.raises(ValueError):
            ChartMetric.from_expressions(("x", "y"), [["1", "2"], ["3", "1"]])

    def test_diagonal_constructor(self):
        m = ChartMetric.diagonal(("u", "v"), ("1", "sin(u)^2"))
        g = m.metric_at(np.array([math.pi / 3, 0.0]))
        assert g[1, 1] == pytest.approx(0.75)

    def test_degenerate_metric(self):
        m = ChartMetric.from_expressions(("x", "y"), {(0, 0): "x", (1, 1): "1"})
        with pytest.raises(DegenerateMetric):
            m.metric_at(np.array([0.0, 0.0]))
        with pytest.raises(DegenerateMetric):
            m.metric_at(np.array([-1.0, 0.0]))

    def test_domain_checks(self, sphere_chart):
        with pytest.raises(DomainError):
            sphere_chart.metric_at(np.array([1.0, 2.0, 3.0]))
        with pytest.raises(DomainError):
            sphere_chart.metric_at(np.array([math.nan, 0.0]))

    def test_domain_guard(self):
        m = ChartMetric.from_expressions(
            ("u", "v"),
            {(0, 0): "1", (1, 1): "sin(u)^2"},
            domain_guard=lambda x: 0.0 < x[0] < math.pi,
        )
        with pytest.raises(DomainError):
            m.metric_at(np.array([-0.5, 0.0]))


class TestDerivatives:
    def test_christoffel_sphere(self, sphere_chart):
        u = math.pi / 3
        gamma = sphere_chart.christoffel(np.array([u, 1.0]))
        # Gamma^u_vv = -sin u cos u, Gamma^v_uv = cot u
        assert gamma[0, 1, 1] == pytest.approx(-math.sin(u) * math.cos(u))
        assert gamma[1, 0, 1] == pytest.approx(1 / math.tan(u))
        assert gamma[1, 1, 0] == pytest.approx(1 / math.tan(u))
        assert gamma[0, 0, 0] == 0.0

    def test_christoffel_matches_callable_route(self, warped_chart):
        fd = ChartMetric.from_callables(("x", "y"), warped_chart.metric_at)
        x = np.array([0.4, 0.7])
        assert np.max(np.abs(fd.christoffel(x) - warped_chart.christoffel(x))) < 1e-6

    def test_christoffel_derivs_match_finite_differences(self, warped_chart):
        x = np.array([0.4, 0.7])
        dgamma = warped_chart.christoffel_derivs(x)
        h = 1e-6
        for axis in range(2):
            step = np.zeros(2)
            step[axis] = h
            fd = (
                warped_chart.christoffel(x + step) - warped_chart.christoffel(x - step)
            ) / (2 * h)
            assert np.max(np.abs(dgamma[..., axis] - fd)) < 1e-7

    def test_metric_compatibility(self, warped_chart):
        x = np.array([0.4, 0.7])
        g = warped_chart.metric_at(x)
        dg = warped_chart.metric_derivs(x)
        gamma = warped_chart.christoffel(x)
        nabla_g = (
            dg
            - np.einsum("lki,lj->kij", gamma, g)
            - np.einsum("lkj,li->kij", gamma, g)
        )
        assert np.max(np.abs(nabla_g)) < 1e-14


class TestCurvature:
    def test_sphere_curvature_is_one(self, sphere_chart):
        for u in (0.5, 1.0, 2.2):
            K = sphere_chart.sectional_curvature(
                np.array([u, 0.3]), np.eye(2)[:, 0], np.eye(2)[:, 1]
            )
            assert K == pytest.approx(1.0, abs=1e-12)

    def test_hyperbolic_curvature_is_minus_one(self):
        m = ChartMetric.from_expressions(("u", "v"), {(0, 0): "1", (1, 1): "exp(2*u)"})
        K = m.sectional_curvature(np.array([0.3, 0.5]), np.eye(2)[:, 0], np.eye(2)[:, 1])
        assert K == pytest.approx(-1.0, abs=1e-12)

    def test_flat_curvature_vanishes(self):
        m = ChartMetric.from_expressions(("x", "y"), {(0, 0): "1", (1, 1): "1"})
        assert np.max(np.abs(m.curvature_tensor(np.array([0.2, 0.9])))) == 0.0

    def test_symmetries(self, warped_chart):
        x = np.array([0.4, 0.7])
        L = warped_chart.lowered_curvature(x)
        assert np.max(np.abs(L + np.einsum("ljik->lijk", L))) < 1e-14
        assert np.max(np.abs(L + np.einsum("kijl->lijk", L))) < 1e-14
        assert np.max(np.abs(L - np.einsum("jkli->lijk", L))) < 1e-14

    def test_sectional_is_plane_invariant(self, warped_chart):
        x = np.array([0.4, 0.7])
        X, Y = np.array([1.0, 0.2]), np.array([-0.3, 1.0])
        K1 = warped_chart.sectional_curvature(x, X, Y)
        K2 = warped_chart.sectional_curvature(x, 2 * X + Y, Y - X)
        assert K1 == pytest.approx(K2, rel=1e-12)

    def test_degenerate_plane(self, sphere_chart):
        with pytest.raises(DegeneratePlane):
            sphere_chart.sectional_curvature(
                np.array([1.0, 0.0]), np.array([1.0, 0.0]), np.array([2.0, 0.0])
            )

    def test_jacobi_operator_sphere(self, sphere_chart):
        x = np.array([math.pi / 3, 0.5])
        xi = np.array([1.0, 0.0])
        jd = sphere_chart.jacobi_operator(x, xi)
        assert jd.eigenvalues == pytest.approx([1.0])
        assert jd.matrix.shape == (1, 1)
        chart_vec = jd.eigenvectors_chart()[:, 0]
        assert sphere_chart.norm(x, chart_vec) == pytest.approx(1.0)

    def test_jacobi_requires_unit_vector(self, sphere_chart):
        with pytest.raises(NotUnit):
            sphere_chart.jacobi_operator(np.array([1.0, 0.0]), np.array([2.0, 0.0]))


class TestFrames:
    def test_completion_on_classified_chart(self):
        from unitfield.classified import ClassifiedSurface, classified_metric

        chart = classified_metric(ClassifiedSurface())
        comp = chart.orthonormal_completion(
            np.array([2.0, 0.5]), [np.array([20.0 / 3.0, 0.0])]
        )
        assert np.allclose(comp[:, 0], [20.0 / 3.0, 0.0])
        assert np.allclose(comp[:, 1], [0.0, 2.5])

    def test_completion_is_orthonormal(self, warped_chart):
        x = np.array([0.4, 0.7])
        g = warped_chart.metric_at(x)
        frame = warped_chart.orthonormal_completion(x, [np.array([1.0, 0.5])])
        assert np.allclose(frame.T @ g @ frame, np.eye(2), atol=1e-14)

    def test_completion_rejects_dependent_seeds(self, warped_chart):
        with pytest.raises(DependentInput):
            warped_chart.orthonormal_completion(
                np.array([0.4, 0.7]),
                [np.array([1.0, 0.0]), np.array([2.0, 0.0])],
            )

    def test_fix_signs_deterministic(self):
        cols = np.array([[-0.8, 0.0], [0.6, -1.0]])
        fixed = fix_signs(cols)
        assert np.allclose(fixed, [[0.8, 0.0], [-0.6, 1.0]])


class TestHalfTensor:
    def test_antisymmetrization_gives_curvature(self, warped_chart):
        m = warped_chart

        def comps(x):
            base = np.array([1.0, x[0]])
            return base / np.sqrt(base @ m.metric_at(x) @ base)

        xi = UnitField.from_callables(m, [lambda x: comps(x)[0], lambda x: comps(x)[1]])
        x = np.array([0.4, 0.7])
        r = m.half_tensor_components(xi, x)
        X, Y = np.array([1.0, 0.3]), np.array([-0.2, 1.1])
        anti = np.einsum("kij,i,j->k", r, X, Y) - np.einsum("kij,i,j->k", r, Y, X)
        assert np.allclose(anti, m.riemann_apply(x, X, Y, xi.value(x)), atol=1e-9)

    def test_component_contraction_matches_method(self, sphere_chart):
        xi = UnitField.from_expressions(sphere_chart, ["1", "0"])
        x = np.array([1.1, 0.3])
        r = sphere_chart.half_tensor_components(xi, x)
        X, Y = np.array([0.5, 1.0]), np.array([1.0, -0.4])
        direct = sphere_chart.half_tensor(xi, x, X, Y)
        assert np.allclose(direct, np.einsum("kij,i,j->k", r, X, Y))


class TestUnitField:
    def test_check_unit(self, sphere_chart):
        xi = UnitField.from_expressions(sphere_chart, ["1", "0"])
        xi.check_unit(np.array([1.0, 0.0]))
        bad = UnitField.from_expressions(sphere_chart, ["2", "0"])
        with pytest.raises(NotUnit):
            bad.check_unit(np.array([1.0, 0.0]))

    def test_parallel_field_has_zero_covariant_jacobian(self):
        m = ChartMetric.from_expressions(("x", "y"), {(0, 0): "1", (1, 1): "1"})
        xi = UnitField.from_expressions(m, ["1", "0"])
        assert np.max(np.abs(xi.covariant_jacobian(np.array([0.3, 0.8])))) == 0.0

    def test_covariant_derivative_sphere(self, sphere_chart):
        xi = UnitField.from_expressions(sphere_chart, ["1", "0"])
        u = 1.1
        x = np.array([u, 0.3])
        # nabla_{dv} du = cot(u) dv
        got = xi.covariant_derivative(x, np.array([0.0, 1.0]))
        assert np.allclose(got, [0.0, 1 / math.tan(u)])
        # the field direction itself is geodesic
        assert np.allclose(xi.covariant_derivative(x, np.array([1.0, 0.0])), 0.0)
