"""Chart-level Riemannian geometry.

A manifold is a single coordinate chart with metric components given either
by DSL expressions (exact derivatives) or by callables (central finite
differences).  On top of the metric this module evaluates Christoffel
symbols, the curvature tensor, sectional curvatures, the normal Jacobi
operator, second covariant derivatives of a unit field, and deterministic
orthonormal frame completion.

Index conventions (all arrays are numpy, d = chart dimension):

    gamma[k, i, j]      Christoffel symbol of the second kind with upper
                        index k, symmetric in (i, j)
    dgamma[k, i, j, l]  partial derivative of gamma[k, i, j] along x^l
    R[l, i, j, k]       curvature tensor with R(e_i, e_j) e_k having
                        l-th component R[l, i, j, k], in the convention
                        R(X, Y) Z = nab_X nab_Y Z - nab_Y nab_X Z
                                    - nab_[X,Y] Z
    L[l, i, j, k]       lowered tensor g_{lm} R[m, i, j, k]

Frames are stored as matrices whose COLUMNS are the chart components of
the frame vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMetric,
    DegeneratePlane,
    DependentInput,
    DomainError,
    NotUnit,
)
from .fields import ScalarField, as_field

MINOR_TOL = 1e-12
PLANE_TOL = 1e-12
DEPENDENT_TOL = 1e-10
UNIT_TOL = 1e-9


@dataclass(frozen=True)
class TangentVector:
    """A vector attached to a chart point, components in the coordinate basis."""

    base: np.ndarray
    comp: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float))
        object.__setattr__(self, "comp", np.asarray(self.comp, dtype=float))


def components(v) -> np.ndarray:
    """Chart components of a TangentVector or a bare array."""
    if isinstance(v, TangentVector):
        return v.comp
    return np.asarray(v, dtype=float)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Fix the sign of each column: largest-|.| entry positive, ties by index."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col) >= np.max(np.abs(col)) - 1e-14))
        if col[idx] < 0:
            out[:, j] = -col
    return out


class ChartMetric:
    """Riemannian metric on a single chart.

    Components are ScalarFields stored for the upper triangle only, so
    g_ij and g_ji are the same object and symmetry holds exactly at the
    storage level.
    """

    def __init__(self, coords, component_fields, derivative_mode, domain_guard=None):
        self.coords = tuple(coords)
        self.dim = len(self.coords)
        self.derivative_mode = derivative_mode
        self.domain_guard = domain_guard
        # component_fields: dict {(i, j) with i <= j: ScalarField}
        self._fields = component_fields

    # --- constructors ------------------------------------------------------

    @classmethod
    def from_expressions(cls, coords, components, domain_guard=None):
        """Metric from DSL expressions (strings or Expr).

        ``components`` is either a dict keyed by index pairs or a full
        nested d x d sequence.  Lower-triangle entries that conflict with
        their mirror raise ValueError; omitted entries are zero.
        """
        coords = tuple(coords)
        d = len(coords)
        table = {}
        if isinstance(components, dict):
            for (i, j), spec in components.items():
                key = (min(i, j), max(i, j))
                if key in table:
                    raise ValueError(f"metric component ({i},{j}) given twice")
                table[key] = as_field(spec, coords)
        else:
            rows = list(components)
            if len(rows) != d or any(len(list(r)) != d for r in rows):
                raise ValueError(f"expected a {d}x{d} component matrix")
            for i in range(d):
                for j in range(i, d):
                    upper, lower = rows[i][j], rows[j][i]
                    if (
                        i != j
                        and isinstance(upper, str)
                        and isinstance(lower, str)
                        and upper.replace(" ", "") != lower.replace(" ", "")
                    ):
                        raise ValueError(f"asymmetric components at ({i},{j})")
                    table[(i, j)] = as_field(upper, coords)
        for i in range(d):
            for j in range(i, d):
                table.setdefault((i, j), as_field(0.0, coords))
        return cls(coords, table, "analytic", domain_guard)

    @classmethod
    def from_callables(cls, coords, matrix_func, domain_guard=None):
        """Metric from a callable x -> d x d array; FD derivatives."""
        coords = tuple(coords)
        d = len(coords)

        def entry(i, j):
            return as_field(lambda x, i=i, j=j: np.asarray(matrix_func(x))[i, j], coords)

        table = {(i, j): entry(i, j) for i in range(d) for j in range(i, d)}
        return cls(coords, table, "finite-difference", domain_guard)

    @classmethod
    def diagonal(cls, coords, entries, domain_guard=None):
        """Diagonal metric from d expressions."""
        if len(entries) != len(coords):
            raise ValueError("need one diagonal entry per coordinate")
        return cls.from_expressions(
            coords, {(i, i): e for i, e in enumerate(entries)}, domain_guard
        )

    # --- point / value access ----------------------------------------------

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"expected a {self.dim}-vector, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError(f"non-finite coordinates {x}")
        if self.domain_guard is not None and not self.domain_guard(x):
            raise DomainError(f"point {tuple(x)} outside the chart domain")
        return x

    def component_field(self, i, j) -> ScalarField:
        return self._fields[(min(i, j), max(i, j))]

    def metric_at(self, x) -> np.ndarray:
        x = self.check_point(x)
        d = self.dim
        g = np.empty((d, d))
        for i in range(d):
            for j in range(i, d):
                val = self._fields[(i, j)].value(x)
                g[i, j] = val
                g[j, i] = val
        for k in range(1, d + 1):
            if np.linalg.det(g[:k, :k]) <= MINOR_TOL:
                raise DegenerateMetric(
                    f"leading {k}x{k} minor <= {MINOR_TOL} at {tuple(x)}"
                )
        return g

    def inverse_metric_at(self, x) -> np.ndarray:
        return np.linalg.inv(self.metric_at(x))

    def metric_derivs(self, x) -> np.ndarray:
        """dg[k, i, j] = partial of g_ij along x^k."""
        x = self.check_point(x)
        d = self.dim
        dg = np.empty((d, d, d))
        for i in range(d):
            for j in range(i, d):
                grad = self._fields[(i, j)].grad(x)
                dg[:, i, j] = grad
                dg[:, j, i] = grad
        return dg

    def metric_second_derivs(self, x) -> np.ndarray:
        """d2g[k, l, i, j] = second partial of g_ij along x^k, x^l."""
        x = self.check_point(x)
        d = self.dim
        d2g = np.empty((d, d, d, d))
        for i in range(d):
            for j in range(i, d):
                hess = self._fields[(i, j)].hess(x)
                d2g[:, :, i, j] = hess
                d2g[:, :, j, i] = hess
        return d2g

    # --- connection and curvature -------------------------------------------

    def christoffel(self, x) -> np.ndarray:
        """gamma[k, i, j] of the Levi-Civita connection."""
        g_inv = self.inverse_metric_at(x)
        dg = self.metric_derivs(x)
        # 0.5 g^{km} (d_i g_{mj} + d_j g_{mi} - d_m g_{ij})
        bracket = (
            np.einsum("imj->mij", dg) + np.einsum("jmi->mij", dg) - dg
        )
        return 0.5 * np.einsum("km,mij->kij", g_inv, bracket)

    def christoffel_derivs(self, x) -> np.ndarray:
        """dgamma[k, i, j, l] = partial of gamma[k, i, j] along x^l."""
        g_inv = self.inverse_metric_at(x)
        dg = self.metric_derivs(x)
        d2g = self.metric_second_derivs(x)
        bracket = np.einsum("imj->mij", dg) + np.einsum("jmi->mij", dg) - dg
        # d_l g^{km} = -g^{ka} (d_l g_{ab}) g^{bm}
        dg_inv = -np.einsum("ka,lab,bm->kml", g_inv, dg, g_inv)
        dbracket = (
            np.einsum("limj->mijl", d2g)
            + np.einsum("ljmi->mijl", d2g)
            - np.einsum("lmij->mijl", d2g)
        )
        return 0.5 * (
            np.einsum("kml,mij->kijl", dg_inv, bracket)
            + np.einsum("km,mijl->kijl", g_inv, dbracket)
        )

    def curvature_tensor(self, x) -> np.ndarray:
        """R[l, i, j, k]: the l-component of R(e_i, e_j) e_k."""
        gamma = self.christoffel(x)
        dgamma = self.christoffel_derivs(x)
        R = (
            np.einsum("ljki->lijk", dgamma)
            - np.einsum("likj->lijk", dgamma)
            + np.einsum("lim,mjk->lijk", gamma, gamma)
            - np.einsum("ljm,mik->lijk", gamma, gamma)
        )
        return R

    def lowered_curvature(self, x) -> np.ndarray:
        """L[l, i, j, k] = inner product of R(e_i, e_j) e_k with e_l."""
        g = self.metric_at(x)
        return np.einsum("lm,mijk->lijk", g, self.curvature_tensor(x))

    def riemann_apply(self, x, X, Y, Z) -> np.ndarray:
        """Components of R(X, Y) Z at x."""
        R = self.curvature_tensor(x)
        return np.einsum(
            "lijk,i,j,k->l", R, components(X), components(Y), components(Z)
        )

    def curvature_inner(self, x, X, Y, Z, W) -> float:
        """Inner product of R(X, Y) Z with W at x."""
        L = self.lowered_curvature(x)
        return float(
            np.einsum(
                "lijk,l,i,j,k->",
                L,
                components(W),
                components(X),
                components(Y),
                components(Z),
            )
        )

    # --- derived scalar operators --------------------------------------------

    def inner(self, x, X, Y) -> float:
        g = self.metric_at(x)
        return float(components(X) @ g @ components(Y))

    def norm(self, x, X) -> float:
        return math.sqrt(max(self.inner(x, X, X), 0.0))

    def sectional_curvature(self, x, X, Y) -> float:
        X, Y = components(X), components(Y)
        g = self.metric_at(x)
        xx = float(X @ g @ X)
        yy = float(Y @ g @ Y)
        xy = float(X @ g @ Y)
        denom = xx * yy - xy * xy
        if denom < PLANE_TOL:
            raise DegeneratePlane(f"plane area^2 = {denom} below {PLANE_TOL}")
        return self.curvature_inner(x, X, Y, Y, X) / denom

    def jacobi_operator(self, x, xi) -> "JacobiData":
        """Normal Jacobi operator R(., xi) xi on the orthogonal complement.

        Returns the symmetric matrix in a deterministic orthonormal basis
        of xi-perp, its eigenvalues sorted descending, and eigenvectors
        with signs fixed.
        """
        xi = components(xi)
        norm = self.norm(x, xi)
        if abs(norm - 1.0) > 1e-10:
            raise NotUnit(f"|xi| = {norm}, expected 1 within 1e-10")
        frame = self.orthonormal_completion(x, [xi])
        basis = frame[:, 1:]
        L = self.lowered_curvature(x)
        # M[a, b] = < R(E_b, xi) xi, E_a >
        M = np.einsum("lijk,la,ib,j,k->ab", L, basis, basis, xi, xi)
        M = 0.5 * (M + M.T)
        eigvals, eigvecs = np.linalg.eigh(M)
        order = np.argsort(eigvals)[::-1]
        eigvals = eigvals[order]
        eigvecs = fix_signs(eigvecs[:, order])
        return JacobiData(M, eigvals, eigvecs, basis)

    # --- unit-field second derivatives ----------------------------------------

    def half_tensor_components(self, xi_field: "UnitField", x) -> np.ndarray:
        """r[k, i, j]: the k-component of the second covariant derivative
        of the field applied to (e_i, e_j)."""
        xi_field.check_unit(x)
        gamma = self.christoffel(x)
        dgamma = self.christoffel_derivs(x)
        xi = xi_field.value(x)
        jac = xi_field.jacobian(x)          # jac[k, j] = d_j xi^k
        hess = xi_field.second_derivs(x)    # hess[k, i, j] = d_i d_j xi^k
        covjac = jac + np.einsum("kjm,m->kj", gamma, xi)
        # d_i covjac[k, j]; hess is already symmetric in its partials
        dcovjac = (
            hess
            + np.einsum("kjmi,m->kij", dgamma, xi)
            + np.einsum("kjm,mi->kij", gamma, jac)
        )
        return (
            dcovjac
            + np.einsum("kim,mj->kij", gamma, covjac)
            - np.einsum("mij,km->kij", gamma, covjac)
        )

    def half_tensor(self, xi_field: "UnitField", x, X, Y) -> np.ndarray:
        """Components of r(X, Y) xi = nab_X nab_Y xi - nab_{nab_X Y} xi."""
        r = self.half_tensor_components(xi_field, x)
        return np.einsum("kij,i,j->k", r, components(X), components(Y))

    # --- frames -----------------------------------------------------------------

    def orthonormal_completion(self, x, vectors) -> np.ndarray:
        """Gram-Schmidt a list of vectors and complete to a full frame.

        The span prefix is preserved; completion candidates are the
        coordinate directions in index order.  Columns of the result are
        the frame vectors.  Dependent input raises DependentInput.
        """
        x = self.check_point(x)
        g = self.metric_at(x)
        d = self.dim
        frame = []

        def project_out(v):
            for w in frame:
                v = v - (v @ g @ w) * w
            return v

        for raw in vectors:
            v = project_out(components(raw).astype(float))
            nrm = math.sqrt(max(v @ g @ v, 0.0))
            scale = max(self.norm(x, raw), 1.0)
            if nrm <= DEPENDENT_TOL * scale:
                raise DependentInput(
                    f"input vector {components(raw)} dependent on previous ones"
                )
            frame.append(v / nrm)
        for k in range(d):
            if len(frame) == d:
                break
            v = project_out(np.eye(d)[k])
            nrm = math.sqrt(max(v @ g @ v, 0.0))
            if nrm > 1e-8:
                frame.append(v / nrm)
        if len(frame) != d:
            raise DependentInput("could not complete the frame")
        return np.column_stack(frame)


@dataclass(frozen=True)
class JacobiData:
    """Normal Jacobi operator in an orthonormal basis of xi-perp.

    ``matrix`` has entries M[a, b] = <R(E_b, xi) xi, E_a>; ``basis`` holds
    the chart components of E_1..E_{d-1} as columns; ``eigenvalues`` are
    the sectional curvatures K_sigma sorted descending.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis: np.ndarray

    def eigenvectors_chart(self) -> np.ndarray:
        return self.basis @ self.eigenvectors


class UnitField:
    """A unit vector field given by component functions on a chart."""

    def __init__(self, chart: ChartMetric, component_fields):
        self.chart = chart
        if len(component_fields) != chart.dim:
            raise ValueError("need one component per coordinate")
        self.components = list(component_fields)

    @classmethod
    def from_expressions(cls, chart: ChartMetric, exprs):
        return cls(chart, [as_field(e, chart.coords) for e in exprs])

    @classmethod
    def from_callables(cls, chart: ChartMetric, funcs):
        return cls(chart, [as_field(f, chart.coords) for f in funcs])

    def value(self, x) -> np.ndarray:
        x = self.chart.check_point(x)
        return np.array([f.value(x) for f in self.components])

    def jacobian(self, x) -> np.ndarray:
        """jac[k, j] = partial of xi^k along x^j."""
        x = self.chart.check_point(x)
        return np.array([f.grad(x) for f in self.components])

    def second_derivs(self, x) -> np.ndarray:
        """hess[k, i, j] = second partial of xi^k along x^i, x^j."""
        x = self.chart.check_point(x)
        return np.array([f.hess(x) for f in self.components])

    def check_unit(self, x, tol: float = UNIT_TOL) -> np.ndarray:
        xi = self.value(x)
        norm2 = self.chart.inner(x, xi, xi)
        if abs(norm2 - 1.0) > 2.0 * tol:
            raise NotUnit(f"g(xi, xi) = {norm2} at {tuple(np.asarray(x))}")
        return xi

    def covariant_jacobian(self, x) -> np.ndarray:
        """D[k, j]: the k-component of the covariant derivative along e_j."""
        gamma = self.chart.christoffel(x)
        return self.jacobian(x) + np.einsum("kjm,m->kj", gamma, self.value(x))

    def covariant_derivative(self, x, X) -> np.ndarray:
        return self.covariant_jacobian(x) @ components(X)
