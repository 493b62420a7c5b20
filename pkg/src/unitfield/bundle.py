"""Tangent bundle in induced coordinates and the Sasaki metric machinery.

A point of TM is a pair (x, u); a tangent vector of TTM is a pair
(dx, du) attached to such a point.  Everything the submanifold geometry
needs is expressed through the projection pushforward, the connection
map, and the two lifts; no chart is ever put on the unit sphere fibers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BaseMismatch, NotUnit
from .manifold import ChartMetric, TangentVector, UnitField, components


@dataclass(frozen=True)
class BundlePoint:
    """(x, u): chart point plus fiber coordinates of a tangent vector."""

    x: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))


@dataclass(frozen=True)
class BundleTangent:
    """A TTM vector (dx, du) in the induced coordinates at ``base``."""

    base: BundlePoint
    dx: np.ndarray
    du: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dx", np.asarray(self.dx, dtype=float))
        object.__setattr__(self, "du", np.asarray(self.du, dtype=float))

    def __add__(self, other: "BundleTangent") -> "BundleTangent":
        _require_same_base(self, other)
        return BundleTangent(self.base, self.dx + other.dx, self.du + other.du)

    def __mul__(self, scalar: float) -> "BundleTangent":
        return BundleTangent(self.base, scalar * self.dx, scalar * self.du)

    __rmul__ = __mul__


def _require_same_base(t1: BundleTangent, t2: BundleTangent):
    # exact equality by design: silent interpolation between nearby base
    # points would mask bugs
    if not (
        np.array_equal(t1.base.x, t2.base.x) and np.array_equal(t1.base.u, t2.base.u)
    ):
        raise BaseMismatch(
            f"tangents based at (x={tuple(t1.base.x)}, u={tuple(t1.base.u)}) "
            f"vs (x={tuple(t2.base.x)}, u={tuple(t2.base.u)})"
        )


def check_unit_point(m: ChartMetric, p: BundlePoint, tol: float = 1e-10) -> BundlePoint:
    """Assert that p lies on the unit tangent bundle."""
    norm2 = m.inner(p.x, p.u, p.u)
    if abs(norm2 - 1.0) > 2.0 * tol:
        raise NotUnit(f"g(u, u) = {norm2} at x = {tuple(p.x)}")
    return p


def project_pushforward(t: BundleTangent) -> TangentVector:
    """Pushforward of the bundle projection: (dx, du) -> dx."""
    return TangentVector(t.base.x, t.dx)


def connection_map(m: ChartMetric, t: BundleTangent) -> TangentVector:
    """K(t)^k = du^k + Gamma^k_ij dx^i u^j at the base point."""
    gamma = m.christoffel(t.base.x)
    return TangentVector(
        t.base.x, t.du + np.einsum("kij,i,j->k", gamma, t.dx, t.base.u)
    )


def horizontal_lift(m: ChartMetric, p: BundlePoint, X) -> BundleTangent:
    """Lift with zero connection-map part: (X, -Gamma(X, u))."""
    gamma = m.christoffel(p.x)
    X = components(X)
    return BundleTangent(p, X, -np.einsum("kij,i,j->k", gamma, X, p.u))


def vertical_lift(m: ChartMetric, p: BundlePoint, X) -> BundleTangent:
    """Lift with zero pushforward part: (0, X)."""
    X = components(X)
    return BundleTangent(p, np.zeros_like(X), X)


def sasaki_inner(m: ChartMetric, t1: BundleTangent, t2: BundleTangent) -> float:
    """<pi_* t1, pi_* t2> + <K t1, K t2>, both with g at the base point."""
    _require_same_base(t1, t2)
    g = m.metric_at(t1.base.x)
    k1 = connection_map(m, t1).comp
    k2 = connection_map(m, t2).comp
    return float(t1.dx @ g @ t2.dx + k1 @ g @ k2)


def field_tangent_map(m: ChartMetric, xi: UnitField, x, X) -> BundleTangent:
    """dxi(X) at (x, xi(x)): horizontal lift of X plus vertical lift of
    the covariant derivative of xi along X."""
    xi.check_unit(x)
    p = BundlePoint(np.asarray(x, dtype=float), xi.value(x))
    h = horizontal_lift(m, p, X)
    v = vertical_lift(m, p, xi.covariant_derivative(x, X))
    return h + v
