"""Scalar fields on a chart: symbolic-expression backed or plain callables.

Both flavors expose the same interface (value / grad / hess), so the
geometry code never needs to know whether derivatives are exact or finite
differences.
"""

from __future__ import annotations

import numpy as np

from . import dsl

_EPS = np.finfo(float).eps
_H_GRAD = _EPS ** (1.0 / 3.0)
_H_HESS = _EPS ** 0.25


class ScalarField:
    """Interface: value(x) -> float, grad(x) -> (n,), hess(x) -> (n, n)."""

    coords: tuple

    def value(self, x) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def hess(self, x) -> np.ndarray:
        raise NotImplementedError


class ExprField(ScalarField):
    """Field defined by a DSL expression; derivatives are exact ASTs.

    First and second derivative expressions are built once and cached, so
    repeated evaluation costs one tree walk each.
    """

    def __init__(self, expr, coords):
        if isinstance(expr, str):
            expr = dsl.parse(expr, coords)
        self.coords = tuple(coords)
        self.expr = expr
        self._d1 = [dsl.differentiate(expr, c) for c in self.coords]
        self._d2 = [
            [dsl.differentiate(di, c) for c in self.coords] for di in self._d1
        ]

    def _env(self, x) -> dict:
        return dict(zip(self.coords, np.asarray(x, dtype=float)))

    def value(self, x) -> float:
        return dsl.evaluate(self.expr, self._env(x))

    def grad(self, x) -> np.ndarray:
        env = self._env(x)
        return np.array([dsl.evaluate(d, env) for d in self._d1])

    def hess(self, x) -> np.ndarray:
        env = self._env(x)
        n = len(self.coords)
        h = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                h[i, j] = dsl.evaluate(self._d2[i][j], env)
        # symmetrize: mixed partials commute for smooth expressions
        return 0.5 * (h + h.T)

    def __str__(self):
        return dsl.to_string(self.expr)


class NumericField(ScalarField):
    """Field defined by a callable f(x); derivatives by central differences.

    Step sizes scale with eps^(1/3) for the gradient and eps^(1/4) for the
    Hessian, relative to max(1, |x_k|) per axis.
    """

    def __init__(self, func, coords):
        self.func = func
        self.coords = tuple(coords)

    def value(self, x) -> float:
        return float(self.func(np.asarray(x, dtype=float)))

    def grad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n = x.size
        out = np.empty(n)
        for k in range(n):
            h = _H_GRAD * max(1.0, abs(x[k]))
            xp = x.copy(); xp[k] += h
            xm = x.copy(); xm[k] -= h
            out[k] = (self.func(xp) - self.func(xm)) / (2.0 * h)
        return out

    def hess(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n = x.size
        out = np.empty((n, n))
        f0 = self.func(x)
        steps = [_H_HESS * max(1.0, abs(x[k])) for k in range(n)]
        for i in range(n):
            hi = steps[i]
            xp = x.copy(); xp[i] += hi
            xm = x.copy(); xm[i] -= hi
            out[i, i] = (self.func(xp) - 2.0 * f0 + self.func(xm)) / (hi * hi)
            for j in range(i + 1, n):
                hj = steps[j]
                xpp = x.copy(); xpp[i] += hi; xpp[j] += hj
                xpm = x.copy(); xpm[i] += hi; xpm[j] -= hj
                xmp = x.copy(); xmp[i] -= hi; xmp[j] += hj
                xmm = x.copy(); xmm[i] -= hi; xmm[j] -= hj
                val = (
                    self.func(xpp) - self.func(xpm) - self.func(xmp) + self.func(xmm)
                ) / (4.0 * hi * hj)
                out[i, j] = val
                out[j, i] = val
        return out


def as_field(spec, coords) -> ScalarField:
    """Coerce a string, Expr, number, ScalarField, or callable to a field."""
    if isinstance(spec, ScalarField):
        return spec
    if isinstance(spec, (str, dsl.Expr)):
        return ExprField(spec, coords)
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return ExprField(dsl.Constant(float(spec)), coords)
    if callable(spec):
        return NumericField(spec, coords)
    raise TypeError(f"cannot interpret {spec!r} as a scalar field")
