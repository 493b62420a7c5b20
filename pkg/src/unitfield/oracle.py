"""Brute-force second fundamental form of xi(M), the ground truth.

The bundle TM is treated as a plain 2d-dimensional chart with the block
metric G built from g and its Christoffel symbols.  The Christoffels of
G itself are obtained by central finite differences (never reusing the
closed-form machinery under test), the immersion x -> (x, xi(x)) is
differentiated directly, and its second derivatives are projected onto
the normal frame.  Agreement with the singular-frame formulas is the
main correctness check of the package.
"""

from __future__ import annotations

import numpy as np

from .bundle import BundlePoint
from .fieldgeo import OmegaTensor, field_singular_frames, submanifold_frames
from .manifold import ChartMetric, UnitField

FD_STEP = 1e-5


def sasaki_metric_matrix(m: ChartMetric, x, u) -> np.ndarray:
    """The 2d x 2d Sasaki metric in induced coordinates (x, u).

    With C[k, i] = Gamma^k_ij u^j the blocks are
    [[g + C^T g C, C^T g], [g C, g]].
    """
    g = m.metric_at(x)
    gamma = m.christoffel(x)
    C = np.einsum("kij,j->ki", gamma, np.asarray(u, dtype=float))
    return np.block([[g + C.T @ g @ C, C.T @ g], [g @ C, g]])


class SasakiChart:
    """TM as a 2d-dimensional chart carrying the Sasaki metric."""

    def __init__(self, base: ChartMetric, fd_step: float = FD_STEP):
        self.base = base
        self.fd_step = fd_step

    def metric_at(self, p: BundlePoint) -> np.ndarray:
        return sasaki_metric_matrix(self.base, p.x, p.u)

    def christoffel(self, p: BundlePoint) -> np.ndarray:
        """Central-difference Christoffels of G, symmetrized in the
        lower indices by construction."""
        d = self.base.dim
        w0 = np.concatenate([np.asarray(p.x, dtype=float), np.asarray(p.u, dtype=float)])
        D = 2 * d

        def G_of(w):
            return sasaki_metric_matrix(self.base, w[:d], w[d:])

        dG = np.empty((D, D, D))
        for K in range(D):
            h = self.fd_step * max(1.0, abs(w0[K]))
            wp = w0.copy()
            wp[K] += h
            wm = w0.copy()
            wm[K] -= h
            dG[K] = (G_of(wp) - G_of(wm)) / (2.0 * h)
        G_inv = np.linalg.inv(G_of(w0))
        bracket = (
            np.einsum("imj->mij", dG) + np.einsum("jmi->mij", dG) - dG
        )
        return 0.5 * np.einsum("km,mij->kij", G_inv, bracket)


def brute_second_fundamental_form(
    xi: UnitField, x, mode: str = "auto"
) -> OmegaTensor:
    """Second fundamental form of the immersion x -> (x, xi(x)), computed
    from raw second derivatives and FD Christoffels of the Sasaki metric.

    The result uses the same singular frames as omega_general (same
    ``mode`` selection), so components are comparable index by index.
    """
    chart = xi.chart
    x = chart.check_point(np.asarray(x, dtype=float))
    d = chart.dim
    fr = field_singular_frames(xi, x, mode)
    _, normals = submanifold_frames(chart, fr)

    sc = SasakiChart(chart)
    p = BundlePoint(x, xi.value(x))
    G = sc.metric_at(p)
    Gam = sc.christoffel(p)

    jac = xi.jacobian(x)
    hess = xi.second_derivs(x)
    # immersion tangents: column i = (e_i, d_i xi)
    T = np.vstack([np.eye(d), jac])
    # ambient covariant second derivative of the immersion
    second = np.concatenate([np.zeros((d, d, d)), hess], axis=0)
    D = second + np.einsum("KIJ,Ii,Jj->Kij", Gam, T, T)

    W = np.column_stack([np.concatenate([nrm.dx, nrm.du]) for nrm in normals])
    II = np.einsum("Kij,KM,Ms->sij", D, G, W)

    scale = 1.0 / np.sqrt(1.0 + fr.lam * fr.lam)
    values = (
        np.einsum("sab,ai,bj->sij", II, fr.e, fr.e)
        * scale[None, :, None]
        * scale[None, None, :]
    )
    return OmegaTensor(values, fr, fr.lam.copy())
