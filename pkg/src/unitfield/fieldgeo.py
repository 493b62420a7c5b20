"""Geometry of a unit field as a submanifold of the unit tangent bundle.

Pipeline: the shape operator A(X) = -nab_X xi is diagonalized by singular
frames (SVD in general, eigenframes when A is self-adjoint on the
orthogonal complement); lifted frames span the tangent and normal spaces
of xi(M); the second fundamental form is evaluated three ways:

  * omega_general   - the closed form in singular frames, valid for any
                      unit field (uses the half tensor r(X, Y) xi),
  * omega_foliation - the hyperfoliation form for geodesic fields with
                      integrable orthogonal complement (leaf quantities
                      B, nab^F B, curvature terms),
  * omega_umbilic   - the scalar specialization for totally umbilic
                      leaves.

All three must agree where their hypotheses overlap; an independent
finite-difference oracle (see the oracle module) arbitrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bundle import BundlePoint, horizontal_lift, vertical_lift
from .errors import (
    AmbiguousKernel,
    NotGeodesic,
    NotIntegrable,
    NotSelfAdjoint,
    NotUmbilic,
    UmbilicityPole,
)
from .manifold import ChartMetric, UnitField, components, fix_signs

GEODESIC_TOL = 1e-8
INTEGRABILITY_TOL = 1e-6
SELF_ADJOINT_TOL = 1e-8
UMBILIC_TOL = 1e-8
RANK_TOL = 1e-10

_H_DIR = float(np.finfo(float).eps ** (1.0 / 3.0))


# --- shape operator -----------------------------------------------------------


@dataclass(frozen=True)
class ShapeData:
    """A(X) = -nab_X xi at a point, in two representations.

    ``matrix`` is A in the orthonormal frame whose first vector is xi
    (so its first row vanishes); ``frame`` holds that frame's chart
    components as columns; ``chart_matrix`` is A in the coordinate basis.
    """

    matrix: np.ndarray
    frame: np.ndarray
    chart_matrix: np.ndarray
    x: np.ndarray


def shape_operator(xi: UnitField, x) -> ShapeData:
    chart = xi.chart
    x = chart.check_point(np.asarray(x, dtype=float))
    xi.check_unit(x)
    chart_matrix = -xi.covariant_jacobian(x)
    frame = chart.orthonormal_completion(x, [xi.value(x)])
    g = chart.metric_at(x)
    matrix = frame.T @ g @ chart_matrix @ frame
    return ShapeData(matrix, frame, chart_matrix, x)


def conjugate_shape_operator(A, g=None) -> np.ndarray:
    """Adjoint of A: the transpose in an orthonormal frame, or g^-1 A^T g
    when A is given in a coordinate basis with metric g."""
    A = np.asarray(A, dtype=float)
    if g is None:
        return A.T.copy()
    g = np.asarray(g, dtype=float)
    return np.linalg.solve(g, A.T @ g)


# --- singular frames ----------------------------------------------------------


@dataclass(frozen=True)
class SingularFrameSet:
    """Frames e_i, f_i and values lam_i with A e_i = lam_i f_i.

    Columns of ``e`` and ``f`` are the frame vectors; index 0 carries
    lam_0 = 0 with f_0 the unit-field direction when one is known.  In
    signed mode f = e and lam are the real eigenvalues; in unsigned mode
    lam_1 >= ... >= lam_n >= 0 are singular values.  Field-level frames
    (``x`` set) store chart components; matrix-level frames live in the
    orthonormal frame the matrix was expressed in.
    """

    e: np.ndarray
    f: np.ndarray
    lam: np.ndarray
    signed: bool
    x: np.ndarray | None = None


def _euclidean_completion(vectors, d) -> np.ndarray:
    frame = []

    def project(v):
        for w in frame:
            v = v - (v @ w) * w
        return v

    for raw in vectors:
        v = project(np.asarray(raw, dtype=float).copy())
        nrm = np.linalg.norm(v)
        if nrm <= RANK_TOL:
            raise AmbiguousKernel("dependent vectors in frame completion")
        frame.append(v / nrm)
    for k in range(d):
        if len(frame) == d:
            break
        v = project(np.eye(d)[k])
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            frame.append(v / nrm)
    return np.column_stack(frame)


def _basis_of_complement(cols: np.ndarray, drop: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(cols) with the ``drop`` direction removed."""
    out = []
    for j in range(cols.shape[1]):
        v = cols[:, j] - (cols[:, j] @ drop) * drop
        for w in out:
            v = v - (v @ w) * w
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            out.append(v / nrm)
    if not out:
        return np.zeros((cols.shape[0], 0))
    return fix_signs(np.column_stack(out))


def _signed_admissible(A: np.ndarray, xi: np.ndarray) -> bool:
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.linalg.norm(A @ xi) > SELF_ADJOINT_TOL * scale:
        return False
    basis = _euclidean_completion([xi], A.shape[0])[:, 1:]
    M = basis.T @ A @ basis
    return float(np.max(np.abs(M - M.T))) <= SELF_ADJOINT_TOL * scale


def _signed_frames(A: np.ndarray, xi: np.ndarray) -> SingularFrameSet:
    d = A.shape[0]
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.linalg.norm(A @ xi) > SELF_ADJOINT_TOL * scale:
        raise NotSelfAdjoint(
            "signed frames require A xi = 0 (geodesic field); "
            f"|A xi| = {np.linalg.norm(A @ xi):.3e}"
        )
    basis = _euclidean_completion([xi], d)[:, 1:]
    M = basis.T @ A @ basis
    asym = float(np.max(np.abs(M - M.T)))
    if asym > SELF_ADJOINT_TOL * scale:
        raise NotSelfAdjoint(
            f"A is not self-adjoint on the complement: asymmetry {asym:.3e}"
        )
    eigvals, eigvecs = np.linalg.eigh(0.5 * (M + M.T))
    order = np.argsort(eigvals)[::-1]
    eigvecs = fix_signs(eigvecs[:, order])
    e = np.column_stack([xi, basis @ eigvecs])
    lam = np.concatenate([[0.0], eigvals[order]])
    return SingularFrameSet(e, e.copy(), lam, True)


def _unsigned_frames(A: np.ndarray, xi) -> SingularFrameSet:
    d = A.shape[0]
    U, s, Vt = np.linalg.svd(A)
    scale = max(1.0, float(s[0]))
    rank = int(np.sum(s > RANK_TOL * scale))
    if rank == d:
        raise AmbiguousKernel("A is nonsingular: no zero singular pair for index 0")
    e_pos = Vt[:rank].T.copy()
    f_pos = U[:, :rank].copy()
    for i in range(rank):
        col = e_pos[:, i]
        idx = int(np.argmax(np.abs(col) >= np.max(np.abs(col)) - 1e-14))
        if col[idx] < 0:
            e_pos[:, i] *= -1.0
            f_pos[:, i] *= -1.0
    ker = Vt[rank:].T
    ker_conj = U[:, rank:]
    dim_ker = d - rank

    if xi is not None and np.linalg.norm(A @ xi) <= 1e-8 * scale:
        e0 = xi
    elif dim_ker == 1:
        e0 = fix_signs(ker)[:, 0]
    else:
        raise AmbiguousKernel(
            f"ker A is {dim_ker}-dimensional and the field direction is "
            "not in it; cannot pick e_0 deterministically"
        )
    e_rest = _basis_of_complement(ker, e0)

    if xi is not None:
        if np.linalg.norm(A.T @ xi) > 1e-6 * scale:
            raise AmbiguousKernel(
                "field direction is not in ker A*; not a shape-operator matrix"
            )
        f0 = xi
    elif dim_ker == 1:
        f0 = fix_signs(ker_conj)[:, 0]
    else:
        raise AmbiguousKernel("ker A* ambiguous without a field direction")
    f_rest = _basis_of_complement(ker_conj, f0)

    if e_rest.shape[1] != dim_ker - 1 or f_rest.shape[1] != dim_ker - 1:
        raise AmbiguousKernel("kernel basis extraction lost rank")

    e = np.column_stack([e0[:, None], e_pos, e_rest])
    f = np.column_stack([f0[:, None], f_pos, f_rest])
    lam = np.concatenate([[0.0], s[:rank], np.zeros(dim_ker - 1)])
    return SingularFrameSet(e, f, lam, False)


def singular_frames(A, xi_dir=None, mode: str = "unsigned") -> SingularFrameSet:
    """Diagonalize A by frames with A e_i = lam_i f_i, A* f_i = lam_i e_i.

    ``A`` and ``xi_dir`` are expressed in one orthonormal frame (for
    shape_operator output, xi_dir defaults to the first axis).  Modes:
    ``unsigned`` (SVD, lam >= 0), ``signed`` (eigen-decomposition, needs
    A self-adjoint on the complement of xi and A xi = 0), ``auto``
    (signed when admissible).
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    xi = None
    if xi_dir is not None:
        xi = components(xi_dir).astype(float)
        xi = xi / np.linalg.norm(xi)
    if mode == "auto":
        probe = xi if xi is not None else np.eye(A.shape[0])[0]
        mode = "signed" if _signed_admissible(A, probe) else "unsigned"
    if mode == "signed":
        return _signed_frames(A, xi if xi is not None else np.eye(A.shape[0])[0])
    if mode == "unsigned":
        return _unsigned_frames(A, xi)
    raise ValueError(f"unknown mode {mode!r}")


def field_singular_frames(xi: UnitField, x, mode: str = "auto") -> SingularFrameSet:
    """Singular frames of the shape operator, in chart components."""
    sd = shape_operator(xi, x)
    axis0 = np.eye(xi.chart.dim)[0]
    sf = singular_frames(sd.matrix, xi_dir=axis0, mode=mode)
    return SingularFrameSet(
        sd.frame @ sf.e, sd.frame @ sf.f, sf.lam, sf.signed, x=sd.x
    )


def reorder_frames(fr: SingularFrameSet, order) -> SingularFrameSet:
    """Permute the nonzero-index frame vectors (index 0 stays first)."""
    idx = [0] + [int(i) for i in order]
    return SingularFrameSet(
        fr.e[:, idx].copy(), fr.f[:, idx].copy(), fr.lam[idx].copy(), fr.signed, fr.x
    )


# --- lifted frames on the bundle ------------------------------------------------


def submanifold_frames(m: ChartMetric, fr: SingularFrameSet):
    """Orthonormal tangent frame of xi(M) and normal frame within T1M.

    Tangents:  te_i = (e_i^h - lam_i f_i^v) / sqrt(1 + lam_i^2), i = 0..n.
    Normals:   tn_s = (lam_s e_s^h + f_s^v) / sqrt(1 + lam_s^2), s = 1..n.
    """
    if fr.x is None:
        raise ValueError("need field-level frames (chart components with a point)")
    p = BundlePoint(fr.x, fr.f[:, 0])
    tangents, normals = [], []
    for i in range(fr.e.shape[1]):
        lam = fr.lam[i]
        scale = 1.0 / math.sqrt(1.0 + lam * lam)
        h = horizontal_lift(m, p, fr.e[:, i])
        v = vertical_lift(m, p, fr.f[:, i])
        tangents.append(scale * (h + (-lam) * v))
        if i > 0:
            normals.append(scale * (lam * h + v))
    return tangents, normals


# --- second fundamental form: general closed form -------------------------------


@dataclass(frozen=True)
class OmegaTensor:
    """Components Omega_{s|ij} of the second fundamental form of xi(M).

    ``values[s-1, i, j]`` holds the component for normal index s = 1..n
    and tangent indices i, j = 0..n, in the frames recorded in ``frame``.
    """

    values: np.ndarray
    frame: SingularFrameSet
    lambdas: np.ndarray

    def value(self, sigma: int, i: int, j: int) -> float:
        return float(self.values[sigma - 1, i, j])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def traces(self) -> np.ndarray:
        """Trace over the tangent frame, one entry per normal direction."""
        return np.einsum("sii->s", self.values)

    def trace_norm(self) -> float:
        return float(np.max(np.abs(self.traces()))) if self.values.size else 0.0

    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.values - self.values.transpose(0, 2, 1))))


def _lambda_factors(lam: np.ndarray) -> np.ndarray:
    """Lam[s, i, j] = ((1+lam_s^2)(1+lam_i^2)(1+lam_j^2))^(-1/2), s from 1."""
    w = 1.0 / np.sqrt(1.0 + lam * lam)
    return np.einsum("s,i,j->sij", w[1:], w, w)


def omega_general(
    xi: UnitField, x, mode: str = "auto", frames: SingularFrameSet | None = None
) -> OmegaTensor:
    """Second fundamental form from the singular-frame closed form.

    Omega_{s|ij} = 1/2 Lam_{sij} { <r(e_i,e_j)xi + r(e_j,e_i)xi, f_s>
                   + lam_s [ lam_j <R(e_s,e_i)xi, f_j>
                           + lam_i <R(e_s,e_j)xi, f_i> ] }.
    """
    chart = xi.chart
    x = chart.check_point(np.asarray(x, dtype=float))
    fr = frames if frames is not None else field_singular_frames(xi, x, mode)
    g = chart.metric_at(x)
    xival = xi.value(x)
    E, F, lam = fr.e, fr.f, fr.lam
    En, Fn = E[:, 1:], F[:, 1:]

    r = chart.half_tensor_components(xi, x)
    gr = np.einsum("lk,kab->lab", g, r)
    # T[s, i, j] = <r(e_i, e_j)xi, f_s>
    T = np.einsum("lab,ai,bj,ls->sij", gr, E, E, Fn)
    L = chart.lowered_curvature(x)
    # C[s, i, j] = <R(e_s, e_i)xi, f_j>
    C = np.einsum("labc,as,bi,c,lj->sij", L, En, E, xival, F)

    lam_s = lam[1:]
    curv = lam_s[:, None, None] * (
        lam[None, None, :] * C + lam[None, :, None] * C.transpose(0, 2, 1)
    )
    values = 0.5 * _lambda_factors(lam) * (T + T.transpose(0, 2, 1) + curv)
    return OmegaTensor(values, fr, lam.copy())


# --- leaf geometry of the orthogonal hyperfoliation ------------------------------


@dataclass(frozen=True)
class LeafData:
    """Pointwise leaf quantities of the foliation orthogonal to xi.

    ``k`` are the principal curvatures (eigenvalues of A on the leaf,
    descending); ``frame`` holds the chart components of the leaf
    eigenframe as columns; ``B[a, b] = <A e_a, e_b>``;
    ``nabla_B[s, a, b] = (nab^F_{e_s} B)(e_a, e_b)``.
    """

    k: np.ndarray
    frame: np.ndarray
    xi: np.ndarray
    B: np.ndarray
    nabla_B: np.ndarray
    integrability_residual: float
    geodesic_residual: float
    x: np.ndarray


def leaf_data(xi: UnitField, x) -> LeafData:
    chart = xi.chart
    x = chart.check_point(np.asarray(x, dtype=float))
    d = chart.dim
    n = d - 1
    xival = xi.check_unit(x)
    g = chart.metric_at(x)

    accel = xi.covariant_derivative(x, xival)
    geo_res = chart.norm(x, accel)
    if geo_res > GEODESIC_TOL:
        raise NotGeodesic(f"|nab_xi xi| = {geo_res:.3e} exceeds {GEODESIC_TOL}")

    sd = shape_operator(xi, x)
    sf = singular_frames(sd.matrix, xi_dir=np.eye(d)[0], mode="signed")
    k = sf.lam[1:].copy()
    # constant rotation extending the base-point eigenframe smoothly:
    # reuse the completion frame at nearby points and rotate its non-xi
    # columns by the fixed eigenvector matrix
    rot = sf.e[1:, 1:]

    def leaf_frame_at(y):
        comp = chart.orthonormal_completion(y, [xi.value(y)])
        return comp[:, 1:] @ rot

    E = leaf_frame_at(x)
    A_chart = sd.chart_matrix
    B = (g @ A_chart @ E).T @ E  # B[a, b] = <A e_a, e_b>

    h = _H_DIR * max(1.0, float(np.max(np.abs(x))))

    def along(direction, func):
        return (func(x + h * direction) - func(x - h * direction)) / (2.0 * h)

    dE = [along(E[:, a], leaf_frame_at) for a in range(n)]

    integ = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            comm = dE[a][:, b] - dE[b][:, a]
            integ = max(integ, abs(float(comm @ g @ xival)))
    if integ > INTEGRABILITY_TOL:
        raise NotIntegrable(
            f"<[e_a, e_b], xi> = {integ:.3e} exceeds {INTEGRABILITY_TOL}"
        )

    gamma = chart.christoffel(x)
    nablaF = np.empty((n, n, d))
    for s in range(n):
        for a in range(n):
            cov = dE[s][:, a] + np.einsum("kij,i,j->k", gamma, E[:, s], E[:, a])
            nablaF[s, a] = cov - float(cov @ g @ xival) * xival

    def B_field(y):
        Ey = leaf_frame_at(y)
        gy = chart.metric_at(y)
        Ay = -xi.covariant_jacobian(y)
        return (gy @ Ay @ Ey).T @ Ey

    dB = [along(E[:, s], B_field) for s in range(n)]
    gA = g @ A_chart
    nablaB = np.empty((n, n, n))
    for s in range(n):
        for a in range(n):
            for b in range(n):
                nablaB[s, a, b] = (
                    dB[s][a, b]
                    - float(E[:, b] @ gA @ nablaF[s, a])
                    - float(nablaF[s, b] @ gA @ E[:, a])
                )
    return LeafData(k, E, xival, B, nablaB, integ, geo_res, x)


def omega_foliation(xi: UnitField, x) -> OmegaTensor:
    """Second fundamental form via leaf quantities of the hyperfoliation.

    Valid for a geodesic unit field with integrable orthogonal
    complement; expressed in the eigenframe of A on the leaf.
    """
    chart = xi.chart
    ld = leaf_data(xi, x)
    n = chart.dim - 1
    k = ld.k
    E, xival = ld.frame, ld.xi
    L = chart.lowered_curvature(ld.x)

    # Rj[a, s] = <R(e_a, xi) xi, e_s>   (symmetric)
    Rj = np.einsum("lijm,ls,ia,j,m->as", L, E, E, xival, xival)
    # Rt[s, a, b] = <R(xi, e_a) e_b, e_s>
    Rt = np.einsum("lijm,ls,i,ja,mb->sab", L, E, xival, E, E)

    lam = np.concatenate([[0.0], k])
    Lam = _lambda_factors(lam)
    values = np.zeros((n, n + 1, n + 1))
    for s in range(n):
        ks = k[s]
        for a in range(n):
            if a == s:
                val = (ks * ks - 1.0) * Rj[s, s] - 2.0 * ks * ks
            else:
                val = -(1.0 - k[a] * ks) * Rj[a, s]
            w = 0.5 * Lam[s, a + 1, 0] * val
            values[s, a + 1, 0] = w
            values[s, 0, a + 1] = w
        for a in range(n):
            for b in range(n):
                val = (
                    -2.0 * ld.nabla_B[s, a, b]
                    + (1.0 - ks * k[a]) * Rt[s, a, b]
                    + (1.0 - ks * k[b]) * Rt[s, b, a]
                )
                values[s, a + 1, b + 1] = 0.5 * Lam[s, a + 1, b + 1] * val

    frame_cols = np.column_stack([xival, E])
    fr = SingularFrameSet(frame_cols, frame_cols.copy(), lam, True, x=ld.x)
    return OmegaTensor(values, fr, lam.copy())


def omega_umbilic(k, jacobi_eigs) -> np.ndarray:
    """Nonzero components Omega_{s|s0} for a totally umbilic leaf.

    ``k`` may be the scalar value of umbilicity or the list of principal
    curvatures (which must then agree within tolerance).
    """
    karr = np.atleast_1d(np.asarray(k, dtype=float))
    if karr.size > 1 and float(karr.max() - karr.min()) > UMBILIC_TOL:
        raise NotUmbilic(
            f"principal curvatures spread {float(karr.max() - karr.min()):.3e}"
        )
    kk = float(karr.mean())
    Ks = np.asarray(jacobi_eigs, dtype=float)
    return ((kk * kk - 1.0) * Ks - 2.0 * kk * kk) / (2.0 * (1.0 + kk * kk))


def tg_condition_residual(k: float, K_sigma: float) -> float:
    """Residual K_sigma - 2k^2/(k^2 - 1); zero iff the leaf value of
    umbilicity and the radial sectional curvature are compatible with a
    totally geodesic field."""
    k = float(k)
    denom = k * k - 1.0
    if abs(denom) <= 1e-8:
        raise UmbilicityPole(f"condition has a pole at k^2 = 1 (k = {k})")
    return float(K_sigma) - 2.0 * k * k / denom


def curvature_adapted_residual(k_sigma: float, K_sigma: float) -> float:
    """Per-direction residual for curvature-adapted foliations."""
    return tg_condition_residual(k_sigma, K_sigma)


@dataclass(frozen=True)
class Classification:
    totally_geodesic: bool
    minimal: bool
    max_abs: float
    trace_norm: float


def classify(omega: OmegaTensor, tol: float = 1e-6) -> Classification:
    """Totally geodesic iff all components vanish; minimal iff all normal
    traces vanish (within tol)."""
    max_abs = omega.max_abs()
    trace_norm = omega.trace_norm()
    return Classification(max_abs < tol, trace_norm < tol, max_abs, trace_norm)


# --- leaf identity residuals -------------------------------------------------


@dataclass(frozen=True)
class LeafIdentityReport:
    """Max residuals of the three leaf identities for the half tensor.

    tangential: <r(X,Y)xi, Z> + (nab^F_X B)(Y, Z)          (X,Y,Z on leaf)
    mixed:      <r(X,xi)xi, Z> + <A X, A Z>
    reversed:   <r(xi,X)xi, Z> + <A X, A Z> + <R(X,xi)xi, Z>
    """

    tangential: float
    mixed: float
    reversed: float

    def max_residual(self) -> float:
        return max(self.tangential, self.mixed, self.reversed)


def leaf_identity_residuals(xi: UnitField, x) -> LeafIdentityReport:
    chart = xi.chart
    ld = leaf_data(xi, x)
    x = ld.x
    g = chart.metric_at(x)
    E, xival = ld.frame, ld.xi

    r = chart.half_tensor_components(xi, x)
    gr = np.einsum("lk,kab->lab", g, r)
    A_chart = -xi.covariant_jacobian(x)
    AE = A_chart @ E
    AtA = AE.T @ g @ AE  # <A e_a, A e_b>
    L = chart.lowered_curvature(x)
    Rj = np.einsum("lijm,lb,ia,j,m->ab", L, E, E, xival, xival)

    T1 = np.einsum("lab,ai,bj,lc->ijc", gr, E, E, E)
    T2 = np.einsum("lab,ai,b,lj->ij", gr, E, xival, E)
    T3 = np.einsum("lab,a,bi,lj->ij", gr, xival, E, E)

    res1 = float(np.max(np.abs(T1 + ld.nabla_B)))
    res2 = float(np.max(np.abs(T2 + AtA)))
    res3 = float(np.max(np.abs(T3 + AtA + Rj)))
    return LeafIdentityReport(res1, res2, res3)
