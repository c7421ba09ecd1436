"""Pointwise curvature of 3-metrics and the cross curvature tensor.

Everything here operates on value types at a single point: a symmetric
3x3 metric, its first and second coordinate derivatives (a "jet"), the
fully lowered Riemann tensor, and the symmetric 2-tensors derived from
them.  The cross curvature tensor is computed by three independent
routes (determinant form, contraction form, volume-form contraction)
that cross-check each other; the Einstein tensor with raised indices is
computed by two.

Sign conventions are pinned by the unit round 3-sphere: in an
orthonormal frame R_1212 = +1, the Ricci tensor is 2g, the scalar
curvature is 6, and the raised Einstein-type tensor P has eigenvalues
equal to the sectional curvatures (all +1).  With eigenvalues (a, b, c)
of P, the Ricci eigenvalues are (b+c, a+c, a+b) and the cross curvature
eigenvalues are (bc, ac, ab).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DomainError, InternalConsistencyError

# Canonical ordering of the 6 independent components of a symmetric
# 3x3 tensor.  The 33 component precedes 23 throughout the package.
COMPONENT_ORDER: tuple[tuple[int, int], ...] = (
    (0, 0), (0, 1), (0, 2), (1, 1), (2, 2), (1, 2),
)
COMPONENT_LABELS = ("11", "12", "13", "22", "33", "23")

_EPS3 = np.zeros((3, 3, 3))
_EPS3[0, 1, 2] = _EPS3[1, 2, 0] = _EPS3[2, 0, 1] = 1.0
_EPS3[0, 2, 1] = _EPS3[2, 1, 0] = _EPS3[1, 0, 2] = -1.0

# Relative tolerance for agreement between independent formulas of the
# same tensor; failures indicate inconsistent (riem, g) input.
FORMULA_AGREEMENT_RTOL = 1e-10


def pack(matrix: np.ndarray) -> np.ndarray:
    """Extract the 6 canonical components (11,12,13,22,33,23) of a symmetric matrix."""
    m = np.asarray(matrix, dtype=float)
    return np.array([m[i, j] for i, j in COMPONENT_ORDER])


def unpack(components: np.ndarray) -> np.ndarray:
    """Rebuild the symmetric 3x3 matrix from canonical components."""
    c = np.asarray(components, dtype=float)
    m = np.empty((3, 3))
    for value, (i, j) in zip(c, COMPONENT_ORDER):
        m[i, j] = value
        m[j, i] = value
    return m


@dataclass(frozen=True)
class SymTensor3:
    """A symmetric 3x3 tensor stored as 6 components in canonical order.

    The variance tag distinguishes index placement: 'lower' for (0,2)
    tensors (metrics, Ricci, cross curvature) and 'upper' for (2,0)
    tensors (inverse metrics, the raised Einstein-type tensor).
    Symmetry is structural: only the 6 independent components exist.
    """

    components: np.ndarray
    variance: str = "lower"

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        if comps.shape != (6,):
            raise DomainError(f"expected 6 components, got shape {comps.shape}")
        if self.variance not in ("lower", "upper"):
            raise DomainError(f"variance must be 'lower' or 'upper', got {self.variance!r}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, variance: str = "lower") -> "SymTensor3":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise DomainError(f"expected a 3x3 matrix, got shape {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(m).max())):
            raise DomainError("matrix is not symmetric")
        return cls(pack(0.5 * (m + m.T)), variance)

    @classmethod
    def identity(cls, variance: str = "lower") -> "SymTensor3":
        return cls(np.array([1.0, 0.0, 0.0, 1.0, 1.0, 0.0]), variance)

    @property
    def matrix(self) -> np.ndarray:
        return unpack(self.components)

    def is_positive_definite(self) -> bool:
        """Sylvester criterion: all leading principal minors positive."""
        m = self.matrix
        m1 = m[0, 0]
        m2 = m[0, 0] * m[1, 1] - m[0, 1] ** 2
        m3 = np.linalg.det(m)
        return m1 > 0.0 and m2 > 0.0 and m3 > 0.0


def _require_metric(g: SymTensor3) -> np.ndarray:
    if g.variance != "lower":
        raise DomainError("a metric must carry lower indices")
    if not g.is_positive_definite():
        raise DomainError("metric is not positive definite")
    return g.matrix


def volume_form(g: SymTensor3) -> tuple[np.ndarray, np.ndarray]:
    """Volume form of a metric and its fully raised counterpart.

    Returns (mu_lower, mu_upper) with mu_ijk = sqrt(det g) * eps_ijk and
    mu^ijk = eps_ijk / sqrt(det g), so that raising mu_lower with the
    inverse metric reproduces mu_upper.  In an orthonormal frame both
    normalizations give mu_123 = mu^123 = 1.
    """
    gm = _require_metric(g)
    root_det = np.sqrt(np.linalg.det(gm))
    return root_det * _EPS3, _EPS3 / root_det


@dataclass(frozen=True)
class MetricJet:
    """Metric plus first and second coordinate derivatives at a point.

    dg has shape (3, 6): row k holds the canonical components of
    d_k g_ij.  ddg has shape (6, 6): row p holds the components of
    d_k d_l g_ij for the (k, l) pair in canonical pair order, so the
    symmetry of mixed partials is structural.
    """

    g: SymTensor3
    dg: np.ndarray
    ddg: np.ndarray

    def __post_init__(self):
        _require_metric(self.g)
        dg = np.asarray(self.dg, dtype=float)
        ddg = np.asarray(self.ddg, dtype=float)
        if dg.shape != (3, 6):
            raise DomainError(f"dg must have shape (3, 6), got {dg.shape}")
        if ddg.shape != (6, 6):
            raise DomainError(f"ddg must have shape (6, 6), got {ddg.shape}")
        object.__setattr__(self, "dg", dg)
        object.__setattr__(self, "ddg", ddg)

    @classmethod
    def from_full(cls, g: np.ndarray, dg_full: np.ndarray, ddg_full: np.ndarray) -> "MetricJet":
        """Build from full arrays dg_full[k,i,j] and ddg_full[k,l,i,j]."""
        dg = np.stack([pack(dg_full[k]) for k in range(3)])
        ddg = np.stack([pack(ddg_full[k, l]) for k, l in COMPONENT_ORDER])
        return cls(SymTensor3.from_matrix(g), dg, ddg)

    @property
    def dg_full(self) -> np.ndarray:
        """First derivatives as a (3, 3, 3) array indexed [k, i, j]."""
        return np.stack([unpack(self.dg[k]) for k in range(3)])

    @property
    def ddg_full(self) -> np.ndarray:
        """Second derivatives as a (3, 3, 3, 3) array indexed [k, l, i, j]."""
        full = np.empty((3, 3, 3, 3))
        for row, (k, l) in enumerate(COMPONENT_ORDER):
            m = unpack(self.ddg[row])
            full[k, l] = m
            full[l, k] = m
        return full


def _bracket(dg: np.ndarray) -> np.ndarray:
    """[i, j, l] -> d_i g_jl + d_j g_il - d_l g_ij from dg[k, i, j] = d_k g_ij."""
    return dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)


def christoffel(jet: MetricJet) -> np.ndarray:
    """Levi-Civita connection coefficients, shape (3, 3, 3) indexed [k, i, j].

    Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij), symmetric in (i, j).
    """
    ginv = np.linalg.inv(jet.g.matrix)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, _bracket(jet.dg_full))


def _christoffel_jacobian(jet: MetricJet) -> np.ndarray:
    """Coordinate derivatives of the connection, shape (3, 3, 3, 3) indexed [m, k, i, j]."""
    ginv = np.linalg.inv(jet.g.matrix)
    dg = jet.dg_full
    ddg = jet.ddg_full
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    # [m, i, j, l] = d_m (d_i g_jl + d_j g_il - d_l g_ij)
    dbracket = ddg + ddg.transpose(0, 2, 1, 3) - ddg.transpose(0, 2, 3, 1)
    return 0.5 * (
        np.einsum("mkl,ijl->mkij", dginv, _bracket(dg))
        + np.einsum("kl,mijl->mkij", ginv, dbracket)
    )


@dataclass(frozen=True)
class Riemann3:
    """Fully lowered Riemann tensor of a 3-metric.

    `lowered` is R_ijkl with the algebraic symmetries (antisymmetry in
    (i,j) and (k,l), pair symmetry, first Bianchi identity).
    `bivector_form` is the symmetric (2,0) tensor
    1/4 mu^irs mu^jkl R_rskl, the curvature viewed as a bilinear form on
    the mu-identified bivector space.
    """

    lowered: np.ndarray
    bivector_form: SymTensor3

    @classmethod
    def from_lowered(cls, lowered: np.ndarray, g: SymTensor3) -> "Riemann3":
        r = np.asarray(lowered, dtype=float)
        if r.shape != (3, 3, 3, 3):
            raise DomainError(f"lowered Riemann must have shape (3,3,3,3), got {r.shape}")
        scale = max(np.abs(r).max(), 1.0)
        for residual in (
            r + r.transpose(1, 0, 2, 3),
            r + r.transpose(0, 1, 3, 2),
            r - r.transpose(2, 3, 0, 1),
            r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2),
        ):
            if np.abs(residual).max() > 1e-12 * scale:
                raise DomainError("input violates the Riemann algebraic symmetries")
        _, mu_up = volume_form(g)
        biv = 0.25 * np.einsum("irs,jkl,rskl->ij", mu_up, mu_up, r)
        return cls(r, SymTensor3.from_matrix(biv, "upper"))

    @classmethod
    def space_form(cls, kappa: float, g: SymTensor3) -> "Riemann3":
        """Constant-curvature tensor R_ijkl = kappa (g_ik g_jl - g_il g_jk)."""
        gm = _require_metric(g)
        r = kappa * (np.einsum("ik,jl->ijkl", gm, gm) - np.einsum("il,jk->ijkl", gm, gm))
        return cls.from_lowered(r, g)

    @classmethod
    def from_frame(cls, a: float, b: float, c: float,
                   rotation: np.ndarray | None = None) -> "Riemann3":
        """Curvature with sectional values R_2323 = a, R_1313 = b, R_1212 = c
        in the identity metric, optionally pushed forward by a rotation."""
        r = np.zeros((3, 3, 3, 3))
        for (i, j), v in (((1, 2), a), ((0, 2), b), ((0, 1), c)):
            r[i, j, i, j] = r[j, i, j, i] = v
            r[i, j, j, i] = r[j, i, i, j] = -v
        if rotation is not None:
            q = np.asarray(rotation, dtype=float)
            r = np.einsum("ia,jb,kc,ld,abcd->ijkl", q, q, q, q, r)
        return cls.from_lowered(r, SymTensor3.identity())


def riemann(jet: MetricJet) -> Riemann3:
    """Riemann tensor of the jet's metric, symmetrized onto the algebraic
    curvature symmetries to remove rounding residue."""
    gm = jet.g.matrix
    gamma = christoffel(jet)
    dgamma = _christoffel_jacobian(jet)
    # R^m_jkl = d_k Gamma^m_lj - d_l Gamma^m_kj + Gamma^m_kp Gamma^p_lj - Gamma^m_lp Gamma^p_kj
    r_up = (
        np.einsum("kmlj->mjkl", dgamma)
        - np.einsum("lmkj->mjkl", dgamma)
        + np.einsum("mkp,plj->mjkl", gamma, gamma)
        - np.einsum("mlp,pkj->mjkl", gamma, gamma)
    )
    r = np.einsum("im,mjkl->ijkl", gm, r_up)
    r = 0.25 * (r - r.transpose(1, 0, 2, 3) - r.transpose(0, 1, 3, 2) + r.transpose(1, 0, 3, 2))
    r = 0.5 * (r + r.transpose(2, 3, 0, 1))
    return Riemann3.from_lowered(r, jet.g)


def ricci(riem: Riemann3, g: SymTensor3) -> tuple[SymTensor3, float]:
    """Ricci tensor Ric_ij = g^kl R_kilj and scalar curvature R = g^ij Ric_ij."""
    ginv = np.linalg.inv(_require_metric(g))
    ric = np.einsum("kl,kilj->ij", ginv, riem.lowered)
    scalar = float(np.einsum("ij,ij->", ginv, ric))
    return SymTensor3.from_matrix(ric, "lower"), scalar


def _adjugate3(m: np.ndarray) -> np.ndarray:
    """Transposed cofactor matrix of a 3x3 matrix (equals det(m) * inv(m))."""
    a = np.empty((3, 3))
    a[0, 0] = m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    a[1, 0] = -(m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
    a[2, 0] = m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]
    a[0, 1] = -(m[0, 1] * m[2, 2] - m[0, 2] * m[2, 1])
    a[1, 1] = m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
    a[2, 1] = -(m[0, 0] * m[2, 1] - m[0, 1] * m[2, 0])
    a[0, 2] = m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1]
    a[1, 2] = -(m[0, 0] * m[1, 2] - m[0, 2] * m[1, 0])
    a[2, 2] = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return a


def _det3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def _rel_dev(x: np.ndarray, y: np.ndarray) -> float:
    scale = max(np.abs(x).max(), np.abs(y).max(), 1e-300)
    return float(np.abs(x - y).max() / scale)


def einstein_raised(riem: Riemann3, g: SymTensor3) -> SymTensor3:
    """Raised Einstein-type tensor P^ij with sectional-curvature eigenvalues.

    Two independent evaluations: the trace form (R/2) g^ij - Ric^ij and the
    volume-form contraction 1/4 mu^irs mu^jkl R_rskl.  The sign of the trace
    form is fixed so both agree; on the unit sphere P is the identity.
    Disagreement beyond tolerance raises InternalConsistencyError, which
    indicates an inconsistent (riem, g) pair.
    """
    gm = _require_metric(g)
    ginv = np.linalg.inv(gm)
    ric_t, scalar = ricci(riem, g)
    trace_form = 0.5 * scalar * ginv - ginv @ ric_t.matrix @ ginv
    mu_form = riem.bivector_form.matrix
    dev = _rel_dev(trace_form, mu_form)
    if dev > FORMULA_AGREEMENT_RTOL:
        raise InternalConsistencyError(
            f"trace and volume-form evaluations of the raised Einstein tensor "
            f"disagree (relative deviation {dev:.3e}); riem and g are inconsistent"
        )
    return SymTensor3.from_matrix(trace_form, "upper")


@dataclass(frozen=True)
class CrossCurvatureForms:
    """All evaluations of the cross curvature tensor, for cross-checking.

    `determinant_form` is None when P is numerically singular (scale-aware
    cutoff |det P| <= 1e-12 ||P||^3), in which case `determinant_singular`
    is set and only the other two are compared.
    """

    contraction_form: SymTensor3
    mu_form: SymTensor3
    determinant_form: SymTensor3 | None
    determinant_singular: bool
    max_pairwise_dev: float


def cross_curvature_forms(riem: Riemann3, g: SymTensor3) -> CrossCurvatureForms:
    """Evaluate the cross curvature tensor by all three routes.

    contraction: h_ij = 1/2 P^rs R_irjs
    mu form:     h_ij = 1/8 R_ilpq mu^pqk R_kjrs mu^rsl
    determinant: h_ij = (det P^kl / det g^kl) V_ij, V the inverse of P^kl
    """
    gm = _require_metric(g)
    r = riem.lowered
    p = einstein_raised(riem, g).matrix

    h_con = 0.5 * np.einsum("rs,irjs->ij", p, r)

    _, mu_up = volume_form(g)
    h_mu = 0.125 * np.einsum("ilpq,pqk,kjrs,rsl->ij", r, mu_up, r, mu_up)

    det_p = _det3(p)
    p_norm = np.linalg.norm(p)
    singular = abs(det_p) <= 1e-12 * p_norm**3
    h_det = None
    if not singular:
        v = _adjugate3(p) / det_p
        det_ginv = _det3(np.linalg.inv(gm))
        h_det = (det_p / det_ginv) * v

    devs = [_rel_dev(h_con, h_mu)]
    if h_det is not None:
        devs += [_rel_dev(h_con, h_det), _rel_dev(h_mu, h_det)]
    max_dev = max(devs)
    if max_dev > FORMULA_AGREEMENT_RTOL:
        raise InternalConsistencyError(
            f"cross curvature formulas disagree (relative deviation {max_dev:.3e})"
        )

    return CrossCurvatureForms(
        contraction_form=SymTensor3.from_matrix(0.5 * (h_con + h_con.T)),
        mu_form=SymTensor3.from_matrix(0.5 * (h_mu + h_mu.T)),
        determinant_form=None if h_det is None else SymTensor3.from_matrix(0.5 * (h_det + h_det.T)),
        determinant_singular=singular,
        max_pairwise_dev=max_dev,
    )


def cross_curvature(riem: Riemann3, g: SymTensor3) -> SymTensor3:
    """Cross curvature tensor h_ij (the contraction-form value, which is
    defined even when P is singular); all available formulas are
    cross-checked before returning."""
    return cross_curvature_forms(riem, g).contraction_form


@dataclass(frozen=True)
class CurvatureFrame:
    """Sectional curvatures (a, b, c) in an orthonormal frame diagonalizing
    the raised Einstein-type tensor, ordered a <= b <= c."""

    a: float
    b: float
    c: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])


def eigen_frame(p: SymTensor3, g: SymTensor3) -> tuple[CurvatureFrame, np.ndarray]:
    """Diagonalize P relative to g.

    Solves the generalized symmetric eigenproblem for the lowered tensor
    P_ij = g_ik P^kl g_lj against g; returns the eigenvalues as a
    CurvatureFrame (ascending) and the g-orthonormal eigenvectors as the
    columns of a 3x3 matrix.  The reconstruction P^ij = sum_k lam_k
    v_k v_k^T holds.  Degenerate eigenvalues yield an arbitrary
    orthonormal basis of the eigenspace.
    """
    gm = _require_metric(g)
    if p.variance != "upper":
        raise DomainError("eigen_frame expects a tensor with upper indices")
    pm = p.matrix
    p_low = gm @ pm @ gm
    vals, vecs = scipy.linalg.eigh(p_low, gm)
    return CurvatureFrame(*map(float, vals)), vecs


def jet_from_function(
    g_fn: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    step: float = 1e-3,
    richardson: bool = False,
) -> MetricJet:
    """Second-order central-difference jet of a coordinate metric field.

    g_fn maps a point (3-vector) to the 3x3 metric matrix there.  The
    mixed second derivatives use the symmetric 4-point stencil, so ddg is
    symmetric under the derivative-pair swap exactly.  With richardson=True
    the step and half-step estimates are combined to fourth order.
    """
    if step <= 0.0:
        raise DomainError("finite-difference step must be positive")

    def _sample(point: np.ndarray) -> np.ndarray:
        value = np.asarray(g_fn(point), dtype=float)
        if not np.all(np.isfinite(value)):
            raise DomainError("metric callback returned non-finite samples")
        return value

    def _differences(h: float) -> tuple[np.ndarray, np.ndarray]:
        e = np.eye(3)
        g0 = _sample(x)
        dg = np.empty((3, 3, 3))
        ddg = np.empty((3, 3, 3, 3))
        for k in range(3):
            gp = _sample(x + h * e[k])
            gm_ = _sample(x - h * e[k])
            dg[k] = (gp - gm_) / (2.0 * h)
            ddg[k, k] = (gp - 2.0 * g0 + gm_) / h**2
        for k in range(3):
            for l in range(k + 1, 3):
                mixed = (_sample(x + h * e[k] + h * e[l])
                         - _sample(x + h * e[k] - h * e[l])
                         - _sample(x - h * e[k] + h * e[l])
                         + _sample(x - h * e[k] - h * e[l])) / (4.0 * h**2)
                ddg[k, l] = mixed
                ddg[l, k] = mixed
        return dg, ddg

    x = np.asarray(x, dtype=float)
    dg, ddg = _differences(step)
    if richardson:
        dg_half, ddg_half = _differences(step / 2.0)
        dg = (4.0 * dg_half - dg) / 3.0
        ddg = (4.0 * ddg_half - ddg) / 3.0
    return MetricJet.from_full(_sample(x), dg, ddg)


def space_form_chart(kappa: float) -> Callable[[np.ndarray], np.ndarray]:
    """Conformal chart of the curvature-kappa space form:
    g_ij(x) = delta_ij (1 + kappa |x|^2 / 4)^-2."""

    def g_fn(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = 1.0 + kappa * float(x @ x) / 4.0
        if u <= 0.0:
            raise DomainError("point lies outside the chart domain")
        return np.eye(3) / u**2

    return g_fn


def space_form_chart_jet(kappa: float, x: np.ndarray) -> MetricJet:
    """Analytic jet of the conformal space-form chart (no differencing error)."""
    x = np.asarray(x, dtype=float)
    u = 1.0 + kappa * float(x @ x) / 4.0
    if u <= 0.0:
        raise DomainError("point lies outside the chart domain")
    eye = np.eye(3)
    g = eye / u**2
    dg = np.empty((3, 3, 3))
    ddg = np.empty((3, 3, 3, 3))
    for k in range(3):
        dg[k] = -eye * kappa * x[k] / u**3
        for l in range(3):
            delta = 1.0 if k == l else 0.0
            ddg[k, l] = -eye * kappa * (delta / u**3 - 1.5 * kappa * x[k] * x[l] / u**4)
    return MetricJet.from_full(g, dg, ddg)
