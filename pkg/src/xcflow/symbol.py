"""Principal symbol of the linearized flow operator and parabolicity tests.

The linearized right-hand side of the flow dg/dt = -2*eps*h + 2*rho*R*g,
frozen at a point in normal coordinates (g = identity), acts on metric
variations by a second-order operator.  Replacing derivatives with a
covector xi gives a linear map on symmetric 2-tensors; in the component
basis (11, 12, 13, 22, 33, 23) that map is a 6x6 matrix whose spectrum
decides parabolicity.

For the positive-curvature flow the eigenvalues in direction xi (unit
length) are {0, 0, 0, q, q, q - 4*rho} with q = xi^T P xi, where P is the
raised Einstein-type tensor.  Adding the standard gauge-fixing vector
field replaces the three zeros with ones, so the gauged system is
strictly parabolic exactly when q > 0 and q - 4*rho > 0 in every
direction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .curvature import SymTensor3, pack, unpack
from .errors import DomainError

IMAG_RESIDUE_TOL = 1e-10
STRICTNESS_FLOOR = 1e-9
DEFAULT_DIRECTION_SAMPLES = 200


class ComplexEigenvalueWarning(RuntimeWarning):
    """A nominally real spectrum carried imaginary residue above tolerance."""


@dataclass(frozen=True)
class SymbolMatrix:
    """6x6 matrix of a symbol operator on symmetric 2-tensors.

    Rows and columns follow the component order (11, 12, 13, 22, 33, 23).
    `kind` is 'raw' for the ungauged operator, 'deturck' for the
    gauge-fixed one, 'deturck_correction' for the gauge term alone.
    `xi` is the covector as supplied; `normalized` records whether the
    entries were assembled at xi rescaled to unit Euclidean length.
    """

    entries: np.ndarray
    kind: str
    xi: np.ndarray
    rho: float
    normalized: bool = True

    def apply(self, tensor: np.ndarray) -> np.ndarray:
        """Act on a symmetric 3x3 tensor and return the symmetric result."""
        return unpack(self.entries @ pack(tensor))


def _covector(xi) -> np.ndarray:
    v = np.asarray(xi, dtype=float)
    if v.shape != (3,):
        raise DomainError(f"covector must have 3 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0.0:
        raise DomainError("covector must be finite and nonzero")
    return v


_BASIS = [unpack(row) for row in np.eye(6)]


def _matrix_of(op) -> np.ndarray:
    """6x6 matrix of a linear map on symmetric tensors, built column by column."""
    return np.column_stack([pack(op(e)) for e in _BASIS])


def rotation_to_e1(xi_unit: np.ndarray) -> np.ndarray:
    """A rotation Q (det +1) with Q @ xi_unit = e1."""
    u = xi_unit
    # pick the coordinate axis least aligned with u to seed the completion
    seed = np.eye(3)[np.argmin(np.abs(u))]
    v = seed - (seed @ u) * u
    v /= np.linalg.norm(v)
    w = np.cross(u, v)
    return np.vstack([u, v, w])


def induced_tensor_rotation(q: np.ndarray) -> np.ndarray:
    """6x6 action S(Q) with S(Q) @ pack(m) = pack(Q @ m @ Q.T)."""
    return _matrix_of(lambda e: q @ e @ q.T)


def symbol_raw(p: SymTensor3, rho: float, xi, normalize: bool = True) -> SymbolMatrix:
    """Symbol of the ungauged linearized operator at g = identity.

    The action on a variation m is
        (xi^T P xi) m - xi (m P xi)^T - (m P xi) xi^T + tr(P m) xi xi^T
        + 2 rho (xi^T m xi - |xi|^2 tr m) I,
    quadratic in xi.  With normalize=True (default) xi is rescaled to unit
    Euclidean length first, matching the reference normalization.
    """
    xi_v = _covector(xi)
    if p.variance != "upper":
        raise DomainError("symbol assembly expects P with upper indices")
    pm = p.matrix
    v = xi_v / np.linalg.norm(xi_v) if normalize else xi_v
    vv = float(v @ v)

    def op(m: np.ndarray) -> np.ndarray:
        mpv = m @ pm @ v
        return (
            float(v @ pm @ v) * m
            - np.outer(v, mpv)
            - np.outer(mpv, v)
            + float(np.trace(pm @ m)) * np.outer(v, v)
            + 2.0 * rho * (float(v @ m @ v) - vv * np.trace(m)) * np.eye(3)
        )

    return SymbolMatrix(_matrix_of(op), "raw", xi_v, float(rho), normalize)


# Gauge-correction matrix at xi = e1: the action m -> tr(m) E11 - e1 (m e1)^T - (m e1) e1^T.
def _deturck_e1_matrix() -> np.ndarray:
    e1 = np.array([1.0, 0.0, 0.0])

    def op(m: np.ndarray) -> np.ndarray:
        me1 = m @ e1
        return np.trace(m) * np.outer(e1, e1) - np.outer(e1, me1) - np.outer(me1, e1)

    return _matrix_of(op)


_DETURCK_E1 = _deturck_e1_matrix()


def symbol_deturck_correction(xi, normalize: bool = True) -> SymbolMatrix:
    """Symbol of the gauge-fixing term, assembled by rotating xi onto e1.

    The e1-aligned matrix acts by m -> tr(m) E11 - e1 (m e1)^T - (m e1) e1^T;
    a general direction is handled by conjugating with the rotation's
    induced action on symmetric tensors.  Subtracting this matrix from the
    raw symbol replaces the three zero eigenvalues with ones.
    """
    xi_v = _covector(xi)
    norm = np.linalg.norm(xi_v)
    q = rotation_to_e1(xi_v / norm)
    s = induced_tensor_rotation(q)
    s_back = induced_tensor_rotation(q.T)
    entries = s_back @ _DETURCK_E1 @ s
    if not normalize:
        entries = norm**2 * entries
    return SymbolMatrix(entries, "deturck_correction", xi_v, 0.0, normalize)


def symbol_modified(p: SymTensor3, rho: float, xi, case: int = +1) -> SymbolMatrix:
    """Gauge-fixed symbol: raw symbol minus the gauge correction.

    `case` is the sign of the curvature term in the flow: +1 for the
    positive-curvature flow -2h + 2 rho R g, -1 for the negative-curvature
    flow +2h + 2 rho R g.  The sign folds into P, leaving the rho term
    untouched.  At xi = e1 the spectrum is {1, 1, 1, s P11, s P11,
    s P11 - 4 rho} with s = case.
    """
    sign = case_sign(case)
    p_eff = SymTensor3(sign * p.components, "upper")
    raw = symbol_raw(p_eff, rho, xi, normalize=True)
    corr = symbol_deturck_correction(xi, normalize=True)
    return SymbolMatrix(raw.entries - corr.entries, "deturck", raw.xi, float(rho), True)


def case_sign(case) -> int:
    if case in (+1, "positive"):
        return +1
    if case in (-1, "negative"):
        return -1
    raise DomainError(f"case must be +1/-1 or 'positive'/'negative', got {case!r}")


def spectrum(m: SymbolMatrix | np.ndarray) -> np.ndarray:
    """Eigenvalues of a symbol matrix, sorted ascending by real part.

    The matrices arising here have real spectra; imaginary residue above
    1e-10 is surfaced as a ComplexEigenvalueWarning rather than dropped
    silently.
    """
    entries = m.entries if isinstance(m, SymbolMatrix) else np.asarray(m, dtype=float)
    vals = np.linalg.eigvals(entries)
    residue = float(np.abs(vals.imag).max())
    if residue > IMAG_RESIDUE_TOL:
        warnings.warn(
            f"symbol spectrum has imaginary residue {residue:.3e}",
            ComplexEigenvalueWarning,
            stacklevel=2,
        )
    return np.sort(vals.real)


def unit_directions(n: int) -> np.ndarray:
    """n unit covectors from the Fibonacci sphere lattice (deterministic)."""
    if n < 1:
        raise DomainError("need at least one direction")
    i = np.arange(n) + 0.5
    polar = np.arccos(1.0 - 2.0 * i / n)
    azimuth = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.column_stack([
        np.sin(polar) * np.cos(azimuth),
        np.sin(polar) * np.sin(azimuth),
        np.cos(polar),
    ])


def to_orthonormal_frame(p: SymTensor3, g: SymTensor3) -> SymTensor3:
    """Components of an upper-index tensor in a g-orthonormal frame.

    With g = L L^T (Cholesky), the frame components are L^T P L; the
    metric becomes the identity, which is what the symbol assembly
    assumes.  Generalized eigenvalues of P relative to g are preserved.
    """
    if p.variance != "upper":
        raise DomainError("frame transform expects a tensor with upper indices")
    gm = g.matrix
    if not g.is_positive_definite():
        raise DomainError("metric is not positive definite")
    chol = scipy.linalg.cholesky(gm, lower=True)
    return SymTensor3.from_matrix(chol.T @ p.matrix @ chol, "upper")


@dataclass(frozen=True)
class ParabolicityReport:
    """Verdict and threshold bookkeeping for one (P, g, rho, case) query.

    `threshold` is the stated sufficient-condition bound on rho for the
    requested case and mode; `margin` = threshold - rho.  The verdict
    comes from the sampled symbol spectra themselves: strict requires all
    gauge-fixed eigenvalues >= the positivity floor in every sampled
    direction.  `min_modified_eig` / `min_raw_eig` expose the extremes of
    the sweep so threshold and spectrum can be compared directly.
    """

    case: str
    mode: str
    threshold: float
    rho: float
    verdict: str
    margin: float
    min_modified_eig: float
    min_raw_eig: float
    direction_samples: int
    max_imag_residue: float


def parabolicity(
    p: SymTensor3,
    g: SymTensor3,
    rho: float,
    case: int = +1,
    mode: str = "all_directions",
    direction_samples: int = DEFAULT_DIRECTION_SAMPLES,
    floor: float = STRICTNESS_FLOOR,
) -> ParabolicityReport:
    """Classify the flow linearization as strictly/weakly/not parabolic.

    mode='frame' reads the threshold off the literal 11-component of P
    as supplied; mode='all_directions' uses the direction-uniform bound
    from the generalized eigenvalues of P relative to g (minimum / 4 for
    the positive case, -maximum / 2 for the negative case).  The verdict
    itself always comes from eigenvalue sweeps of the assembled symbols
    over a deterministic set of unit directions.
    """
    sign = case_sign(case)
    if mode not in ("frame", "all_directions"):
        raise DomainError(f"mode must be 'frame' or 'all_directions', got {mode!r}")

    p_frame = to_orthonormal_frame(p, g)
    gen_eigs = scipy.linalg.eigvalsh(p_frame.matrix)

    if mode == "frame":
        p11 = float(p.components[0])
        threshold = p11 / 4.0 if sign > 0 else -p11 / 2.0
    else:
        threshold = float(gen_eigs.min()) / 4.0 if sign > 0 else -float(gen_eigs.max()) / 2.0
    margin = threshold - rho

    p_signed = SymTensor3(sign * p_frame.components, "upper")
    min_modified = np.inf
    min_raw = np.inf
    min_abs_raw = np.inf
    imag_residue = 0.0
    raw_scale = 1.0
    for xi in unit_directions(direction_samples):
        raw = symbol_raw(p_signed, rho, xi)
        corr = symbol_deturck_correction(xi)
        raw_eigs = np.linalg.eigvals(raw.entries)
        mod_eigs = np.linalg.eigvals(raw.entries - corr.entries)
        # a multiple eigenvalue of the non-normal raw matrix can split with
        # a small imaginary residue near thresholds; track it instead of
        # warning per direction, the verdict uses real parts
        imag_residue = max(imag_residue,
                           float(np.abs(raw_eigs.imag).max()),
                           float(np.abs(mod_eigs.imag).max()))
        raw_scale = max(raw_scale, float(np.abs(raw.entries).max()))
        min_raw = min(min_raw, float(raw_eigs.real.min()))
        min_abs_raw = min(min_abs_raw, float(np.abs(raw_eigs.real).min()))
        min_modified = min(min_modified, float(mod_eigs.real.min()))

    # right at the weak boundary the structural zero eigenvalue becomes
    # defective and eigensolvers split it by ~sqrt(machine eps), so the
    # weak classification needs a matching tolerance
    weak_floor = max(floor, 1e-7 * raw_scale)
    if min_modified >= floor:
        verdict = "strictly_parabolic_deturck"
    elif min_raw >= -weak_floor and min_abs_raw <= weak_floor:
        verdict = "weakly_parabolic"
    else:
        verdict = "not_parabolic"

    return ParabolicityReport(
        case="positive" if sign > 0 else "negative",
        mode=mode,
        threshold=float(threshold),
        rho=float(rho),
        verdict=verdict,
        margin=float(margin),
        min_modified_eig=float(min_modified),
        min_raw_eig=float(min_raw),
        direction_samples=direction_samples,
        max_imag_residue=float(imag_residue),
    )
