"""Molecular orbitals as compressed trains over the plane-wave basis.

Workflow: project every primitive Gaussian onto the grid (one train each),
form their Gram matrix with train inner products, canonically orthogonalize
it (drop eigenvalues below sigma), then assemble each orbital as a weighted
train sum with truncation after every addition.  The squared norm of the
accumulated train, recorded before the final renormalization, drives all
error reporting: truncations only remove weight, so 1 - raw_norm_sq tracks
the discarded probability and sqrt(max(0, 1 - raw_norm_sq)) estimates the
trace distance to the uncompressed state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import gauss_pw, tt_core
from .gauss_pw import PlaneWaveGrid, PrimitiveGaussian
from .tt_core import TensorTrain

__all__ = [
    "DegenerateOrbitalError",
    "EmptyBasisError",
    "MolecularOrbital",
    "OrbitalMPS",
    "OrthoBasis",
    "OverlapMatrix",
    "build_mo_mps",
    "canonical_orthogonalize",
    "infidelity_estimate",
    "mo_bond_bound",
    "mo_cutoff_bound",
    "overlap_matrix",
    "truncate_mo",
]

DEGENERATE_NORM_SQ = 1e-10


class EmptyBasisError(ValueError):
    """Every overlap eigenvalue fell below the orthogonalization cutoff."""


class DegenerateOrbitalError(ValueError):
    """An orbital's coefficients cancelled to (numerically) zero norm."""


@dataclass(frozen=True)
class OverlapMatrix:
    """Hermitian PSD Gram matrix of projected primitives, unit diagonal."""

    S: np.ndarray = field(repr=False)

    def __post_init__(self):
        S = np.asarray(self.S, dtype=complex)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ValueError("S must be square")
        if not np.allclose(S, S.conj().T, atol=1e-10):
            raise ValueError("S must be Hermitian within 1e-10")
        if not np.allclose(np.diag(S).real, 1.0, atol=1e-8):
            raise ValueError("diagonal entries must be 1 within 1e-8")
        object.__setattr__(self, "S", S)

    @property
    def n_basis(self) -> int:
        return self.S.shape[0]


@dataclass(frozen=True)
class OrthoBasis:
    """Columns x_tilde[:, i] = u_i / sqrt(lambda_i) for kept eigenpairs.

    Satisfies x_tilde^dagger S x_tilde = identity; eigenvalues descend.
    """

    x_tilde: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    sigma: float

    @property
    def kept(self) -> int:
        return self.x_tilde.shape[1]


@dataclass(frozen=True)
class MolecularOrbital:
    """Coefficient vector over an explicit primitive list.

    When sigma is given (the orbital came out of a canonical
    orthogonalization with that eigenvalue cutoff) the 2-norm of the
    coefficients is checked against the 1/sigma bound it implies.
    """

    coeffs: np.ndarray = field(repr=False)
    primitives: tuple[PrimitiveGaussian, ...]
    sigma: float | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        prims = tuple(self.primitives)
        if c.ndim != 1 or c.size != len(prims):
            raise ValueError(
                f"{c.size} coefficients for {len(prims)} primitives")
        if c.size == 0:
            raise ValueError("orbital needs at least one primitive")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "primitives", prims)
        if self.sigma is not None:
            if self.sigma <= 0:
                raise ValueError("sigma must be positive")
            bound = 1.0 / self.sigma
            nrm = float(np.linalg.norm(c))
            if nrm > bound * (1.0 + 1e-9):
                raise ValueError(
                    f"coefficient norm {nrm:.6g} exceeds 1/sigma = {bound:.6g}")


@dataclass(frozen=True)
class OrbitalMPS:
    """A unit-norm orbital train plus its compression bookkeeping.

    raw_norm_sq is the squared norm of the accumulated train immediately
    before renormalization; every later truncation multiplies it by the
    squared norm the truncation retained.
    """

    tt: TensorTrain
    raw_norm_sq: float
    eps_sum_used: float
    svd_cutoff_used: float

    @property
    def infidelity(self) -> float:
        return abs(1.0 - self.raw_norm_sq)

    @property
    def n_sites(self) -> int:
        return len(self.tt.cores)


def overlap_matrix(primitives, grid: PlaneWaveGrid, eps: float = 1e-6,
                   tts=None) -> OverlapMatrix:
    """Gram matrix of the projected primitives, entries from TT overlaps.

    Each primitive is projected at accuracy eps; the result is Hermitized
    (the computed upper triangle is mirrored conjugately).  Already
    projected trains can be passed through tts to skip the projections.
    """
    prims = list(primitives)
    if not prims:
        raise ValueError("need at least one primitive")
    if tts is None:
        tts = [gauss_pw.primitive_3d_mps(g, grid, eps) for g in prims]
    elif len(tts) != len(prims):
        raise ValueError("tts must match primitives one to one")
    n = len(tts)
    S = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            S[i, j] = tt_core.inner_product(tts[i], tts[j])
            S[j, i] = np.conj(S[i, j])
    return OverlapMatrix(S=S)


def canonical_orthogonalize(S, sigma: float) -> OrthoBasis:
    """Eigenbasis columns scaled to whiten S, eigenvalues < sigma dropped.

    Accepts an OverlapMatrix or any Hermitian matrix.  Kept columns are
    ordered by descending eigenvalue; raises EmptyBasisError when nothing
    survives the cutoff.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    A = S.S if isinstance(S, OverlapMatrix) else np.asarray(S, dtype=complex)
    w, U = np.linalg.eigh(A)
    order = np.argsort(w)[::-1]
    w, U = w[order], U[:, order]
    keep = w >= sigma
    if not keep.any():
        raise EmptyBasisError(
            f"all {w.size} eigenvalues fall below sigma = {sigma}")
    wk = w[keep]
    X = U[:, keep] / np.sqrt(wk)[None, :]
    return OrthoBasis(x_tilde=X, eigenvalues=wk, sigma=float(sigma))


def build_mo_mps(mo: MolecularOrbital, grid: PlaneWaveGrid,
                 eps_primitive: float, eps_sum: float = 1e-9,
                 primitive_tts=None) -> OrbitalMPS:
    """Weighted train sum over the orbital's primitives, truncating as it goes.

    Accumulates c_g * primitive train in coefficient order, rounding at
    eps_sum after every addition, then renormalizes.  The pre-normalization
    squared norm is kept on the result; a (numerically) vanishing norm is an
    error rather than a silent zero state.  primitive_tts, when given, must
    hold the already projected train for each primitive in order.
    """
    if eps_sum < 0:
        raise ValueError("eps_sum must be nonnegative")
    if primitive_tts is None:
        parts = [gauss_pw.primitive_3d_mps(g, grid, eps_primitive)
                 for g in mo.primitives]
    else:
        parts = list(primitive_tts)
        if len(parts) != len(mo.primitives):
            raise ValueError("primitive_tts must match primitives one to one")
    acc = tt_core.scale(parts[0], complex(mo.coeffs[0]))
    for c, tt in zip(mo.coeffs[1:], parts[1:]):
        acc = tt_core.round(tt_core.add(acc, tt_core.scale(tt, complex(c))),
                            eps_sum)
    raw = float(tt_core.norm(acc)) ** 2
    if raw < DEGENERATE_NORM_SQ:
        raise DegenerateOrbitalError(
            f"orbital norm^2 = {raw:.3e} after summation; coefficients cancel")
    unit = tt_core.scale(acc, 1.0 / math.sqrt(raw))
    return OrbitalMPS(tt=unit, raw_norm_sq=raw, eps_sum_used=float(eps_sum),
                      svd_cutoff_used=0.0)


def truncate_mo(o: OrbitalMPS, eps: float) -> OrbitalMPS:
    """Round an orbital train at a larger cutoff, scaling its norm record.

    The retained squared norm multiplies raw_norm_sq, so infidelity grows
    monotonically with eps; eps = 0 returns the input unchanged.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0.0:
        return replace(o)
    rounded = tt_core.round(o.tt, eps)
    rho = float(tt_core.norm(rounded))
    if rho ** 2 < DEGENERATE_NORM_SQ:
        raise DegenerateOrbitalError(
            f"truncation at eps = {eps} removed the whole state")
    unit = tt_core.scale(rounded, 1.0 / rho)
    return OrbitalMPS(tt=unit, raw_norm_sq=o.raw_norm_sq * rho ** 2,
                      eps_sum_used=o.eps_sum_used, svd_cutoff_used=float(eps))


def infidelity_estimate(o: OrbitalMPS) -> float:
    """Trace-distance estimate sqrt(max(0, 1 - raw_norm_sq)).

    Truncations only remove weight, so 1 - raw_norm_sq is the removed
    probability; non-orthogonal primitives can push the raw norm slightly
    above one, in which case the estimate clamps to zero (the raw value
    stays available on the orbital).
    """
    return math.sqrt(max(0.0, 1.0 - o.raw_norm_sq))


def _mo_bracket(n_g: int, eps: float, sigma: float, ell: int) -> float:
    if n_g < 1:
        raise ValueError("n_g must be at least 1")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    ll = ell * math.log(4.0 * ell) if ell > 0 else 0.0
    return 2.0 * math.log(288.0 * math.sqrt(3.0) * n_g
                          / (eps ** 4 * sigma ** 2)) + ll


def mo_bond_bound(n_g: int, eps: float, sigma: float, ell: int) -> int:
    """Certified bond-dimension bound for an orbital over n_g primitives.

    ceil of 8 e^2 n_g (2 log(288 sqrt(3) n_g / (eps^4 sigma^2))
    + ell log(4 ell) + 4), natural logs; a deliberately loose guarantee
    that measured compressed bonds must stay under.
    """
    return math.ceil(8.0 * math.e ** 2 * n_g * (_mo_bracket(n_g, eps, sigma, ell) + 4.0))


def mo_cutoff_bound(gamma_max: float, n_g: int, eps: float, sigma: float,
                    ell: int) -> float:
    """Certified momentum cutoff for a whole orbital.

    2 sqrt(2 Gamma) sqrt(2 log(288 sqrt(3) n_g / (eps^4 sigma^2))
    + ell log(4 ell) + log 45) with Gamma the largest exponent among the
    orbital's primitives.
    """
    if gamma_max <= 0:
        raise ValueError("gamma_max must be positive")
    return 2.0 * math.sqrt(2.0 * gamma_max) * math.sqrt(
        _mo_bracket(n_g, eps, sigma, ell) + math.log(45.0))
