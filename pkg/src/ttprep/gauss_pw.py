"""Projection of primitive Cartesian Gaussians onto periodic plane waves.

The plane-wave basis lives on a cubic cell of side L: momenta k = 2*pi*p/L
for signed integers p, truncated at |k| <= K.  A one-dimensional Gaussian
factor x^l exp(-gamma x^2) (normalized over the real line) has an analytic
overlap with each plane wave, expressible through Hermite functions; a
degree m-1 polynomial fitted to that momentum profile turns the coefficient
vector into a low-rank train.

Cutoff and degree selection implement certified formulas: with

    S(eps) = 2 log(2/eps) + log 45 + log(1 + 2 sqrt(pi)/(L sqrt(gamma)))
             + l log(4 l)                       (natural logs, 0 log 0 = 0)

the choices K = 2 sqrt(2 gamma) sqrt(S) and m = ceil(e^2 K^2 / (2 gamma))
guarantee trace distance at most eps between the exactly projected,
renormalized profile and its degree m-1 polynomial truncation, provided the
whole-line normalization factor is at least 2/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tt_core
from .func_encode import Polynomial, SignedGrid1D
from .tt_core import TensorTrain

__all__ = [
    "ChebyshevInterpolant",
    "HermiteExpansion",
    "PlaneWaveGrid",
    "PrimitiveGaussian",
    "Projection1D",
    "ProjectionError",
    "chebyshev_fit",
    "choose_cutoff",
    "choose_degree",
    "h_coeffs",
    "hermite_gaussian",
    "hermite_poly",
    "primitive_1d_mps",
    "primitive_3d_mps",
    "pw_overlap",
]

MAX_HERMITE_ORDER = 40
MAX_ANGULAR_MOMENTUM = 12

# chebyshev_fit: float64 divided differences up to this degree, extended
# precision above, rejection beyond the second bound (monomial coefficients
# of higher degrees are not trustworthy in any precision that evaluates in
# float64 afterwards).
MONOMIAL_FLOAT64_MAX = 30
MONOMIAL_DEGREE_MAX = 60

# primitive_1d_mps builds the coefficient vector densely; this bounds the
# per-axis qubit count so the expansion stays cheap.
DENSE_AXIS_QUBIT_CAP = 12


class ProjectionError(ValueError):
    """A projection precondition failed (cell too small for the Gaussian)."""


@dataclass(frozen=True)
class PrimitiveGaussian:
    """Cartesian primitive x^l y^m z^n exp(-gamma r^2), axis-normalized.

    center is in Bohr, gamma in 1/Bohr^2.  Each axis factor is normalized
    over the real line by c(l, gamma) = 2^l (2 gamma)^(l/2 + 1/4)
    sqrt(l!) / (pi^(1/4) sqrt((2l)!)).
    """

    center: tuple[float, float, float]
    gamma: float
    ang: tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))
        object.__setattr__(self, "ang", tuple(int(a) for a in self.ang))
        if len(self.center) != 3 or len(self.ang) != 3:
            raise ValueError("center and ang must have three components")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        for a in self.ang:
            if a < 0 or a > MAX_ANGULAR_MOMENTUM:
                raise ValueError(
                    f"angular momentum {a} outside [0, {MAX_ANGULAR_MOMENTUM}]")

    def axis_norm_const(self, axis: int) -> float:
        l = self.ang[axis]
        return (2.0 ** l * (2.0 * self.gamma) ** (l / 2 + 0.25)
                * math.sqrt(math.factorial(l))
                / (math.pi ** 0.25 * math.sqrt(math.factorial(2 * l))))


@dataclass(frozen=True)
class PlaneWaveGrid:
    """Cubic-cell plane-wave basis: side L, momentum cutoff K (both > 0).

    Per axis there are 2*floor(K L / 2 pi) + 1 momenta (always odd), and
    the total basis size is their cube.
    """

    L: float
    K: float

    def __post_init__(self):
        if self.L <= 0 or self.K <= 0:
            raise ValueError("L and K must be positive")
        if self.half_points < 1:
            raise ValueError(
                f"K={self.K} resolves no nonzero momentum on L={self.L}")

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.L

    @property
    def half_points(self) -> int:
        return int(math.floor(self.K * self.L / (2.0 * math.pi)))

    @property
    def points_per_axis(self) -> int:
        return 2 * self.half_points + 1

    @property
    def qubits_per_axis(self) -> int:
        return math.ceil(math.log2(self.points_per_axis))

    @property
    def n_total(self) -> int:
        return self.points_per_axis ** 3

    def axis_grid(self) -> SignedGrid1D:
        """Signed index grid for one axis of momenta."""
        return SignedGrid1D(a=self.half_points * self.dk,
                            n_points=self.points_per_axis,
                            n_sites=self.qubits_per_axis)

    @classmethod
    def from_energy_cutoff(cls, L: float, e_cut: float) -> "PlaneWaveGrid":
        """Kinetic-energy form: E_cut = K^2/2 in Hartree (atomic units)."""
        if e_cut <= 0:
            raise ValueError("E_cut must be positive")
        return cls(L=L, K=math.sqrt(2.0 * e_cut))


@dataclass(frozen=True)
class HermiteExpansion:
    """Coefficients h_0..h_l of x^l exp(-x^2/2) over Hermite functions."""

    l: int
    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.shape != (self.l + 1,):
            raise ValueError("h must have length l+1")
        object.__setattr__(self, "h", h)


@dataclass(frozen=True)
class Projection1D:
    """Bookkeeping for one axis projection.

    k_values are the represented lattice momenta in ascending order;
    coeffs are the matching unit-norm coefficients of the approximant.
    n_tilde is the whole-line normalization (root of the summed squared
    overlaps over the infinite lattice) and n_t the fraction of it kept
    below the cutoff; both feed the certified error bounds.
    """

    k_values: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)
    n_tilde: float
    n_t: float
    cutoff: float
    degree: int

    def __post_init__(self):
        if not 0.0 < self.n_t <= 1.0 + 1e-12:
            raise ValueError(f"n_t = {self.n_t} outside (0, 1]")


def hermite_poly(n: int, x):
    """Physicists' Hermite polynomial H_n by three-term recurrence.

    Accepts scalars or arrays; n is capped at 40 (values overflow fast).
    """
    if not 0 <= n <= MAX_HERMITE_ORDER:
        raise ValueError(f"order {n} outside [0, {MAX_HERMITE_ORDER}]")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, n):
        h, h_prev = 2.0 * x * h - 2.0 * k * h_prev, h
    return h if h.ndim else float(h)


def _hermite_gaussian_table(n_max: int, x: np.ndarray) -> np.ndarray:
    """psi_0..psi_n_max at x, stacked; stable normalized recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((n_max + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = (x * math.sqrt(2.0 / (k + 1)) * out[k]
                      - math.sqrt(k / (k + 1)) * out[k - 1])
    return out


def hermite_gaussian(n: int, x):
    """Normalized Hermite function psi_n(x) = c_n exp(-x^2/2) H_n(x).

    c_n = (2^n n! sqrt(pi))^(-1/2); computed by the normalized recurrence
    so values stay bounded (|psi_n| <= pi^(-1/4)) at any order.
    """
    if not 0 <= n <= MAX_HERMITE_ORDER:
        raise ValueError(f"order {n} outside [0, {MAX_HERMITE_ORDER}]")
    arr = np.asarray(x, dtype=float)
    table = _hermite_gaussian_table(n, np.atleast_1d(arr))
    val = table[n]
    return val if arr.ndim else float(val[0])


def h_coeffs(l: int) -> HermiteExpansion:
    """Expansion of x^l exp(-x^2/2) over psi_0..psi_l, unit 2-norm.

    Only parities matching l contribute: h_n = 2^(n/2) / (((l-n)/2)! sqrt(n!))
    up to overall normalization, zero for l-n odd.
    """
    if l < 0 or l > MAX_ANGULAR_MOMENTUM:
        raise ValueError(f"l={l} outside [0, {MAX_ANGULAR_MOMENTUM}]")
    h = np.zeros(l + 1)
    for n in range(l % 2, l + 1, 2):
        h[n] = 2.0 ** (n / 2) / (math.factorial((l - n) // 2)
                                 * math.sqrt(math.factorial(n)))
    h /= np.linalg.norm(h)
    return HermiteExpansion(l=l, h=h)


def pw_overlap(gamma: float, l: int, a: float, k, L: float):
    """Whole-line overlap of a shifted 1D Gaussian with a plane wave.

    Evaluates integral of g(x - a) * exp(i k x) / sqrt(L) over the real
    line, where g is the axis-normalized factor x^l exp(-gamma x^2):

        exp(i k a) * 2^(1/4) sqrt(pi) / (gamma^(1/4) sqrt(L))
            * sum_n i^n h_n psi_n(k / sqrt(2 gamma)).

    Accepts scalar or array k.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    karr = np.asarray(k, dtype=float)
    u = np.atleast_1d(karr) / math.sqrt(2.0 * gamma)
    h = h_coeffs(l).h
    table = _hermite_gaussian_table(l, u)
    phases = np.array([1j ** n for n in range(l + 1)])
    s = np.tensordot(h * phases, table, axes=([0], [0]))
    pref = 2.0 ** 0.25 * math.sqrt(math.pi) / (gamma ** 0.25 * math.sqrt(L))
    out = np.exp(1j * karr * a) * pref * s.reshape(karr.shape)
    return out if karr.ndim else complex(out)


def _cutoff_bracket(gamma: float, l: int, L: float, eps: float) -> float:
    ll = l * math.log(4.0 * l) if l > 0 else 0.0
    return (2.0 * math.log(2.0 / eps) + math.log(45.0)
            + math.log(1.0 + 2.0 * math.sqrt(math.pi) / (L * math.sqrt(gamma)))
            + ll)


def choose_cutoff(gamma: float, l: int, L: float, eps: float) -> float:
    """Certified momentum cutoff for target projection error eps.

    K = 2 sqrt(2 gamma) sqrt(S(eps)) with the bracket S from the module
    docstring; no slack is added beyond the equality case.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if gamma <= 0 or L <= 0:
        raise ValueError("gamma and L must be positive")
    if l < 0:
        raise ValueError("l must be nonnegative")
    return 2.0 * math.sqrt(2.0 * gamma) * math.sqrt(
        _cutoff_bracket(gamma, l, L, eps))


def choose_degree(K: float, gamma: float) -> int:
    """Polynomial point count m = ceil(e^2 K^2 / (2 gamma)).

    The fitted polynomial has degree m-1; the train built from it has bond
    dimension at most 2m+3.
    """
    if K <= 0 or gamma <= 0:
        raise ValueError("K and gamma must be positive")
    return math.ceil(math.e ** 2 * K ** 2 / (2.0 * gamma))


@dataclass(frozen=True)
class ChebyshevInterpolant:
    """Barycentric interpolant through m nodes C cos((2i+1) pi / (2m+2)).

    The nodes are the first m of the m+1 first-kind points for half-angle
    denominator 2m+2 (the last, most negative point is dropped); the
    barycentric weights absorb that deletion so evaluation stays stable at
    any m.
    """

    half_width: float
    nodes: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def fit(cls, f, half_width: float, m: int) -> "ChebyshevInterpolant":
        if m < 1:
            raise ValueError("need at least one node")
        if half_width <= 0:
            raise ValueError("half_width must be positive")
        i = np.arange(m + 1)
        angles = (2.0 * i + 1.0) * math.pi / (2.0 * m + 2.0)
        full_nodes = half_width * np.cos(angles)
        # weights of the full first-kind family, corrected for the dropped node
        w_full = (-1.0) ** i * np.sin(angles)
        nodes = full_nodes[:m]
        weights = w_full[:m] * (nodes - full_nodes[m])
        values = np.asarray([f(t) for t in nodes], dtype=float)
        return cls(half_width=half_width, nodes=nodes, values=values,
                   weights=weights)

    def __call__(self, x):
        xarr = np.asarray(x, dtype=float)
        xs = np.atleast_1d(xarr).astype(float)
        diff = xs[:, None] - self.nodes[None, :]
        hit = np.isclose(diff, 0.0, atol=1e-300, rtol=0.0)
        safe = np.where(hit, 1.0, diff)
        terms = self.weights / safe
        num = terms @ self.values
        den = terms.sum(axis=1)
        out = num / den
        exact_rows = hit.any(axis=1)
        if exact_rows.any():
            idx = hit[exact_rows].argmax(axis=1)
            out[exact_rows] = self.values[idx]
        return out.reshape(xarr.shape) if xarr.ndim else float(out[0])


def _newton_to_monomial(nodes, diffs):
    # Horner expansion of the Newton form, generic over float/mpf.
    coeffs = [diffs[-1]]
    for j in range(len(nodes) - 2, -1, -1):
        # multiply by (x - nodes[j]) and add diffs[j]
        new = [diffs[j] - nodes[j] * coeffs[0]]
        for i in range(len(coeffs) - 1):
            new.append(coeffs[i] - nodes[j] * coeffs[i + 1])
        new.append(coeffs[-1])
        coeffs = new
    return coeffs


def chebyshev_fit(n: int, C: float, m: int) -> Polynomial:
    """Degree m-1 monomial-basis interpolant of psi_n on [-C, C].

    Divided differences run in float64 up to degree 30 and in 60-digit
    arithmetic up to degree 59; beyond that the monomial basis is hopeless
    in any precision that is read back as float64, so the call is refused.
    For large m prefer :class:`ChebyshevInterpolant`, which has no such
    limit.
    """
    if m < 1:
        raise ValueError("need m >= 1 nodes")
    if m - 1 > MONOMIAL_DEGREE_MAX:
        raise ValueError(
            f"degree {m - 1} exceeds the monomial conversion guard "
            f"({MONOMIAL_DEGREE_MAX})")
    interp = ChebyshevInterpolant.fit(lambda t: hermite_gaussian(n, t), C, m)
    nodes = interp.nodes
    values = interp.values
    if m - 1 <= MONOMIAL_FLOAT64_MAX:
        diffs = np.array(values, dtype=float)
        for j in range(1, m):
            diffs[j:] = (diffs[j:] - diffs[j - 1:-1]) / (nodes[j:] - nodes[:-j])
        coeffs = _newton_to_monomial(list(nodes), list(diffs))
    else:
        import mpmath as mp

        with mp.workdps(60):
            mnodes = [mp.mpf(t) for t in nodes]
            diffs = [mp.mpf(v) for v in values]
            for j in range(1, m):
                for i in range(m - 1, j - 1, -1):
                    diffs[i] = (diffs[i] - diffs[i - 1]) / (mnodes[i] - mnodes[i - j])
            coeffs = [float(c) for c in _newton_to_monomial(mnodes, diffs)]
    return Polynomial(np.asarray(coeffs, dtype=complex))


def _lattice_weight(gamma: float, l: int, L: float, i_from: int,
                    i_to: int, a: float = 0.0) -> float:
    """Sum of squared overlaps over lattice indices i_from..i_to."""
    dk = 2.0 * math.pi / L
    idx = np.arange(i_from, i_to + 1)
    c = pw_overlap(gamma, l, a, idx * dk, L)
    return float(np.sum(np.abs(c) ** 2))


def projection_normalization(gamma: float, l: int, L: float) -> float:
    """Whole-lattice normalization factor (root of summed squared overlaps).

    Widens the lattice window until the added shells are negligible; the
    translation phase does not affect moduli, so the result holds for any
    center.
    """
    dk = 2.0 * math.pi / L
    # initial window: past the classical turning point of psi_l plus margin
    u_max = math.sqrt(2.0 * l + 1.0) + 10.0
    i_max = max(int(math.ceil(u_max * math.sqrt(2.0 * gamma) / dk)), 8)
    total = _lattice_weight(gamma, l, L, -i_max, i_max)
    while True:
        shell = (_lattice_weight(gamma, l, L, i_max + 1, 2 * i_max)
                 + _lattice_weight(gamma, l, L, -2 * i_max, -i_max - 1))
        total += shell
        i_max *= 2
        if shell <= 1e-28 * total:
            return math.sqrt(total)


def primitive_1d_mps(gamma: float, l: int, a: float, grid: PlaneWaveGrid,
                     eps: float) -> tuple[TensorTrain, Projection1D]:
    """Unit-norm train of polynomial plane-wave coefficients for one axis.

    Selects the certified cutoff and degree for the target error, fits the
    momentum profile sum_n i^n h_n psi_n(k / sqrt(2 gamma)) with a degree
    m-1 interpolant, evaluates it with the translation phase exp(i k a) on
    the signed momentum lattice, and factors the normalized coefficient
    vector into a train.  The train's bond dimension is bounded by 2m+3
    (at the grids this routine accepts, the measured ranks are far below
    the bound).

    Raises ProjectionError when the whole-line normalization factor drops
    below 2/3 (cell too small relative to the Gaussian's extent) and
    CapacityError when the per-axis grid exceeds the dense-assembly cap.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if grid.qubits_per_axis > DENSE_AXIS_QUBIT_CAP:
        raise tt_core.CapacityError(
            f"{grid.points_per_axis} points per axis exceed the dense "
            f"assembly cap (2^{DENSE_AXIS_QUBIT_CAP}); the analytic "
            f"polynomial route is gated by the degree-"
            f"{MONOMIAL_DEGREE_MAX} monomial guard")

    n_tilde = projection_normalization(gamma, l, grid.L)
    if n_tilde < 2.0 / 3.0:
        raise ProjectionError(
            f"whole-line normalization {n_tilde:.4f} < 2/3; the cell "
            f"(L={grid.L}) is too small for gamma={gamma}")

    K = choose_cutoff(gamma, l, grid.L, eps)
    m = choose_degree(K, gamma)
    dk = grid.dk
    i_cut = min(int(math.floor(K / dk)), grid.half_points)
    k_cut = i_cut * dk

    scale = math.sqrt(2.0 * gamma)
    half_width = max(K, k_cut) / scale
    h = h_coeffs(l).h
    interps = [ChebyshevInterpolant.fit(
        lambda t, nn=n: hermite_gaussian(nn, t), half_width, m)
        for n in range(l + 1)]

    sgrid = grid.axis_grid()
    idx = sgrid.index_values()
    kvals = idx * dk
    u = kvals / scale
    profile = np.zeros(idx.size, dtype=complex)
    live = np.abs(idx) <= i_cut
    for n in range(l + 1):
        if h[n] == 0.0:
            continue
        profile[live] += (1j ** n) * h[n] * interps[n](u[live])
    coeffs = profile * np.exp(1j * kvals * a)
    coeffs[~live] = 0.0

    nrm = float(np.linalg.norm(coeffs))
    if nrm == 0.0:
        raise ProjectionError("all polynomial coefficients vanished")
    coeffs = coeffs / nrm

    dense = np.zeros(2 ** sgrid.n_sites, dtype=complex)
    for pos, i in enumerate(idx):
        dense[sgrid.dense_index(int(i))] = coeffs[pos]
    tt = tt_core.from_dense(dense, tol=1e-14)

    w_below = _lattice_weight(gamma, l, grid.L, -i_cut, i_cut)
    n_t = math.sqrt(w_below) / n_tilde

    proj = Projection1D(k_values=kvals.astype(float), coeffs=coeffs,
                        n_tilde=n_tilde, n_t=min(n_t, 1.0), cutoff=k_cut,
                        degree=m - 1)
    return tt, proj


def primitive_3d_mps(g: PrimitiveGaussian, grid: PlaneWaveGrid,
                     eps: float) -> TensorTrain:
    """Train of the 3D plane-wave coefficients of a primitive Gaussian.

    Each Cartesian axis gets an error budget of eps / sqrt(3); the three
    unit-norm axis trains are joined by tensor product, so the connecting
    bonds have dimension 1 and the qubit count is three times the per-axis
    count.
    """
    eps_axis = eps / math.sqrt(3.0)
    parts = []
    for axis in range(3):
        tt, _ = primitive_1d_mps(g.gamma, g.ang[axis], g.center[axis],
                                 grid, eps_axis)
        parts.append(tt)
    out = tt_core.tensor_product(
        tt_core.tensor_product(parts[0], parts[1]), parts[2])
    return out
