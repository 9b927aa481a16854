"""Quantized tensor trains over binary site indices.

A :class:`TensorTrain` stores a length-2^n complex vector as a chain of
rank-3 cores with shapes ``(left_bond, 2, right_bond)``.  Entry ``i`` of the
encoded vector is the matrix product selected by the bits of ``i``, most
significant bit first:

    v[i] = A1[s1] @ A2[s2] @ ... @ An[sn],    i = sum_k 2^(n-k) s_k.

All operations are pure: they return new values and never mutate their
inputs, so trains can be shared freely across threads.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DEFAULT_DENSE_CAP",
    "CapacityError",
    "DenseVector",
    "ShapeError",
    "TensorTrain",
    "add",
    "from_debug_json",
    "from_dense",
    "hadamard",
    "inner_product",
    "isometry_residuals",
    "left_canonicalize",
    "max_bond_dim",
    "norm",
    "round",
    "scale",
    "tensor_product",
    "to_debug_json",
    "to_dense",
]

# Dense expansions above this site count are refused rather than attempted.
DEFAULT_DENSE_CAP = 24

_EPS = np.finfo(float).eps


class ShapeError(ValueError):
    """Operands have incompatible shapes or an invalid core chain."""


class CapacityError(RuntimeError):
    """A dense expansion would exceed the configured site cap."""


class DenseVector:
    """Explicit length-2^n complex vector; the brute-force oracle carrier."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        e = np.ascontiguousarray(entries, dtype=complex)
        if e.ndim != 1:
            raise ShapeError(f"expected a 1-d array, got shape {e.shape}")
        n = e.size
        if n < 2 or (n & (n - 1)) != 0:
            raise ShapeError(f"length must be a power of two >= 2, got {n}")
        self.entries = e

    @property
    def n_sites(self) -> int:
        return int(self.entries.size).bit_length() - 1

    def __len__(self) -> int:
        return int(self.entries.size)

    def __getitem__(self, i):
        return self.entries[i]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self) -> str:
        return f"DenseVector(n_sites={self.n_sites})"


class TensorTrain:
    """Chain of rank-3 complex cores encoding a length-2^n vector.

    Parameters
    ----------
    cores : sequence of array_like
        Rank-3 cores, each of shape ``(left_bond, 2, right_bond)``.  The
        first left bond and last right bond must be 1, and adjacent bonds
        must match.
    canonical_form : {"none", "left"}
        "left" promises every core but the last is a left isometry.  Set by
        :func:`left_canonicalize`; cleared by operations that break it.
    truncation_error : float
        Frobenius-norm bound on the error introduced by the operation that
        produced this value (0 for exact constructions).  It is a property
        of the construction step, not an accumulated history.
    """

    __slots__ = ("cores", "canonical_form", "truncation_error")

    def __init__(self, cores, canonical_form: str = "none",
                 truncation_error: float = 0.0):
        cores = tuple(np.ascontiguousarray(c, dtype=complex) for c in cores)
        if not cores:
            raise ShapeError("a tensor train needs at least one core")
        for j, c in enumerate(cores):
            if c.ndim != 3 or c.shape[1] != 2:
                raise ShapeError(
                    f"core {j} has shape {c.shape}, expected (left, 2, right)")
            if c.shape[0] < 1 or c.shape[2] < 1:
                raise ShapeError(f"core {j} has a zero bond dimension")
        if cores[0].shape[0] != 1:
            raise ShapeError("first core must have left bond 1")
        if cores[-1].shape[2] != 1:
            raise ShapeError("last core must have right bond 1")
        for j in range(len(cores) - 1):
            if cores[j].shape[2] != cores[j + 1].shape[0]:
                raise ShapeError(
                    f"bond mismatch between cores {j} and {j + 1}: "
                    f"{cores[j].shape[2]} vs {cores[j + 1].shape[0]}")
        if canonical_form not in ("none", "left"):
            raise ValueError(f"unknown canonical form {canonical_form!r}")
        self.cores = cores
        self.canonical_form = canonical_form
        self.truncation_error = float(truncation_error)

    @property
    def n_sites(self) -> int:
        return len(self.cores)

    @property
    def bond_dims(self) -> tuple[int, ...]:
        """Internal bond dimensions (empty for a single-site train)."""
        return tuple(c.shape[2] for c in self.cores[:-1])

    def __repr__(self) -> str:
        bonds = ",".join(str(b) for b in self.bond_dims) or "-"
        return (f"TensorTrain(n_sites={self.n_sites}, bonds=[{bonds}], "
                f"form={self.canonical_form})")


def _as_entries(v) -> np.ndarray:
    if isinstance(v, DenseVector):
        return v.entries
    return DenseVector(np.asarray(v)).entries


def from_dense(v, tol: float = 0.0) -> TensorTrain:
    """Factor a dense vector into a tensor train by sequential SVD.

    Parameters
    ----------
    v : DenseVector or array_like
        Complex vector of length 2^n, n >= 1.
    tol : float
        Relative accuracy target.  Each unfolding is truncated at
        ``tol * ||v|| / sqrt(n_bonds)`` so the total reconstruction error
        stays below ``tol * ||v||``.  With ``tol = 0`` only singular values
        at the machine-noise floor are dropped, which yields the exact
        numerical ranks.

    Returns
    -------
    TensorTrain
        Left-canonical train whose dense expansion matches ``v``.
    """
    entries = _as_entries(v)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    n = int(entries.size).bit_length() - 1
    nrm = float(np.linalg.norm(entries))
    delta = tol * nrm / np.sqrt(max(n - 1, 1))
    cores = []
    discarded = 0.0
    C = entries.reshape(1, -1)
    r_prev = 1
    for _ in range(n - 1):
        C = C.reshape(r_prev * 2, -1)
        U, S, Vt = np.linalg.svd(C, full_matrices=False)
        floor = _EPS * max(C.shape) * (S[0] if S.size else 0.0)
        r = int(np.count_nonzero(S > max(delta, floor)))
        r = max(r, 1)
        discarded += float(np.sum(S[r:] ** 2))
        cores.append(U[:, :r].reshape(r_prev, 2, r))
        C = S[:r, None] * Vt[:r]
        r_prev = r
    cores.append(C.reshape(r_prev, 2, 1))
    return TensorTrain(cores, canonical_form="left",
                       truncation_error=float(np.sqrt(discarded)))


def to_dense(t: TensorTrain, cap: int = DEFAULT_DENSE_CAP) -> DenseVector:
    """Contract a train into its explicit dense vector.

    Refuses trains with more than ``cap`` sites (2^cap entries) so a typo
    cannot silently allocate petabytes.
    """
    if t.n_sites > cap:
        raise CapacityError(
            f"dense expansion of {t.n_sites} sites exceeds the cap of {cap}")
    vec = t.cores[0].reshape(2, -1)
    for core in t.cores[1:]:
        vec = np.tensordot(vec, core, axes=([-1], [0]))
        vec = vec.reshape(-1, core.shape[2])
    return DenseVector(vec.reshape(-1))


def add(a: TensorTrain, b: TensorTrain) -> TensorTrain:
    """Sum of two trains; internal bonds add (block-diagonal cores)."""
    if a.n_sites != b.n_sites:
        raise ShapeError(f"site mismatch: {a.n_sites} vs {b.n_sites}")
    n = a.n_sites
    if n == 1:
        return TensorTrain([a.cores[0] + b.cores[0]])
    cores = []
    for j in range(n):
        ca, cb = a.cores[j], b.cores[j]
        if j == 0:
            cores.append(np.concatenate([ca, cb], axis=2))
        elif j == n - 1:
            cores.append(np.concatenate([ca, cb], axis=0))
        else:
            la, _, ra = ca.shape
            lb, _, rb = cb.shape
            c = np.zeros((la + lb, 2, ra + rb), dtype=complex)
            c[:la, :, :ra] = ca
            c[la:, :, ra:] = cb
            cores.append(c)
    return TensorTrain(cores)


def scale(a: TensorTrain, c: complex) -> TensorTrain:
    """Multiply by a scalar (absorbed into the first core)."""
    cores = list(a.cores)
    cores[0] = cores[0] * complex(c)
    return TensorTrain(cores)


def hadamard(a: TensorTrain, b: TensorTrain) -> TensorTrain:
    """Entrywise product; bond dimensions multiply."""
    if a.n_sites != b.n_sites:
        raise ShapeError(f"site mismatch: {a.n_sites} vs {b.n_sites}")
    cores = []
    for ca, cb in zip(a.cores, b.cores):
        la, _, ra = ca.shape
        lb, _, rb = cb.shape
        c = np.einsum("asb,csd->acsbd", ca, cb)
        cores.append(c.reshape(la * lb, 2, ra * rb))
    return TensorTrain(cores)


def tensor_product(a: TensorTrain, b: TensorTrain) -> TensorTrain:
    """Kronecker product; the connecting bond has dimension 1."""
    return TensorTrain(list(a.cores) + list(b.cores))


def inner_product(a: TensorTrain, b: TensorTrain) -> complex:
    """<a, b>, conjugate-linear in the first argument."""
    if a.n_sites != b.n_sites:
        raise ShapeError(f"site mismatch: {a.n_sites} vs {b.n_sites}")
    E = np.ones((1, 1), dtype=complex)
    for ca, cb in zip(a.cores, b.cores):
        E = np.einsum("ab,asc,bsd->cd", E, ca.conj(), cb, optimize=True)
    return complex(E[0, 0])


def norm(a: TensorTrain) -> float:
    """2-norm of the encoded vector, via canonicalization for stability."""
    t = a if a.canonical_form == "left" else left_canonicalize(a)
    return float(np.linalg.norm(t.cores[-1]))


def left_canonicalize(a: TensorTrain) -> TensorTrain:
    """Left-to-right QR sweep.

    Every core except the last becomes a left isometry; the last core
    carries the norm.  The encoded vector is unchanged.  Bond dimensions
    can only shrink (QR exposes rank deficiencies, it never pads).
    """
    cores = [c.copy() for c in a.cores]
    for j in range(len(cores) - 1):
        l, _, r = cores[j].shape
        Q, R = np.linalg.qr(cores[j].reshape(l * 2, r))
        cores[j] = Q.reshape(l, 2, Q.shape[1])
        cores[j + 1] = np.tensordot(R, cores[j + 1], axes=([1], [0]))
    return TensorTrain(cores, canonical_form="left",
                       truncation_error=a.truncation_error)


def round(a: TensorTrain, svd_cutoff: float) -> TensorTrain:
    """Recompress with a relative singular-value cutoff.

    Two passes: a left-canonicalization sweep, then a right-to-left SVD
    sweep.  At each bond, singular values ``s_i <= svd_cutoff * s_0`` are
    discarded (the largest one always survives).  Because the untouched
    side of the chain stays canonical during the second sweep, the
    discarded weights add in quadrature and

        ||dense(a) - dense(result)|| <= sqrt(sum of discarded s^2),

    which the result reports as its ``truncation_error``.

    Parameters
    ----------
    a : TensorTrain
    svd_cutoff : float
        Relative cutoff in [0, inf).  0 drops only exact zeros; 1 collapses
        every bond to dimension 1.
    """
    if svd_cutoff < 0:
        raise ValueError("svd_cutoff must be nonnegative")
    t = left_canonicalize(a)
    cores = [c.copy() for c in t.cores]
    discarded = 0.0
    for j in range(len(cores) - 1, 0, -1):
        l, _, r = cores[j].shape
        U, S, Vt = np.linalg.svd(cores[j].reshape(l, 2 * r),
                                 full_matrices=False)
        if S.size and S[0] > 0:
            k = int(np.count_nonzero(S > svd_cutoff * S[0]))
            k = max(k, 1)
        else:
            k = 1
        discarded += float(np.sum(S[k:] ** 2))
        cores[j] = Vt[:k].reshape(k, 2, r)
        cores[j - 1] = np.tensordot(cores[j - 1], U[:, :k] * S[:k],
                                    axes=([2], [0]))
    return TensorTrain(cores, truncation_error=float(np.sqrt(discarded)))


def max_bond_dim(a: TensorTrain) -> int:
    """Largest internal bond dimension; 1 for a single-site train."""
    if a.n_sites == 1:
        return 1
    return max(c.shape[2] for c in a.cores[:-1])


def isometry_residuals(a: TensorTrain) -> list[float]:
    """Per-core deviation ||A^H A - I||_F of the left-isometry property.

    The last core is excluded; it carries the norm.
    """
    out = []
    for c in a.cores[:-1]:
        l, _, r = c.shape
        m = c.reshape(l * 2, r)
        out.append(float(np.linalg.norm(m.conj().T @ m - np.eye(r))))
    return out


def to_debug_json(t: TensorTrain) -> dict:
    """JSON-serializable dump: core shapes plus entries as [re, im] pairs."""
    return {
        "shapes": [list(c.shape) for c in t.cores],
        "cores": [
            [[float(z.real), float(z.imag)] for z in c.ravel()]
            for c in t.cores
        ],
    }


def from_debug_json(d: dict) -> TensorTrain:
    """Inverse of :func:`to_debug_json`."""
    cores = []
    for shape, flat in zip(d["shapes"], d["cores"]):
        arr = np.array([complex(re, im) for re, im in flat], dtype=complex)
        cores.append(arr.reshape(shape))
    return TensorTrain(cores)
