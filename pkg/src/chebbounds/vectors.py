"""Ground-field arithmetic and inner-product space plumbing.

Elements of H are modelled as coordinate vectors (1-D numpy arrays of
float64 or complex128); a sequence x_1..x_n is a 2-D array of shape (n, d).
Scalars of the ground field are plain Python ``float`` or ``complex`` values,
so ``abs`` gives the modulus and ``.real`` the real part.

The inner product is linear in the first argument and conjugate-linear in
the second.  All reductions are correctly rounded (``math.fsum``), so the
identity checks downstream give the same bits on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionError, ExponentError, SequenceTooShort

#: Guard on |P_i| below which a partial sum is treated as zero.
EPS_RHO = 1e-12

Scalar = Union[float, complex]
Exponent = Union[str, float]


@dataclass(frozen=True)
class Tolerance:
    """Mixed absolute/relative comparison tolerance."""

    rel: float = 1e-10
    abs: float = 1e-12

    def close(self, a, b) -> bool:
        return abs(a - b) <= self.abs + self.rel * max(abs(a), abs(b))

    def le(self, a, b) -> bool:
        """``a <= b`` up to tolerance."""
        return a <= b + self.abs + self.rel * max(abs(a), abs(b))


DEFAULT_TOL = Tolerance()


# -- correctly rounded summation -------------------------------------------------

def _real_split(fn, arr: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(arr):
        return fn(arr.real) + 1j * fn(arr.imag)
    return fn(arr)


def _column_sums(arr: np.ndarray) -> np.ndarray:
    flat = arr.reshape(arr.shape[0], -1)
    return np.array([math.fsum(flat[:, k]) for k in range(flat.shape[1])]).reshape(arr.shape[1:])


def _prefix_sums(arr: np.ndarray) -> np.ndarray:
    flat = arr.reshape(arr.shape[0], -1)
    out = np.array([[math.fsum(flat[: i + 1, k]) for k in range(flat.shape[1])] for i in range(flat.shape[0])])
    return out.reshape(arr.shape)


def fsum(values) -> Scalar:
    """Correctly rounded sum of a 1-D array of reals or complexes."""
    arr = np.asarray(values).ravel()
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real), math.fsum(arr.imag))
    return math.fsum(arr.astype(float, copy=False))


def csum(values) -> np.ndarray | Scalar:
    """Correctly rounded sum over the leading axis.

    1-D input reduces to a scalar; higher-rank input gives one
    :func:`math.fsum` per trailing coordinate.
    """
    arr = np.asarray(values)
    if arr.ndim <= 1:
        return fsum(arr)
    arr = arr.astype(np.result_type(arr, float))
    if arr.shape[0] == 0:
        return np.zeros(arr.shape[1:], dtype=arr.dtype)
    return _real_split(_column_sums, arr)


def ccumsum(values) -> np.ndarray:
    """Correctly rounded prefix sums over the leading axis, so the last entry equals csum."""
    arr = np.asarray(values)
    arr = arr.astype(np.result_type(arr, float))
    return _real_split(_prefix_sums, arr)


def csuffix(values) -> np.ndarray:
    """Correctly rounded tail sums: element i is the sum of entries i+1..n-1."""
    arr = np.asarray(values)
    rev = ccumsum(arr[::-1])[::-1]
    out = np.zeros_like(rev)
    out[:-1] = rev[1:]
    return out


# -- vectors and sequences -------------------------------------------------

def _coerce(arr):
    arr = np.asarray(arr)
    if arr.dtype == object:
        raise DimensionError("ragged or non-numeric coordinates")
    if np.iscomplexobj(arr):
        return arr.astype(np.complex128)
    return arr.astype(np.float64)


def as_vector(u) -> np.ndarray:
    """Coerce a scalar or flat list of coordinates to a 1-D vector."""
    try:
        arr = _coerce(u)
    except ValueError as exc:
        raise DimensionError(str(exc)) from exc
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"expected a vector, got shape {arr.shape}")
    return arr


def as_sequence(seq, min_length: int = 1) -> np.ndarray:
    """Coerce a sequence of vectors (or of scalars) to an (n, d) array."""
    try:
        arr = _coerce(seq)
    except ValueError as exc:
        raise DimensionError(f"ragged sequence: {exc}") from exc
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise DimensionError(f"expected a sequence of vectors, got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise SequenceTooShort(f"need at least {min_length} members, got {arr.shape[0]}")
    return arr


def is_complex(*arrays) -> bool:
    return any(np.iscomplexobj(a) for a in arrays)


def conj_terms(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rounded real products making up u * conj(v), along a new last axis.

    Summing the last axis exactly gives u * conj(v).  Keeping the products
    apart (instead of numpy's complex multiply, which may fuse them) makes
    <u, u> exactly real and <u, v> exactly conj(<v, u>) after an fsum.
    """
    if not (np.iscomplexobj(u) or np.iscomplexobj(v)):
        return (u * v)[..., None]
    ur, ui, vr, vi = np.real(u), np.imag(u), np.real(v), np.imag(v)
    first = (ur * vr) + 1j * (ui * vr)
    second = (ui * vi) - 1j * (ur * vi)
    return np.stack(np.broadcast_arrays(first, second), axis=-1)


def inner(u, v) -> Scalar:
    """<u, v> = sum_k u_k * conj(v_k)."""
    u, v = as_vector(u), as_vector(v)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.size} vs {v.size}")
    return fsum(conj_terms(u, v))


def norm(u) -> float:
    return math.sqrt(max(inner(u, u).real, 0.0))


def row_inners(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """<a_i, b_i> for every row i, correctly rounded over coordinates."""
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    terms = conj_terms(a, b).reshape(a.shape[0], -1)
    return csum(terms.T)


def row_norms(a: np.ndarray) -> np.ndarray:
    sq = csum((np.abs(a) ** 2).T)
    return np.sqrt(np.maximum(np.real(sq), 0.0))


def forward_differences(seq) -> np.ndarray:
    """Delta x_i = x_{i+1} - x_i for i = 1..n-1."""
    arr = as_sequence(seq)
    if arr.shape[0] < 2:
        raise SequenceTooShort("forward differences need n >= 2")
    return arr[1:] - arr[:-1]


# -- Hölder machinery ------------------------------------------------------

def conjugate_exponent(p: float) -> float:
    """The q with 1/p + 1/q = 1."""
    if not p > 1:
        raise ExponentError(f"Hölder exponent must exceed 1, got {p}")
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def holder_sum(values, exponent: Exponent, weights=None) -> float:
    """max, (sum w v^p)^(1/p) or sum w v of nonnegative values.

    ``exponent`` is ``"max"``, ``"sum"`` or a finite real p > 1.  Weights,
    when given, enter the p-power and sum forms only: the max side of a
    weighted Hölder pair is unweighted.
    """
    v = np.asarray(values, dtype=float)
    w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float)
    if exponent == "max":
        return float(v.max()) if v.size else 0.0
    if exponent == "sum":
        return fsum(w * v)
    p = float(exponent)
    if math.isinf(p):
        return float(v.max()) if v.size else 0.0
    if not p > 1:
        raise ExponentError(f"finite Hölder exponent must exceed 1, got {p}")
    top = float(v.max()) if v.size else 0.0
    if top == 0.0:
        return 0.0
    # scale by the max to keep large p from overflowing
    return top * fsum(w * (v / top) ** p) ** (1.0 / p)


# -- weights and pairs -----------------------------------------------------

@dataclass(frozen=True)
class WeightVector:
    """Real weights p_1..p_n with partial sums P_i and tail sums P̄_i.

    ``partial[i-1]`` is P_i for i = 1..n and ``tail[i-1]`` is P̄_i = P_n - P_i
    for i = 1..n-1 (computed as a correctly rounded suffix sum).
    """

    p: np.ndarray
    partial: np.ndarray = field(init=False, repr=False)
    tail: np.ndarray = field(init=False, repr=False)
    total: float = field(init=False)
    is_probability: bool = field(init=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DimensionError(f"weights must be a non-empty flat list, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise DimensionError("weights must be finite")
        p.setflags(write=False)
        partial = ccumsum(p)
        tail = csuffix(p)[:-1]
        total = fsum(p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "partial", partial)
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "total", total)
        object.__setattr__(
            self, "is_probability", bool(np.all(p >= 0) and abs(total - 1.0) <= EPS_RHO)
        )

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.p.size

    def is_uniform(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.p - 1.0 / self.n) <= tol))


def as_weights(p) -> WeightVector:
    if isinstance(p, WeightVector):
        return p
    return WeightVector(np.asarray(p, dtype=float))


@dataclass(frozen=True)
class SequencePair:
    """Aligned sequences of common length n >= 2 and common dimension d."""

    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        a = as_sequence(self.first, min_length=2)
        b = as_sequence(self.second, min_length=2)
        if a.shape != b.shape:
            raise DimensionError(f"sequence shapes differ: {a.shape} vs {b.shape}")
        if is_complex(a, b):
            a, b = a.astype(np.complex128), b.astype(np.complex128)
        object.__setattr__(self, "first", a)
        object.__setattr__(self, "second", b)

    @property
    def n(self) -> int:
        return self.first.shape[0]

    @property
    def dim(self) -> int:
        return self.first.shape[1]

    @property
    def field(self) -> str:
        return "complex" if is_complex(self.first) else "real"


def weighted_pair(p, x, y) -> tuple[WeightVector, np.ndarray, np.ndarray]:
    """Validate and coerce (p, x, y) to a common length."""
    pair = SequencePair(x, y)
    w = as_weights(p)
    if w.n != pair.n:
        raise DimensionError(f"{w.n} weights for sequences of length {pair.n}")
    return w, pair.first, pair.second
