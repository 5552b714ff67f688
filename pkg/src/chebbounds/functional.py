"""The Čebyšev functional and its representations through forward differences.

Every right-hand side here is evaluated along its own route so that each
one can serve as an oracle for :func:`chebyshev`.  Indices in error
messages are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePartialSum, DimensionError
from .vectors import (
    EPS_RHO,
    Scalar,
    WeightVector,
    as_sequence,
    as_weights,
    ccumsum,
    conj_terms,
    csuffix,
    csum,
    forward_differences,
    fsum,
    inner,
    is_complex,
    weighted_pair,
)


def _scalar(value, complex_field: bool) -> Scalar:
    return complex(value) if complex_field else float(np.real(value))


def _pairing(u: np.ndarray, v: np.ndarray, coef=None):
    """sum_i coef_i <u_i, v_i> with one correctly rounded reduction."""
    terms = conj_terms(u, v)
    if coef is not None:
        terms = np.asarray(coef)[:, None, None] * terms
    return fsum(terms.ravel())


def chebyshev(p, x, y) -> Scalar:
    """T_n(p; x, y) = P_n sum p_i <x_i, y_i> - <sum p_i x_i, sum p_i y_i>."""
    w, x, y = weighted_pair(p, x, y)
    px = w.p[:, None] * x
    py = w.p[:, None] * y
    value = w.total * _pairing(px, y) - inner(csum(px), csum(py))
    return _scalar(value, is_complex(x))


def term_scale(p, x, y) -> float:
    """|P_n| sum |p_i <x_i, y_i>| + |<sum p_i x_i, sum p_i y_i>|, the size of what cancels in T_n."""
    w, x, y = weighted_pair(p, x, y)
    px = w.p[:, None] * x
    py = w.p[:, None] * y
    return float(abs(w.total) * fsum(np.abs(px * np.conj(y)).ravel()) + abs(inner(csum(px), csum(py))))


def chebyshev_condition(p, x, y) -> float:
    """term_scale / |T_n|; rounding error of :func:`chebyshev` is a few ulps of this times |T_n|.

    Returns inf when T_n vanishes.
    """
    T = abs(chebyshev(p, x, y))
    return term_scale(p, x, y) / T if T > 0 else np.inf


def chebyshev_uniform(x, y) -> Scalar:
    """T_n(x, y): the functional under the uniform weights 1/n."""
    n = as_sequence(x).shape[0]
    return chebyshev(WeightVector.uniform(n), x, y)


@dataclass(frozen=True)
class PartialSums:
    """A[i-1] = A_i(p) for i = 1..n and Abar[i-1] = A_n(p) - A_i(p) for i = 1..n-1."""

    A: np.ndarray
    Abar: np.ndarray


def partial_sums(p, a) -> PartialSums:
    w = as_weights(p)
    a = as_sequence(a)
    if w.n != a.shape[0]:
        raise DimensionError(f"{w.n} weights for a sequence of length {a.shape[0]}")
    pa = w.p[:, None] * a
    return PartialSums(A=ccumsum(pa), Abar=csuffix(pa)[:-1])


def _abel_vectors(w: WeightVector, sums: PartialSums) -> np.ndarray:
    """Rows P_i A_n - P_n A_i for i = 1..n-1."""
    P = w.partial[:-1, None]
    return P * sums.A[-1] - w.total * sums.A[:-1]


def identity_abel_rhs(p, a, b) -> Scalar:
    """sum_{i<n} <P_i A_n(p) - P_n A_i(p), Delta b_i>."""
    w, a, b = weighted_pair(p, a, b)
    k = _abel_vectors(w, partial_sums(w, a))
    return _scalar(_pairing(k, forward_differences(b)), is_complex(a))


def _check_partial(w: WeightVector, upto: int) -> None:
    for i in range(upto):
        if abs(w.partial[i]) <= EPS_RHO:
            raise DegeneratePartialSum(i + 1, "P", w.partial[i])


def _check_tail(w: WeightVector) -> None:
    for i, value in enumerate(w.tail):
        if abs(value) <= EPS_RHO:
            raise DegeneratePartialSum(i + 1, "Pbar", value)


def identity_normalized_rhs(p, a, b) -> Scalar:
    """P_n sum_{i<n} P_i <A_n/P_n - A_i/P_i, Delta b_i>; needs every P_i != 0."""
    w, a, b = weighted_pair(p, a, b)
    _check_partial(w, w.n)
    sums = partial_sums(w, a)
    P = w.partial[:-1]
    means = sums.A[-1] / w.total - sums.A[:-1] / P[:, None]
    value = w.total * _pairing(means, forward_differences(b), P)
    return _scalar(value, is_complex(a))


def identity_tail_mean_rhs(p, a, b) -> Scalar:
    """sum_{i<n} P_i P̄_i <Ā_i/P̄_i - A_i/P_i, Delta b_i>; needs P_i, P̄_i != 0."""
    w, a, b = weighted_pair(p, a, b)
    _check_partial(w, w.n - 1)
    _check_tail(w)
    sums = partial_sums(w, a)
    P, Pbar = w.partial[:-1], w.tail
    means = sums.Abar / Pbar[:, None] - sums.A[:-1] / P[:, None]
    value = _pairing(means, forward_differences(b), P * Pbar)
    return _scalar(value, is_complex(a))


def kernel_matrix(p) -> np.ndarray:
    """(n-1) x (n-1) matrix with entries P_min(i,j) * P̄_max(i,j)."""
    w = as_weights(p)
    idx = np.arange(w.n - 1)
    lo = np.minimum.outer(idx, idx)
    hi = np.maximum.outer(idx, idx)
    return w.partial[lo] * w.tail[hi]


def kernel(p, a, i: int) -> np.ndarray:
    """K(i) = sum_j P_min(i,j) P̄_max(i,j) Delta a_j, for 1 <= i <= n-1."""
    w = as_weights(p)
    a = as_sequence(a, min_length=2)
    if w.n != a.shape[0]:
        raise DimensionError(f"{w.n} weights for a sequence of length {a.shape[0]}")
    if not 1 <= i <= w.n - 1:
        raise IndexError(f"kernel index {i} outside 1..{w.n - 1}")
    row = kernel_matrix(w)[i - 1]
    return csum(row[:, None] * forward_differences(a))


def double_sum_rhs(p, a, b) -> Scalar:
    """sum_i sum_j P_min(i,j) P̄_max(i,j) <Delta a_j, Delta b_i>."""
    w, a, b = weighted_pair(p, a, b)
    K = kernel_matrix(w)
    da, db = forward_differences(a), forward_differences(b)
    # terms[i, j, k, :] = K_ij * da_jk * conj(db_ik)
    terms = K[:, :, None, None] * conj_terms(da[None, :, :], db[:, None, :])
    return _scalar(fsum(terms.ravel()), is_complex(a))


def summation_by_parts(d, v) -> Scalar:
    """Left side sum_{l<n} <d_l, Delta v_l>."""
    d, v = _sbp_pair(d, v)
    return _scalar(_pairing(d[:-1], forward_differences(v)), is_complex(d))


def summation_by_parts_rhs(d, v) -> Scalar:
    """Boundary form <d_n, v_n> - <d_1, v_1> - sum_{l<n} <Delta d_l, v_{l+1}>."""
    d, v = _sbp_pair(d, v)
    boundary = inner(d[-1], v[-1]) - inner(d[0], v[0])
    return _scalar(boundary - _pairing(forward_differences(d), v[1:]), is_complex(d))


def _sbp_pair(d, v):
    d, v = as_sequence(d, min_length=2), as_sequence(v, min_length=2)
    if d.shape != v.shape:
        raise DimensionError(f"shape mismatch: {d.shape} vs {v.shape}")
    if is_complex(d, v):
        d, v = d.astype(np.complex128), v.astype(np.complex128)
    return d, v


# -- residuals ---------------------------------------------------------------

IDENTITIES = {
    "abel": identity_abel_rhs,
    "normalized": identity_normalized_rhs,
    "tail_mean": identity_tail_mean_rhs,
    "double_sum": double_sum_rhs,
}

#: relative residuals are floored at this fraction of term_scale
SCALE_FLOOR = 1e-6


def _relative(diff: float, ref: float) -> float:
    if ref > 0:
        return diff / ref
    return 0.0 if diff == 0 else np.inf


def identity_residuals(p, x, y) -> dict[str, float | str]:
    """Relative residual |rhs - T_n| / max(|T_n|, 1e-6 term_scale) for each identity.

    Identities whose partial sums degenerate map to a "skipped: ..." string.
    """
    w, x, y = weighted_pair(p, x, y)
    T = chebyshev(w, x, y)
    ref = max(abs(T), SCALE_FLOOR * term_scale(w, x, y))
    out = {}
    for name, rhs in IDENTITIES.items():
        try:
            out[name] = _relative(abs(rhs(w, x, y) - T), ref)
        except DegeneratePartialSum as exc:
            out[name] = f"skipped: {exc}"
    return out


def kernel_residual(p, a) -> float:
    """max_i |K(i) - (P_i A_n - P_n A_i)| / max(1, |P_i A_n - P_n A_i|)."""
    w = as_weights(p)
    a = as_sequence(a, min_length=2)
    if np.iscomplexobj(a):
        a = a.astype(np.complex128)
    abel = _abel_vectors(w, partial_sums(w, a))
    worst = 0.0
    for i in range(1, w.n):
        ref = np.linalg.norm(abel[i - 1])
        worst = max(worst, float(np.linalg.norm(kernel(w, a, i) - abel[i - 1]) / max(1.0, ref)))
    return worst
