import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chebbounds.errors import DimensionError, ExponentError, SequenceTooShort
from chebbounds.vectors import (
    Tolerance,
    WeightVector,
    as_sequence,
    ccumsum,
    conjugate_exponent,
    csuffix,
    csum,
    forward_differences,
    fsum,
    holder_sum,
    inner,
    norm,
    weighted_pair,
)

from conftest import sequences

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def test_inner_real():
    assert inner([1, 2], [3, 4]) == 11
    assert inner([1.5, -2.0, 3.0], [0, 0, 0]) == 0


def test_inner_conjugate_convention():
    # linear in the first argument, conjugate-linear in the second
    assert inner([1j], [1]) == 1j
    assert inner([1], [1j]) == -1j


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        inner([1, 2], [1, 2, 3])


@given(arrays(np.float64, 6, elements=finite), arrays(np.float64, 6, elements=finite))
def test_conjugate_symmetry(a, b):
    u, v = a[:3] + 1j * a[3:], b[:3] + 1j * b[3:]
    assert inner(u, v) == pytest.approx(np.conj(inner(v, u)), rel=1e-12, abs=1e-9)
    self_ip = inner(u, u)
    assert self_ip.imag == 0 and self_ip.real >= 0


def test_schwarz_random(rng):
    for _ in range(1000):
        d = rng.integers(1, 10)
        u = rng.normal(size=d) + 1j * rng.normal(size=d)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        assert abs(inner(u, v)) <= norm(u) * norm(v) * (1 + 1e-12)


@given(arrays(np.float64, 4, elements=finite), arrays(np.float64, 4, elements=finite))
def test_parallelogram(u, v):
    lhs = norm(u + v) ** 2 + norm(u - v) ** 2
    rhs = 2 * norm(u) ** 2 + 2 * norm(v) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_norm_zero_iff_zero():
    assert norm([0.0, 0.0]) == 0
    assert norm([0.0, 1e-150]) > 0


def test_forward_differences_examples():
    np.testing.assert_array_equal(forward_differences([0, 1, 3]).ravel(), [1, 2])
    np.testing.assert_array_equal(forward_differences([[2, 5]] * 3), np.zeros((2, 2)))
    np.testing.assert_array_equal(forward_differences([[1, 0], [0, 1]]), [[-1, 1]])


def test_forward_differences_too_short():
    with pytest.raises(SequenceTooShort):
        forward_differences([[1.0, 2.0]])


@given(sequences())
def test_forward_differences_telescope(x):
    total = csum(forward_differences(x))
    np.testing.assert_allclose(total, x[-1] - x[0], rtol=0, atol=1e-14 * max(1.0, np.abs(x).max()))


def test_holder_sum_examples():
    assert holder_sum([3, 4], "max") == 4
    assert holder_sum([3, 4], 2.0) == pytest.approx(5)
    assert holder_sum([3, 4], "sum") == 7


@pytest.mark.parametrize("bad", [1.0, 0.5, -2.0])
def test_holder_sum_rejects_small_exponent(bad):
    with pytest.raises(ExponentError):
        holder_sum([1, 2], bad)


@given(arrays(np.float64, 5, elements=st.floats(0, 100)), st.floats(1.01, 50), st.integers(0, 4))
def test_holder_sum_monotone(v, p, k):
    bigger = v.copy()
    bigger[k] += 1.0
    assert holder_sum(bigger, p) >= holder_sum(v, p)
    assert holder_sum(v, "max") <= holder_sum(v, p) * (1 + 1e-12) <= holder_sum(v, "sum") * (1 + 1e-12)


@given(st.floats(1.001, 1e3))
def test_conjugate_exponent(p):
    q = conjugate_exponent(p)
    assert 1 / p + 1 / q == pytest.approx(1.0, rel=1e-12)


def test_fsum_is_exact_on_cancellation():
    values = [1e16, 1.0, -1e16, 1.0]
    assert fsum(values) == 2.0
    assert fsum(np.array([1e16 + 0j, 1j, -1e16, 1.0])) == 1 + 1j


@given(arrays(np.float64, (7, 3), elements=finite))
def test_csum_matches_exact_rational_sum(a):
    exact = [float(sum(Fraction(v) for v in a[:, k])) for k in range(3)]
    np.testing.assert_array_equal(csum(a), exact)


@given(arrays(np.float64, 9, elements=finite))
def test_prefix_suffix_partition_total(p):
    pre, suf = ccumsum(p), csuffix(p)
    assert pre[-1] == math.fsum(p)
    assert suf[-1] == 0
    for i in range(p.size):
        assert pre[i] + suf[i] == pytest.approx(pre[-1], rel=1e-12, abs=1e-6)


def test_weight_vector_examples():
    w = WeightVector([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(w.partial, [1, 3, 6])
    np.testing.assert_array_equal(w.tail, [5, 3])
    assert w.total == 6 and not w.is_probability
    assert WeightVector([0.25, 0.75]).is_probability
    assert not WeightVector([1.5, -0.5]).is_probability
    assert WeightVector.uniform(4).is_uniform()


def test_probability_flag_tolerance():
    assert WeightVector([0.5, 0.5 + 1e-13]).is_probability
    assert not WeightVector([0.5, 0.5 + 1e-11]).is_probability


def test_weighted_pair_shape_checks():
    with pytest.raises(DimensionError):
        weighted_pair([0.5, 0.5], [[0.0], [1.0]], [[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(DimensionError):
        weighted_pair([1.0], [[0.0], [1.0]], [[0.0], [1.0]])
    with pytest.raises(SequenceTooShort):
        weighted_pair([1.0], [[0.0]], [[0.0]])


def test_ragged_sequence_rejected():
    with pytest.raises(DimensionError):
        as_sequence([[1.0, 2.0], [3.0]])


def test_tolerance():
    tol = Tolerance()
    assert tol.close(1.0, 1.0 + 1e-11)
    assert not tol.close(1.0, 1.0 + 1e-9)
    assert tol.le(1.0 + 1e-11, 1.0)
