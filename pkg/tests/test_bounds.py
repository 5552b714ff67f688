import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chebbounds.bounds import (
    THEOREM_BRANCHES,
    BallEnclosure,
    abel_bounds,
    check_enclosure,
    compare_all,
    double_sum_bounds,
    evaluate,
    forward_diff_bounds,
    forward_diff_coefficients,
    gruss_bound,
    half_norm_bounds,
    k_infinity,
    k_one,
    k_q,
    normalized_bounds,
    tail_mean_bounds,
    uniform_abel_bounds,
    uniform_forward_diff_coefficients,
    uniform_kernel_bound,
    uniform_kernel_holder_bound,
    uniform_normalized_bounds,
    uniform_tail_mean_bounds,
)
from chebbounds.errors import EnclosureViolated, ExponentError, NotProbability, NotUniform
from chebbounds.functional import kernel_matrix
from chebbounds.vectors import WeightVector

from conftest import instances

BRANCHES = ("max_sum", "holder", "sum_max")
SIGNED_OK = ("T3_1", "T3_3", "T3_5", "T3_6")


def enclosure_for(seq):
    """Endpoints along e_1 of the ball about the mean that holds every member."""
    center = seq.mean(axis=0)
    radius = np.linalg.norm(seq - center, axis=1).max()
    direction = np.zeros(seq.shape[1])
    direction[0] = 1.0
    return BallEnclosure(center - radius * direction, center + radius * direction)


def dominates(report, slack=1e-9):
    return report.value >= report.functional * (1 - slack) - 1e-12


# -- enclosures --------------------------------------------------------------

def test_endpoints_are_enclosed():
    low, high = np.array([0.0, 1.0]), np.array([2.0, -1.0])
    assert check_enclosure(np.array([low, high]), BallEnclosure(low, high)).ok


def test_outside_point_is_reported():
    low, high = np.array([0.0, 1.0]), np.array([2.0, -1.0])
    seq = np.array([low, 0.5 * (low + high), 2 * high - low])
    check = check_enclosure(seq, BallEnclosure(low, high))
    assert not check.ok and check.worst_index == 3 and check.excess > 0


@given(st.lists(st.floats(0, 1), min_size=2, max_size=10))
def test_segment_lies_in_midpoint_ball(ts):
    low, high = np.array([1.0, -2.0, 0.5]), np.array([-3.0, 4.0, 2.0])
    seq = np.array([low + t * (high - low) for t in ts])
    assert check_enclosure(seq, BallEnclosure(low, high)).ok


# -- probability-weight bounds ---------------------------------------------

def test_gruss_two_point_witness():
    v = np.array([0.6, 0.8])
    x = np.array([[1.0, 1.0], [1.0, 1.0] + v])
    y = np.array([[-2.0, 0.0], [-2.0, 0.0] + v])
    r = gruss_bound([0.5, 0.5], x, y, BallEnclosure(*x), BallEnclosure(*y))
    assert r.value == pytest.approx(0.25) and r.ratio == pytest.approx(1.0, abs=1e-12)


def test_gruss_preconditions(canonical):
    p, x, y = canonical
    e = BallEnclosure(np.zeros(1), np.ones(1))
    with pytest.raises(NotProbability):
        gruss_bound([1.5, -0.5], x, y, e, e)
    with pytest.raises(EnclosureViolated) as info:
        gruss_bound(p, x, 3 * y, e, e)
    assert info.value.index == 2


def test_gruss_constant_y(canonical):
    p, x, _ = canonical
    y = np.ones((2, 1))
    e = BallEnclosure(np.zeros(1), np.ones(1))
    r = gruss_bound(p, x, y, e, e)
    assert r.functional == 0 and r.value >= 0


def test_forward_difference_canonical(canonical):
    r = forward_diff_bounds(*canonical, "max_sum")
    assert r.value == pytest.approx(0.25) and r.ratio == pytest.approx(1.0)


@pytest.mark.parametrize("n", range(2, 31))
def test_uniform_forward_difference_coefficients(n):
    got = forward_diff_coefficients(np.full(n, 1.0 / n))
    np.testing.assert_allclose(got, uniform_forward_diff_coefficients(n), rtol=1e-12)


def test_forward_difference_closed_forms_n5():
    c1, c2, c3 = uniform_forward_diff_coefficients(5)
    assert c1 == 2.0
    assert c2 == pytest.approx((5 - 1 / 5) / 6)
    assert c3 == pytest.approx(0.4)


def test_half_norm_canonical(canonical):
    p, x, y = canonical
    line1, line2 = half_norm_bounds(p, x, y, BallEnclosure(np.zeros(1), np.ones(1)))
    assert line1.value == pytest.approx(0.25) and line1.ratio == pytest.approx(1.0)
    assert line2.value == pytest.approx(0.25)


def test_half_norm_constant_y(canonical):
    p, x, _ = canonical
    line1, line2 = half_norm_bounds(p, x, np.ones((2, 1)), BallEnclosure(np.zeros(1), np.ones(1)))
    assert line1.value == 0 and line2.value == 0


@given(instances())
def test_chain_of_half_norm_bounds(inst):
    p, x, y = inst
    ex, ey = enclosure_for(x), enclosure_for(y)
    line1, line2 = half_norm_bounds(p, x, y, ex)
    gruss = gruss_bound(p, x, y, ex, ey)
    assert line1.value <= line2.value * (1 + 1e-9) + 1e-12
    assert line2.value <= gruss.value * (1 + 1e-9) + 1e-12


def test_conjugate_pair_in_holder_row(canonical):
    p = np.full(4, 0.25)
    x = np.array([[0.0], [1.0], [3.0], [3.5]])
    y = np.array([[0.0], [2.0], [2.5], [5.0]])
    r = forward_diff_bounds(p, x, y, "holder", exponent=1.5)
    c2 = forward_diff_coefficients(p)[1]
    dx, dy = np.abs(np.diff(x[:, 0])), np.abs(np.diff(y[:, 0]))
    expected = c2 * (dx**1.5).sum() ** (1 / 1.5) * (dy**3).sum() ** (1 / 3)
    assert r.value == pytest.approx(expected, rel=1e-12) and r.exponent == 1.5


def test_exponent_must_exceed_one(canonical):
    with pytest.raises(ExponentError):
        forward_diff_bounds(*canonical, "holder", exponent=1.0)


# -- signed-weight bounds ----------------------------------------------------

@pytest.mark.parametrize("branch", BRANCHES)
def test_abel_two_point_reduction(branch, rng):
    for _ in range(20):
        p = rng.normal(size=2)
        a, b = rng.normal(size=(2, 3)), rng.normal(size=(2, 3))
        expected = abs(p[0] * p[1]) * np.linalg.norm(a[1] - a[0]) * np.linalg.norm(b[1] - b[0])
        assert abel_bounds(p, a, b, branch).value == pytest.approx(expected, rel=1e-12)


def test_abel_sharp_witness():
    v = np.array([[0.3, -0.4]])
    a = np.vstack([np.zeros((1, 2)), v])
    r = abel_bounds([0.5, 0.5], a, a + 7.0, "holder")
    assert r.ratio == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "bound", [abel_bounds, normalized_bounds, tail_mean_bounds, double_sum_bounds], ids=lambda f: f.__name__
)
@pytest.mark.parametrize("branch", BRANCHES)
def test_constant_b_gives_zero(bound, branch, rng):
    a = rng.normal(size=(5, 2))
    b = np.tile(rng.normal(size=2), (5, 1))
    r = bound(np.full(5, 0.2), a, b, branch)
    assert r.value == 0 and r.ratio is None


@pytest.mark.parametrize("branch", BRANCHES)
def test_normalized_constant_a(branch, rng):
    a = np.tile(rng.normal(size=2), (5, 1))
    r = normalized_bounds(np.full(5, 0.2), a, rng.normal(size=(5, 2)), branch)
    assert r.value == pytest.approx(0, abs=1e-15)


def test_normalized_and_tail_canonical(canonical):
    assert normalized_bounds(*canonical, "max_sum").value == pytest.approx(0.25)
    for branch in BRANCHES:
        assert tail_mean_bounds(*canonical, branch).ratio == pytest.approx(1.0)


def test_double_sum_canonical(canonical):
    r = double_sum_bounds(*canonical, "max_sum")
    assert r.value == pytest.approx(0.25) and r.ratio == pytest.approx(1.0)


@pytest.mark.parametrize("n", [2, 3, 7, 20])
def test_double_sum_uniform_coefficients(n):
    e = np.arange(n, dtype=float)[:, None]
    u = np.full(n, 1.0 / n)
    # unit steps: the three rows reduce to k_inf (n-1)^2, k_q-type, k_1
    assert double_sum_bounds(u, e, e, "max_sum").value == pytest.approx(k_infinity(n) * (n - 1) ** 2, rel=1e-12)
    top = double_sum_bounds(u, e, e, "sum_max")
    assert top.value == pytest.approx(k_one(n), rel=1e-12)
    assert top.ratio == pytest.approx(1.0, rel=1e-12)


def test_literal_tail_mean_is_scaled_by_total():
    t = 0.2
    p = [t / 2, t / 2]
    a = np.array([[0.0], [1.0]])
    default = tail_mean_bounds(p, a, a, "max_sum")
    literal = tail_mean_bounds(p, a, a, "max_sum", literal=True)
    assert default.functional == pytest.approx(t * t / 4)
    assert literal.value == pytest.approx(t * default.value)
    # the printed |P_n| factor would undercut the functional for |P_n| < 1
    assert literal.value < literal.functional
    assert default.value >= default.functional


def test_literal_double_sum_row_one(rng):
    p = rng.normal(size=5)
    a, b = rng.normal(size=(5, 2)), rng.normal(size=(5, 2))
    w = WeightVector(p)
    default = double_sum_bounds(p, a, b, "max_sum")
    literal = double_sum_bounds(p, a, b, "max_sum", literal=True)
    sup = np.abs(kernel_matrix(p)).max()
    factors = default.value / sup
    printed = max(np.abs(w.partial[:-1]).max(), np.abs(w.tail).max())
    assert literal.value == pytest.approx(abs(w.total) * printed * factors, rel=1e-12)


# -- constants -----------------------------------------------------------------

def test_constant_examples():
    assert k_infinity(2) == 0.25 and k_one(2) == 0.25
    assert k_infinity(3) == pytest.approx(2 / 9) and k_one(3) == pytest.approx(2 / 3)
    assert k_one(5) == 2.0
    assert k_infinity(5) == pytest.approx(6 / 25)


@pytest.mark.parametrize("n", range(2, 101))
def test_constant_inequalities(n):
    assert k_one(n) == pytest.approx((n * n - 1) / 12, rel=1e-12)
    assert k_infinity(n) <= 0.25
    assert k_infinity(n) <= 0.5 * (1 - 1 / n)
    assert k_q(n, 2.0) <= 0.25 * (n - 1) * (1 + 1e-12)


@given(st.integers(2, 60), st.floats(1.01, 20))
def test_k_q_bound(n, q):
    assert k_q(n, q) <= 0.25 * (n - 1) ** (2 / q) * (1 + 1e-12)


def test_k_q_rejects_bad_exponent():
    with pytest.raises(ExponentError):
        k_q(4, 1.0)


# -- uniform corollaries -------------------------------------------------------

@pytest.mark.parametrize("branch", BRANCHES)
@given(inst=instances(max_n=12))
def test_corollaries_agree_with_weighted_forms(branch, inst):
    _, a, b = inst
    n = a.shape[0]
    u = np.full(n, 1.0 / n)
    pairs = [
        (uniform_abel_bounds, abel_bounds),
        (uniform_normalized_bounds, normalized_bounds),
        (uniform_tail_mean_bounds, tail_mean_bounds),
    ]
    for corollary, weighted in pairs:
        assert corollary(a, b, branch).value == pytest.approx(weighted(u, a, b, branch).value, rel=1e-10, abs=1e-13)


@given(instances(max_n=12))
def test_kernel_corollaries_agree_with_weighted_forms(inst):
    _, a, b = inst
    n = a.shape[0]
    u = np.full(n, 1.0 / n)
    assert uniform_kernel_bound(a, b, "line1").value == pytest.approx(
        double_sum_bounds(u, a, b, "max_sum").value, rel=1e-10, abs=1e-13
    )
    assert uniform_kernel_holder_bound(a, b, "line1").value == pytest.approx(
        double_sum_bounds(u, a, b, "holder").value, rel=1e-10, abs=1e-13
    )


@given(instances(max_n=12))
def test_kernel_corollary_lines_are_ordered(inst):
    _, a, b = inst
    assert uniform_kernel_bound(a, b, "line1").value <= uniform_kernel_bound(a, b, "line2").value * (1 + 1e-12)
    assert uniform_kernel_holder_bound(a, b, "line1").value <= uniform_kernel_holder_bound(a, b, "line2").value * (
        1 + 1e-12
    )


def test_uniform_only_bounds_refuse_other_weights(canonical):
    _, x, y = canonical
    with pytest.raises(NotUniform):
        evaluate("C3_7", "line1", [0.3, 0.7], x, y)


def test_remark_comparison_n20(rng):
    a, b = rng.normal(size=(20, 3)), rng.normal(size=(20, 3))
    u = np.full(20, 1 / 20)
    assert uniform_kernel_bound(a, b, "line1").value <= forward_diff_bounds(u, a, b, "sum_max").value


# -- comparisons and invariants ----------------------------------------------

def test_canonical_compare_all_ratios(canonical):
    p, x, y = canonical
    e = BallEnclosure(np.zeros(1), np.ones(1))
    reports = compare_all(p, x, y, e, e)
    assert all(r.preconditions_ok for r in reports)
    assert all(r.ratio == pytest.approx(1.0, abs=1e-12) for r in reports)
    assert len(reports) == sum(len(b) for b in THEOREM_BRANCHES.values())


def test_compare_all_flags_missing_enclosure(canonical):
    reports = compare_all(*canonical)
    t11 = [r for r in reports if r.theorem == "T1_1"]
    assert t11[0].diagnostic == "skipped: no enclosure" and not t11[0].preconditions_ok


def test_compare_all_signed_weights(rng):
    p = np.array([1.5, -0.25, 0.75, -1.0])
    x, y = rng.normal(size=(4, 2)), rng.normal(size=(4, 2))
    reports = compare_all(p, x, y)
    for r in reports:
        if r.theorem in SIGNED_OK:
            assert r.preconditions_ok and dominates(r)
        else:
            assert not r.preconditions_ok and r.ratio is None


def test_compare_all_is_sorted(rng):
    p = rng.dirichlet(np.ones(6))
    x, y = rng.normal(size=(6, 2)), rng.normal(size=(6, 2))
    reports = compare_all(p, x, y, enclosure_for(x), enclosure_for(y))
    values = [r.value for r in reports if r.value is not None]
    assert values == sorted(values)
    assert all(r.value is None for r in reports[len(values):])


@given(instances())
def test_dominance_probability(inst):
    p, x, y = inst
    for r in compare_all(p, x, y, enclosure_for(x), enclosure_for(y)):
        if r.preconditions_ok:
            assert dominates(r), r


@given(instances(signed=True, complex_field=True))
def test_dominance_signed_complex(inst):
    p, x, y = inst
    for r in compare_all(p, x, y):
        if r.preconditions_ok:
            assert dominates(r), r


@given(instances(), st.floats(0.01, 100))
def test_scale_equivariance(inst, alpha):
    p, x, y = inst
    base = compare_all(p, x, y, exponent=3.0)
    scaled = compare_all(p, x, alpha * y, exponent=3.0)
    key = lambda r: (r.theorem, r.branch)
    for r0, r1 in zip(sorted(base, key=key), sorted(scaled, key=key)):
        if r0.value is None:
            continue
        assert r1.value == pytest.approx(alpha * r0.value, rel=1e-10, abs=1e-300)
        if r0.ratio is not None and r0.value > 1e-9:
            assert r1.ratio == pytest.approx(r0.ratio, rel=1e-10)


@pytest.mark.parametrize("bound", [abel_bounds, normalized_bounds, tail_mean_bounds, double_sum_bounds])
def test_holder_row_limits(bound, rng):
    # q sits on the weight side and p on Delta b: p -> 1 recovers max*sum, p -> inf sum*max
    p = rng.dirichlet(np.ones(6))
    a, b = rng.normal(size=(6, 2)), rng.normal(size=(6, 2))
    near_one = bound(p, a, b, "holder", exponent=1.001).value
    near_inf = bound(p, a, b, "holder", exponent=1000.0).value
    assert near_one == pytest.approx(bound(p, a, b, "max_sum").value, rel=0.01)
    assert near_inf == pytest.approx(bound(p, a, b, "sum_max").value, rel=0.01)


def test_report_dict_keys(canonical):
    d = forward_diff_bounds(*canonical, "holder").to_dict()
    assert set(d) == {"theorem", "branch", "exponent", "value", "functional", "preconditions_ok", "diagnostic", "ratio"}


def test_ratio_undefined_for_tiny_bound():
    x = np.array([[0.0], [1e-9]])
    r = abel_bounds([0.5, 0.5], x, x, "max_sum")
    assert r.value < 1e-15 and r.ratio is None
    assert math.isclose(r.functional, 0.25e-18, rel_tol=1e-9)
