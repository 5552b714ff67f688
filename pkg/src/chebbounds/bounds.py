"""Upper bounds on |T_n(p; x, y)| and the constants k_inf, k_q, k_1.

Three-row bounds share the branch names ``max_sum``, ``holder`` and
``sum_max`` for their first, second (Hölder, exponent p) and third rows.
Two-line chains use ``line1`` and ``line2``.  Each evaluator returns a
:class:`BoundReport`; evaluators raise on failed preconditions and
:func:`compare_all` turns those failures into flagged reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ChebyshevError,
    DegeneratePartialSum,
    DimensionError,
    EnclosureMissing,
    EnclosureViolated,
    ExponentError,
    NotProbability,
    NotUniform,
)
from .functional import chebyshev, kernel_matrix, partial_sums
from .vectors import (
    EPS_RHO,
    WeightVector,
    as_sequence,
    as_vector,
    ccumsum,
    conjugate_exponent,
    csum,
    forward_differences,
    fsum,
    holder_sum,
    norm,
    row_norms,
    weighted_pair,
)

THEOREMS = ("T1_1", "T1_2", "T1_3", "T3_1", "T3_3", "T3_5", "T3_6", "C3_2", "C3_4", "C3_7", "C3_9")
BRANCHES = ("max_sum", "holder", "sum_max")
LINES = ("line1", "line2")

#: branches evaluated for each theorem id
THEOREM_BRANCHES = {
    "T1_1": ("line1",),
    "T1_2": BRANCHES,
    "T1_3": LINES,
    "T3_1": BRANCHES,
    "T3_3": BRANCHES,
    "T3_5": BRANCHES,
    "T3_6": BRANCHES,
    "C3_2": BRANCHES,
    "C3_4": BRANCHES,
    "C3_7": LINES,
    "C3_9": LINES,
}

PROBABILITY_ONLY = frozenset({"T1_1", "T1_2", "T1_3"})
UNIFORM_ONLY = frozenset({"C3_2", "C3_4", "C3_7", "C3_9"})

RATIO_FLOOR = 1e-15


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound against the functional it controls."""

    theorem: str
    branch: str
    value: float | None
    functional: float
    preconditions_ok: bool = True
    diagnostic: str = ""
    exponent: float | None = None

    @property
    def ratio(self) -> float | None:
        """|T_n| / value, or None when undefined (failed preconditions or value ~ 0)."""
        if not self.preconditions_ok or self.value is None or self.value <= RATIO_FLOOR:
            return None
        return self.functional / self.value

    def dominates(self, rel: float = 1e-9) -> bool:
        if not self.preconditions_ok:
            return True
        return self.value >= self.functional - rel * (1.0 + self.functional)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "branch": self.branch,
            "exponent": self.exponent,
            "value": self.value,
            "functional": self.functional,
            "preconditions_ok": self.preconditions_ok,
            "diagnostic": self.diagnostic,
            "ratio": self.ratio,
        }


def _check_branch(branch: str, allowed=BRANCHES) -> None:
    if branch not in allowed:
        raise ValueError(f"unknown branch {branch!r}; expected one of {allowed}")


def _exponents(branch: str, exponent: float):
    """(left, right) Hölder exponents of a row: the left factor takes q."""
    _check_branch(branch)
    if branch == "max_sum":
        return "max", "sum"
    if branch == "sum_max":
        return "sum", "max"
    return conjugate_exponent(exponent), float(exponent)


def _report(theorem, branch, value, T, exponent=None) -> BoundReport:
    return BoundReport(
        theorem=theorem,
        branch=branch,
        value=float(value),
        functional=float(abs(T)),
        exponent=None if exponent is None else float(exponent),
    )


def _holder_only(branch, exponent):
    return exponent if branch == "holder" else None


def _require_probability(w: WeightVector) -> None:
    if not w.is_probability:
        raise NotProbability(f"weights must be nonnegative and sum to 1 (sum = {w.total!r})")


# -- enclosures ------------------------------------------------------------

@dataclass(frozen=True)
class BallEnclosure:
    """Bounding vectors (low, high); members must lie in the ball about their midpoint."""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low, high = as_vector(self.low), as_vector(self.high)
        if low.shape != high.shape:
            raise DimensionError("enclosure endpoints differ in dimension")
        if np.iscomplexobj(low) or np.iscomplexobj(high):
            low, high = low.astype(np.complex128), high.astype(np.complex128)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.low + self.high)

    @property
    def diameter(self) -> float:
        return norm(self.high - self.low)


class EnclosureCheck(NamedTuple):
    ok: bool
    worst_index: int | None
    excess: float


def check_enclosure(seq, e: BallEnclosure, slack: float = 1e-12) -> EnclosureCheck:
    """Midpoint-ball test ||v_i - (low+high)/2|| <= ||high - low|| / 2 for every member.

    ``worst_index`` is the 1-based index of the largest violation (None when ok).
    """
    seq = as_sequence(seq)
    if seq.shape[1] != e.low.size:
        raise DimensionError(f"sequence dimension {seq.shape[1]} vs enclosure {e.low.size}")
    radius = 0.5 * e.diameter
    excess = row_norms(seq - e.center) - radius
    worst = int(np.argmax(excess))
    limit = slack * max(1.0, radius)
    if excess[worst] <= limit:
        return EnclosureCheck(True, None, float(excess[worst]))
    return EnclosureCheck(False, worst + 1, float(excess[worst]))


def _require_enclosure(seq, e: BallEnclosure) -> None:
    check = check_enclosure(seq, e)
    if not check.ok:
        raise EnclosureViolated(check.worst_index, check.excess)


# -- probability-weight bounds --------------------------------------------

def gruss_bound(p, x, y, ex: BallEnclosure, ey: BallEnclosure) -> BoundReport:
    """|T_n| <= 1/4 ||X - x|| ||Y - y|| for probability p and enclosed x, y."""
    w, x, y = weighted_pair(p, x, y)
    _require_probability(w)
    _require_enclosure(x, ex)
    _require_enclosure(y, ey)
    value = 0.25 * ex.diameter * ey.diameter
    return _report("T1_1", "line1", value, chebyshev(w, x, y))


def forward_diff_coefficients(p) -> tuple[float, float, float]:
    """Weight factors of the three forward-difference rows for probability p.

    Returns (sum i^2 p_i - (sum i p_i)^2, sum_{j<i} p_i p_j (i - j),
    1/2 sum p_i (1 - p_i)).
    """
    w = p if isinstance(p, WeightVector) else WeightVector(np.asarray(p, dtype=float))
    idx = np.arange(1, w.n + 1, dtype=float)
    mean = fsum(idx * w.p)
    c1 = fsum(w.p * (idx - mean) ** 2)
    gaps = np.subtract.outer(idx, idx)
    c2 = fsum(np.triu(np.outer(w.p, w.p) * -gaps, 1).ravel())
    c3 = 0.5 * fsum(w.p * (1.0 - w.p))
    return c1, c2, c3


def uniform_forward_diff_coefficients(n: int) -> tuple[float, float, float]:
    """Closed forms of :func:`forward_diff_coefficients` at uniform weights."""
    return (n * n - 1) / 12.0, (n - 1.0 / n) / 6.0, 0.5 * (1.0 - 1.0 / n)


def forward_diff_bounds(p, x, y, branch: str, exponent: float = 2.0) -> BoundReport:
    """Forward-difference bound; the Hölder row pairs Delta x with p and Delta y with q."""
    _check_branch(branch)
    w, x, y = weighted_pair(p, x, y)
    _require_probability(w)
    nx, ny = row_norms(forward_differences(x)), row_norms(forward_differences(y))
    c1, c2, c3 = forward_diff_coefficients(w)
    if branch == "max_sum":
        value = c1 * nx.max() * ny.max()
    elif branch == "holder":
        q = conjugate_exponent(exponent)
        value = c2 * holder_sum(nx, exponent) * holder_sum(ny, q)
    else:
        value = c3 * holder_sum(nx, "sum") * holder_sum(ny, "sum")
    return _report("T1_2", branch, value, chebyshev(w, x, y), _holder_only(branch, exponent))


def half_norm_bounds(p, x, y, ex: BallEnclosure) -> tuple[BoundReport, BoundReport]:
    """Two-line chain 1/2 ||X-x|| sum p_i ||y_i - ybar|| <= 1/2 ||X-x|| (variance)^(1/2)."""
    w, x, y = weighted_pair(p, x, y)
    _require_probability(w)
    _require_enclosure(x, ex)
    T = chebyshev(w, x, y)
    ybar = csum(w.p[:, None] * y)
    dev = row_norms(y - ybar)
    line1 = 0.5 * ex.diameter * fsum(w.p * dev)
    # sum p_i ||y_i||^2 - ||ybar||^2 in its centred form (same value for probability p)
    line2 = 0.5 * ex.diameter * math.sqrt(fsum(w.p * dev**2))
    return _report("T1_3", "line1", line1, T), _report("T1_3", "line2", line2, T)


# -- real-weight bounds ----------------------------------------------------

def abel_vector_norms(w: WeightVector, a: np.ndarray) -> np.ndarray:
    """||P_i A_n(p) - P_n A_i(p)|| for i = 1..n-1."""
    sums = partial_sums(w, a)
    return row_norms(w.partial[:-1, None] * sums.A[-1] - w.total * sums.A[:-1])


def abel_bounds(p, a, b, branch: str, exponent: float = 2.0) -> BoundReport:
    """Bounds from the first identity: any real weights."""
    left, right = _exponents(branch, exponent)
    w, a, b = weighted_pair(p, a, b)
    ka = abel_vector_norms(w, a)
    nb = row_norms(forward_differences(b))
    value = holder_sum(ka, left) * holder_sum(nb, right)
    return _report("T3_1", branch, value, chebyshev(w, a, b), _holder_only(branch, exponent))


def _require_nondegenerate(values, which: str) -> None:
    for i, v in enumerate(values):
        if abs(v) <= EPS_RHO:
            raise DegeneratePartialSum(i + 1, which, v)


def normalized_bounds(p, a, b, branch: str, exponent: float = 2.0) -> BoundReport:
    """Bounds from the normalised identity, weighted Hölder with weights |P_i|."""
    left, right = _exponents(branch, exponent)
    w, a, b = weighted_pair(p, a, b)
    _require_nondegenerate(w.partial, "P")
    sums = partial_sums(w, a)
    P = w.partial[:-1]
    means = row_norms(sums.A[-1] / w.total - sums.A[:-1] / P[:, None])
    nb = row_norms(forward_differences(b))
    weight = np.abs(P)
    value = abs(w.total) * holder_sum(means, left, weight) * holder_sum(nb, right, weight)
    return _report("T3_3", branch, value, chebyshev(w, a, b), _holder_only(branch, exponent))


def tail_mean_bounds(p, a, b, branch: str, exponent: float = 2.0, literal: bool = False) -> BoundReport:
    """Bounds from the tail-mean identity, weighted Hölder with weights |P_i||P̄_i|.

    The identity carries no P_n factor, so none is applied by default;
    ``literal=True`` multiplies by |P_n| as printed, which is only safe for
    |P_n| >= 1.
    """
    left, right = _exponents(branch, exponent)
    w, a, b = weighted_pair(p, a, b)
    _require_nondegenerate(w.partial[:-1], "P")
    _require_nondegenerate(w.tail, "Pbar")
    sums = partial_sums(w, a)
    P, Pbar = w.partial[:-1], w.tail
    means = row_norms(sums.Abar / Pbar[:, None] - sums.A[:-1] / P[:, None])
    nb = row_norms(forward_differences(b))
    weight = np.abs(P * Pbar)
    value = holder_sum(means, left, weight) * holder_sum(nb, right, weight)
    if literal:
        value *= abs(w.total)
    return _report("T3_5", branch, value, chebyshev(w, a, b), _holder_only(branch, exponent))


def double_sum_bounds(p, a, b, branch: str, exponent: float = 2.0, literal: bool = False) -> BoundReport:
    """Bounds from the double-sum representation with kernel P_min P̄_max.

    The first row uses the kernel sup-norm max |P_min P̄_max|.  With
    ``literal=True`` it uses |P_n| max{|P_min|, |P̄_max|} and the other rows
    pick up the printed |P_n| factor.
    """
    _check_branch(branch)
    w, a, b = weighted_pair(p, a, b)
    K = np.abs(kernel_matrix(w))
    na = row_norms(forward_differences(a))
    nb = row_norms(forward_differences(b))
    if branch == "max_sum":
        if literal:
            idx = np.arange(w.n - 1)
            lo, hi = np.minimum.outer(idx, idx), np.maximum.outer(idx, idx)
            coef = float(np.maximum(np.abs(w.partial[lo]), np.abs(w.tail[hi])).max())
        else:
            coef = float(K.max())
        value = coef * holder_sum(na, "sum") * holder_sum(nb, "sum")
    elif branch == "holder":
        q = conjugate_exponent(exponent)
        value = holder_sum(K.ravel(), q) * holder_sum(na, exponent) * holder_sum(nb, exponent)
    else:
        value = fsum(K.ravel()) * na.max() * nb.max()
    if literal:
        value *= abs(w.total)
    return _report("T3_6", branch, value, chebyshev(w, a, b), _holder_only(branch, exponent))


# -- constants -------------------------------------------------------------

def _kernel_ints(n: int) -> np.ndarray:
    """Integer matrix min(i,j) * (n - max(i,j)) for 1 <= i, j <= n-1."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    idx = np.arange(1, n, dtype=np.int64)
    return np.minimum.outer(idx, idx) * (n - np.maximum.outer(idx, idx))


def k_infinity(n: int) -> float:
    return int(_kernel_ints(n).max()) / (n * n)


def k_q(n: int, q: float) -> float:
    if not q > 1:
        raise ExponentError(f"k_q needs q > 1, got {q}")
    return holder_sum(_kernel_ints(n).ravel().astype(float), q) / (n * n)


def k_one(n: int) -> float:
    # exact integer double sum
    return int(_kernel_ints(n).sum()) / (n * n)


# -- uniform-weight corollaries --------------------------------------------

def _uniform_pair(a, b):
    n = as_sequence(a).shape[0]
    _, a, b = weighted_pair(WeightVector.uniform(n), a, b)
    return n, a, b


def uniform_abel_bounds(a, b, branch: str, exponent: float = 2.0) -> BoundReport:
    """(1/n^2) x rows on ||i sum_k a_k - n sum_{k<=i} a_k|| and ||Delta b_j||."""
    left, right = _exponents(branch, exponent)
    n, a, b = _uniform_pair(a, b)
    prefix = ccumsum(a)[:-1]
    i = np.arange(1, n, dtype=float)[:, None]
    ka = row_norms(i * csum(a) - n * prefix)
    nb = row_norms(forward_differences(b))
    value = holder_sum(ka, left) * holder_sum(nb, right) / (n * n)
    return _report("C3_2", branch, value, chebyshev(WeightVector.uniform(n), a, b), _holder_only(branch, exponent))


def uniform_normalized_bounds(a, b, branch: str, exponent: float = 2.0) -> BoundReport:
    """(1/n) x weighted rows with weights i on ||mean(a) - mean(a_1..a_i)||."""
    left, right = _exponents(branch, exponent)
    n, a, b = _uniform_pair(a, b)
    i = np.arange(1, n, dtype=float)
    heads = ccumsum(a)[:-1] / i[:, None]
    means = row_norms(csum(a) / n - heads)
    nb = row_norms(forward_differences(b))
    value = holder_sum(means, left, i) * holder_sum(nb, right, i) / n
    return _report("C3_4", branch, value, chebyshev(WeightVector.uniform(n), a, b), _holder_only(branch, exponent))


def uniform_tail_mean_bounds(a, b, branch: str, exponent: float = 2.0) -> BoundReport:
    """(1/n^2) x weighted rows with weights i(n-i) on tail mean minus head mean."""
    left, right = _exponents(branch, exponent)
    n, a, b = _uniform_pair(a, b)
    i = np.arange(1, n, dtype=float)
    cum = ccumsum(a)
    heads = cum[:-1] / i[:, None]
    tails = (cum[-1] - cum[:-1]) / (n - i)[:, None]
    means = row_norms(tails - heads)
    nb = row_norms(forward_differences(b))
    weight = i * (n - i)
    value = holder_sum(means, left, weight) * holder_sum(nb, right, weight) / (n * n)
    return _report("T3_5", branch, value, chebyshev(WeightVector.uniform(n), a, b), _holder_only(branch, exponent))


def uniform_kernel_bound(a, b, line: str) -> BoundReport:
    """k_inf sum||Delta a|| sum||Delta b||, relaxed to 1/4 in the second line."""
    _check_branch(line, LINES)
    n, a, b = _uniform_pair(a, b)
    coef = k_infinity(n) if line == "line1" else 0.25
    na, nb = row_norms(forward_differences(a)), row_norms(forward_differences(b))
    value = coef * fsum(na) * fsum(nb)
    return _report("C3_7", line, value, chebyshev(WeightVector.uniform(n), a, b))


def uniform_kernel_holder_bound(a, b, line: str, exponent: float = 2.0) -> BoundReport:
    """k_q (sum||Delta a||^p)^(1/p) (sum||Delta b||^p)^(1/p), relaxed to 1/4 (n-1)^(2/q)."""
    _check_branch(line, LINES)
    n, a, b = _uniform_pair(a, b)
    q = conjugate_exponent(exponent)
    coef = k_q(n, q) if line == "line1" else 0.25 * (n - 1) ** (2.0 / q)
    na, nb = row_norms(forward_differences(a)), row_norms(forward_differences(b))
    value = coef * holder_sum(na, exponent) * holder_sum(nb, exponent)
    return _report("C3_9", line, value, chebyshev(WeightVector.uniform(n), a, b), exponent)


# -- everything at once ----------------------------------------------------

def evaluate(theorem: str, branch: str, p, x, y, ex=None, ey=None, exponent: float = 2.0) -> BoundReport:
    """Evaluate one (theorem, branch); raises on failed preconditions."""
    if theorem not in THEOREM_BRANCHES:
        raise ValueError(f"unknown theorem id {theorem!r}")
    _check_branch(branch, THEOREM_BRANCHES[theorem])
    if theorem in UNIFORM_ONLY:
        w = p if isinstance(p, WeightVector) else WeightVector(np.asarray(p, dtype=float))
        if not w.is_uniform():
            raise NotUniform(f"{theorem} is stated for uniform weights only")
    if theorem in ("T1_1", "T1_3") and ex is None:
        raise EnclosureMissing(f"{theorem} needs an enclosure of x")
    if theorem == "T1_1":
        if ey is None:
            raise EnclosureMissing("T1_1 needs an enclosure of y")
        return gruss_bound(p, x, y, ex, ey)
    if theorem == "T1_2":
        return forward_diff_bounds(p, x, y, branch, exponent)
    if theorem == "T1_3":
        return half_norm_bounds(p, x, y, ex)[LINES.index(branch)]
    if theorem == "T3_1":
        return abel_bounds(p, x, y, branch, exponent)
    if theorem == "T3_3":
        return normalized_bounds(p, x, y, branch, exponent)
    if theorem == "T3_5":
        return tail_mean_bounds(p, x, y, branch, exponent)
    if theorem == "T3_6":
        return double_sum_bounds(p, x, y, branch, exponent)
    if theorem == "C3_2":
        return uniform_abel_bounds(x, y, branch, exponent)
    if theorem == "C3_4":
        return uniform_normalized_bounds(x, y, branch, exponent)
    if theorem == "C3_7":
        return uniform_kernel_bound(x, y, branch)
    return uniform_kernel_holder_bound(x, y, branch, exponent)


def _skip_reason(exc: ChebyshevError) -> str:
    if isinstance(exc, EnclosureMissing):
        return "skipped: no enclosure"
    if isinstance(exc, NotUniform):
        return "skipped: uniform weights required"
    return f"skipped: {type(exc).__name__}: {exc}"


def compare_all(p, x, y, ex=None, ey=None, exponent: float = 2.0, theorems=None) -> list[BoundReport]:
    """Evaluate every applicable bound, flagging (not raising) failed preconditions.

    Reports are sorted by ascending value, ties broken by theorem id and
    branch; flagged reports come last.
    """
    if exponent is not None and not exponent > 1:
        raise ExponentError(f"Hölder exponent must exceed 1, got {exponent}")
    w, x, y = weighted_pair(p, x, y)
    T = abs(chebyshev(w, x, y))
    theorems = THEOREMS if theorems is None else tuple(theorems)
    reports = []
    for theorem in theorems:
        for branch in THEOREM_BRANCHES[theorem]:
            try:
                reports.append(evaluate(theorem, branch, w, x, y, ex, ey, exponent))
            except (NotProbability, EnclosureMissing, EnclosureViolated, DegeneratePartialSum) as exc:
                reports.append(
                    BoundReport(
                        theorem=theorem,
                        branch=branch,
                        value=None,
                        functional=T,
                        preconditions_ok=False,
                        diagnostic=_skip_reason(exc),
                        exponent=float(exponent) if branch == "holder" else None,
                    )
                )

    def key(r: BoundReport):
        order = (THEOREMS.index(r.theorem), THEOREM_BRANCHES[r.theorem].index(r.branch))
        return (r.value is None, r.value if r.value is not None else 0.0, order)

    return sorted(reports, key=key)
