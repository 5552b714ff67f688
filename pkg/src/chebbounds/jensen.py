"""Jensen gaps of differentiable convex functions and their reverse bounds.

Real inner product spaces only.  The gradient gap

    sum q_i <grad F(z_i), z_i> - <sum q_i grad F(z_i), sum q_i z_i>

is literally the Čebyšev functional T_n(q; grad F(z), z) and is computed by
:func:`chebbounds.functional.chebyshev`, so every bound on that functional
becomes a reverse Jensen bound.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import logsumexp, softmax

from .bounds import BRANCHES, BoundReport, double_sum_bounds, forward_diff_bounds
from .errors import ComplexFieldUnsupported, DimensionError, NonConvexModel, NotProbability, NotUniform
from .functional import chebyshev
from .vectors import (
    WeightVector,
    as_sequence,
    as_weights,
    conjugate_exponent,
    csum,
    forward_differences,
    fsum,
    holder_sum,
    row_norms,
)

FD_STEP = 1e-5


@dataclass(frozen=True)
class ConvexFunctionModel:
    """A convex F: R^d -> R with its gradient."""

    name: str
    evaluate: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    builtin: bool = False


def norm_squared() -> ConvexFunctionModel:
    return ConvexFunctionModel(
        "norm_squared",
        evaluate=lambda z: fsum(np.asarray(z, dtype=float) ** 2),
        gradient=lambda z: 2.0 * np.asarray(z, dtype=float),
        builtin=True,
    )


def psd_quadratic(Q) -> ConvexFunctionModel:
    """F(z) = <Qz, z> for a symmetric positive-semidefinite Q."""
    Q = np.array(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DimensionError(f"quadratic form needs a square matrix, got shape {Q.shape}")
    scale = max(1.0, float(np.abs(Q).max(initial=0.0)))
    if not np.allclose(Q, Q.T, rtol=0.0, atol=1e-12 * scale):
        raise NonConvexModel("quadratic form matrix is not symmetric")
    if np.linalg.eigvalsh(Q).min() < -1e-12 * scale:
        raise NonConvexModel("quadratic form matrix is not positive semidefinite")
    Q.setflags(write=False)
    return ConvexFunctionModel(
        "psd_quadratic",
        evaluate=lambda z: fsum((Q @ z) * z),
        gradient=lambda z: 2.0 * (Q @ z),
        builtin=True,
    )


def log_sum_exp() -> ConvexFunctionModel:
    return ConvexFunctionModel(
        "log_sum_exp",
        evaluate=lambda z: float(logsumexp(z)),
        gradient=lambda z: softmax(np.asarray(z, dtype=float)),
        builtin=True,
    )


BUILTIN_MODELS = {
    "norm-squared": norm_squared,
    "psd-quadratic": psd_quadratic,
    "log-sum-exp": log_sum_exp,
}


def finite_difference_gradient(f: Callable, z, step: float = FD_STEP) -> np.ndarray:
    """Central differences (f(z + h e_k) - f(z - h e_k)) / 2h."""
    z = np.asarray(z, dtype=float)
    grad = np.empty_like(z)
    for k in range(z.size):
        e = np.zeros_like(z)
        e[k] = step
        grad[k] = (f(z + e) - f(z - e)) / (2 * step)
    return grad


def check_convexity(model: ConvexFunctionModel, dim: int, pairs: int = 50, seed: int = 0) -> None:
    """Spot-check F(x) - F(y) >= <grad F(y), x - y> on random pairs.

    Raises NonConvexModel on the first violation.
    """
    rng = np.random.default_rng(seed)
    for _ in range(pairs):
        x, y = rng.normal(size=dim), rng.normal(size=dim)
        lhs = model.evaluate(x) - model.evaluate(y)
        rhs = fsum(np.asarray(model.gradient(y)) * (x - y))
        if lhs < rhs - 1e-9 * (1.0 + abs(lhs) + abs(rhs)):
            raise NonConvexModel(
                f"{model.name}: gradient inequality fails by {rhs - lhs:.3g} at x={x}, y={y}"
            )


def custom_model(name: str, evaluate: Callable, gradient: Callable) -> ConvexFunctionModel:
    """Wrap a user function; it is convexity spot-checked before each use."""
    return ConvexFunctionModel(name, evaluate, gradient, builtin=False)


def _prepare(q, z, F: ConvexFunctionModel):
    w = as_weights(q)
    z = as_sequence(z, min_length=2)
    if np.iscomplexobj(z):
        raise ComplexFieldUnsupported("Jensen bounds are defined over real spaces only")
    if w.n != z.shape[0]:
        raise DimensionError(f"{w.n} weights for {z.shape[0]} points")
    if not w.is_probability:
        raise NotProbability(f"Jensen weights must be nonnegative and sum to 1 (min {w.p.min()!r}, sum {w.total!r})")
    if not F.builtin:
        check_convexity(F, z.shape[1])
    return w, z


def gradients(F: ConvexFunctionModel, z) -> np.ndarray:
    return np.array([np.asarray(F.gradient(zi), dtype=float) for zi in z])


def jensen_gap(q, z, F: ConvexFunctionModel) -> float:
    """sum q_i F(z_i) - F(sum q_i z_i)."""
    w, z = _prepare(q, z, F)
    values = np.array([F.evaluate(zi) for zi in z])
    return fsum(w.p * values) - F.evaluate(csum(w.p[:, None] * z))


def gradient_gap(q, z, F: ConvexFunctionModel) -> float:
    """T_n(q; grad F(z), z), the upper end of the gradient reverse inequality."""
    w, z = _prepare(q, z, F)
    return chebyshev(w, gradients(F, z), z)


def reverse_jensen_t41(q, z, F: ConvexFunctionModel, branch: str, exponent: float = 2.0) -> BoundReport:
    """Forward-difference reverse Jensen bound (Hölder row: p on grad F, q on z)."""
    w, z = _prepare(q, z, F)
    report = forward_diff_bounds(w, gradients(F, z), z, branch, exponent)
    return dataclasses.replace(report, theorem="T4_1")


def reverse_jensen_t42(
    q, z, F: ConvexFunctionModel, branch: str, exponent: float = 2.0, literal: bool = False
) -> BoundReport:
    """Kernel reverse Jensen bound with weights Q_min Q̄_max."""
    w, z = _prepare(q, z, F)
    report = double_sum_bounds(w, gradients(F, z), z, branch, exponent, literal=literal)
    return dataclasses.replace(report, theorem="T4_2")


def uniform_corollary_coefficients(n: int, theorem: str, exponent: float = 2.0) -> dict[str, float]:
    """Leading constants of the unweighted reverse Jensen corollaries.

    Keys are the branch names of the weighted theorem each row relaxes; for
    ``T4_2`` the kernel constants k_inf and k_q are replaced by their upper
    bounds 1/4 and 1/4 (n-1)^(2/q), and k_1 = (n^2 - 1)/12 is exact.
    """
    q = conjugate_exponent(exponent)
    if theorem == "T4_1":
        return {"max_sum": (n * n - 1) / 12, "holder": (n * n - 1) / (6 * n), "sum_max": (n - 1) / (2 * n)}
    if theorem == "T4_2":
        return {"max_sum": 0.25, "holder": 0.25 * (n - 1) ** (2 / q), "sum_max": (n * n - 1) / 12}
    raise ValueError(f"unknown reverse Jensen theorem {theorem!r}")


def reverse_jensen_uniform(z, F: ConvexFunctionModel, theorem: str, branch: str, exponent: float = 2.0) -> BoundReport:
    """Unweighted corollary bound with the closed-form constants above."""
    z = as_sequence(z, min_length=2)
    n = z.shape[0]
    w, z = _prepare(WeightVector.uniform(n), z, F)
    g = gradients(F, z)
    coef = uniform_corollary_coefficients(n, theorem, exponent)[branch]
    ng, nz = row_norms(forward_differences(g)), row_norms(forward_differences(z))
    if branch == "holder":
        zexp = conjugate_exponent(exponent) if theorem == "T4_1" else exponent
        factor = holder_sum(ng, exponent) * holder_sum(nz, zexp)
    elif (theorem, branch) in (("T4_1", "max_sum"), ("T4_2", "sum_max")):
        factor = ng.max() * nz.max()
    else:
        factor = fsum(ng) * fsum(nz)
    return BoundReport(
        theorem=f"{theorem}_uniform",
        branch=branch,
        value=float(coef * factor),
        functional=abs(chebyshev(w, g, z)),
        exponent=float(exponent) if branch == "holder" else None,
    )


@dataclass(frozen=True)
class JensenReport:
    """Jensen gap, gradient gap and the reverse bounds evaluated on one instance."""

    gap: float
    gradient_gap: float
    bounds: list[BoundReport] = field(default_factory=list)

    def sandwich_ok(self, rel: float = 1e-9) -> bool:
        """0 <= gap <= gradient_gap <= every bound value, with relative slack."""
        def le(a, b):
            return a <= b + rel * (1.0 + abs(a) + abs(b))

        return (
            le(0.0, self.gap)
            and le(self.gap, self.gradient_gap)
            and all(le(self.gradient_gap, r.value) for r in self.bounds)
        )

    def to_dict(self) -> dict:
        return {
            "gap": self.gap,
            "gradient_gap": self.gradient_gap,
            "sandwich_ok": self.sandwich_ok(),
            "bounds": [r.to_dict() for r in self.bounds],
        }


def jensen_report(
    q, z, F: ConvexFunctionModel, branches=BRANCHES, exponent: float = 2.0, uniform: bool = False
) -> JensenReport:
    """Evaluate the gap, gradient gap and both theorems' requested branches.

    With ``uniform=True`` (and uniform q) the corollary bounds are appended.
    """
    if uniform and not as_weights(q).is_uniform():
        raise NotUniform("unweighted corollaries need uniform weights")
    gap = jensen_gap(q, z, F)
    ggap = gradient_gap(q, z, F)
    bounds = []
    for branch in branches:
        bounds.append(reverse_jensen_t41(q, z, F, branch, exponent))
        bounds.append(reverse_jensen_t42(q, z, F, branch, exponent))
        if uniform:
            for theorem in ("T4_1", "T4_2"):
                bounds.append(reverse_jensen_uniform(z, F, theorem, branch, exponent))
    return JensenReport(gap=gap, gradient_gap=ggap, bounds=bounds)
