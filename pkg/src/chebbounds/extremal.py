"""Empirical sharpness probes: n = 2 equality witnesses and randomised search.

Each search draws unconstrained parameter vectors, decodes them into valid
instances (softmax for probability weights, radial clipping into the
enclosure balls), and keeps the largest ratio |T_n| / bound.  The best
sample is then refined by coordinate-wise hill climbing.

Trial ``i`` draws from ``SeedSequence(seed, spawn_key=(i,))``, so results do
not depend on how trials are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import softmax

from .bounds import BRANCHES, THEOREM_BRANCHES, BallEnclosure, evaluate
from .errors import CounterexampleFound, DegeneratePartialSum, NoKnownWitness
from .functional import chebyshev_condition
from .instances import Instance

SOUNDNESS_SLACK = 1e-9
#: samples whose direct functional evaluation is worse conditioned are skipped
MAX_CONDITION = 1e6
HISTORY_STRIDE = 1000

#: bounds with a constructive n = 2 equality case, and the branches it covers
N2_WITNESSES = {
    "T1_1": ("line1",),
    "T1_2": BRANCHES,
    "T1_3": ("line1",),
    "T3_1": BRANCHES,
    "T3_3": BRANCHES,
    "T3_5": BRANCHES,
    "T3_6": ("max_sum",),
    "C3_7": ("line1", "line2"),
}

_PROBABILITY = {"T1_1", "T1_2", "T1_3"}
_UNIFORM = {"C3_2", "C3_4", "C3_7", "C3_9"}


def construct_n2_witness(bound: str, branch: str | None = None, dim: int = 1) -> Instance:
    """Two-point instance with Delta x = Delta y = e_1 and weights (1/2, 1/2).

    Here T_2 = p_1 p_2 <Delta x, Delta y> = 1/4 and the bound also equals 1/4.
    """
    branches = N2_WITNESSES.get(bound)
    if branches is None or (branch is not None and branch not in branches):
        raise NoKnownWitness(f"no constructive n=2 equality case registered for {bound}/{branch}")
    e = np.zeros(dim)
    e[0] = 1.0
    pts = np.array([np.zeros(dim), e])
    enclosure = BallEnclosure(np.zeros(dim), e)
    return Instance(x=pts, y=pts.copy(), weights=np.array([0.5, 0.5]), ex=enclosure, ey=enclosure)


@dataclass(frozen=True)
class SearchConfig:
    bound: str
    branch: str
    n: int = 2
    dim: int = 1
    trials: int = 1000
    seed: int = 0
    scale: float = 0.5
    exponent: float = 2.0
    refine_steps: int = 50
    workers: int = 1

    def __post_init__(self):
        if self.bound not in THEOREM_BRANCHES:
            raise ValueError(f"unknown bound id {self.bound!r}")
        if self.branch not in THEOREM_BRANCHES[self.bound]:
            raise ValueError(f"{self.bound} has no branch {self.branch!r}")
        if self.trials < 1 or self.n < 2 or self.dim < 1 or self.workers < 1:
            raise ValueError("need trials >= 1, n >= 2, dim >= 1, workers >= 1")
        if not self.scale > 0 or not self.exponent > 1:
            raise ValueError("need scale > 0 and exponent > 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SearchResult:
    best_ratio: float
    witness: Instance | None
    history: list = field(default_factory=list)
    best_trial: int | None = None
    sampled_ratio: float = 0.0


# -- parameterisation ------------------------------------------------------

def _layout(cfg: SearchConfig) -> dict[str, tuple[int, int]]:
    """Slices of the flat parameter vector."""
    sizes = {}
    if cfg.bound not in _UNIFORM:
        sizes["p"] = cfg.n
    if cfg.bound in ("T1_1", "T1_3"):
        sizes["ex"] = 2 * cfg.dim
    if cfg.bound == "T1_1":
        sizes["ey"] = 2 * cfg.dim
    sizes["x"] = cfg.n * cfg.dim
    sizes["y"] = cfg.n * cfg.dim
    out, start = {}, 0
    for key, size in sizes.items():
        out[key] = (start, start + size)
        start += size
    return out


def n_parameters(cfg: SearchConfig) -> int:
    return max(stop for _, stop in _layout(cfg).values())


def _enclosed(raw: np.ndarray, enc: BallEnclosure) -> np.ndarray:
    # radial clipping keeps every member inside the midpoint ball
    lengths = np.linalg.norm(raw, axis=1)
    scale = 0.5 * enc.diameter / np.maximum(1.0, lengths)
    return enc.center + raw * scale[:, None]


def decode(theta: np.ndarray, cfg: SearchConfig) -> Instance:
    part = {k: theta[a:b] for k, (a, b) in _layout(cfg).items()}
    shape = (cfg.n, cfg.dim)
    if cfg.bound in _UNIFORM:
        weights = np.full(cfg.n, 1.0 / cfg.n)
    elif cfg.bound in _PROBABILITY:
        weights = softmax(part["p"])
    else:
        weights = part["p"].copy()
    x, y = part["x"].reshape(shape), part["y"].reshape(shape)
    ex = ey = None
    if "ex" in part:
        ex = BallEnclosure(part["ex"][: cfg.dim], part["ex"][cfg.dim :])
        x = _enclosed(x, ex)
    if "ey" in part:
        ey = BallEnclosure(part["ey"][: cfg.dim], part["ey"][cfg.dim :])
        y = _enclosed(y, ey)
    return Instance(x=x, y=y, weights=weights, ex=ex, ey=ey)


def instance_ratio(inst: Instance, cfg: SearchConfig) -> float:
    """|T_n| / bound, or NaN when the instance is degenerate, ill-conditioned or the bound vanishes."""
    if chebyshev_condition(inst.weight_vector(), inst.x, inst.y) > MAX_CONDITION:
        return math.nan
    try:
        report = evaluate(cfg.bound, cfg.branch, inst.weight_vector(), inst.x, inst.y, inst.ex, inst.ey, cfg.exponent)
    except DegeneratePartialSum:
        return math.nan
    ratio = report.ratio
    if ratio is None:
        return math.nan
    if ratio > 1.0 + SOUNDNESS_SLACK:
        raise CounterexampleFound(inst, ratio, cfg.bound, cfg.branch)
    return ratio


def _trial_theta(cfg: SearchConfig, i: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(i,)))
    return rng.standard_normal(n_parameters(cfg))


def _evaluate_range(cfg: SearchConfig, start: int, stop: int) -> np.ndarray:
    return np.array([instance_ratio(decode(_trial_theta(cfg, i), cfg), cfg) for i in range(start, stop)])


def _sample(cfg: SearchConfig) -> np.ndarray:
    if cfg.workers == 1:
        return _evaluate_range(cfg, 0, cfg.trials)
    edges = np.linspace(0, cfg.trials, cfg.workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        parts = pool.map(_evaluate_range, [cfg] * cfg.workers, edges[:-1], edges[1:])
        return np.concatenate(list(parts))


def _refine(theta: np.ndarray, ratio: float, cfg: SearchConfig) -> tuple[np.ndarray, float]:
    """Coordinate sweeps of +/- step; the step halves after a sweep without gain."""
    step = cfg.scale
    for _ in range(cfg.refine_steps):
        improved = False
        for k in range(theta.size):
            for sign in (1.0, -1.0):
                trial = theta.copy()
                trial[k] += sign * step
                r = instance_ratio(decode(trial, cfg), cfg)
                if r > ratio:
                    theta, ratio, improved = trial, r, True
                    break
        if not improved:
            step *= 0.5
    return theta, ratio


def _history(ratios: np.ndarray) -> list:
    running = np.maximum.accumulate(np.where(np.isnan(ratios), -np.inf, ratios))
    marks = list(range(HISTORY_STRIDE - 1, ratios.size, HISTORY_STRIDE))
    if not marks or marks[-1] != ratios.size - 1:
        marks.append(ratios.size - 1)
    return [float(running[m]) if np.isfinite(running[m]) else None for m in marks]


def random_search(cfg: SearchConfig) -> SearchResult:
    """Sample ``cfg.trials`` instances, then hill-climb from the best one.

    Raises CounterexampleFound if any evaluated instance beats the bound.
    """
    ratios = _sample(cfg)
    history = _history(ratios)
    if np.all(np.isnan(ratios)):
        return SearchResult(best_ratio=0.0, witness=None, history=history)
    best = int(np.nanargmax(ratios))
    theta, ratio = _refine(_trial_theta(cfg, best), float(ratios[best]), cfg)
    return SearchResult(
        best_ratio=ratio,
        witness=decode(theta, cfg),
        history=history,
        best_trial=best,
        sampled_ratio=float(ratios[best]),
    )
