"""Output-sensitive subset sums through prefix-restricted sumsets.

Elements above a threshold ("heavy") are few in any feasible subset and
are handled by color coding: in every round each heavy element gets one of
``B`` random colors and the color classes are folded together with
prefix-restricted sumsets.  Light elements are split at random into two
halves, each solved recursively for a target slightly above ``u/2``, and
the pieces are recombined.

Every step only ever combines true partial subset sums, so the output is
always a subset of ``S(X, t)``; randomness only affects completeness.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .core import SparseSet, brute_subset_sums
from .engine import DEFAULT_CONFIG, EngineConfig
from .prefix import solve_prefix
from .relaxed import solve_prefix_relaxed

PROFILES = ("practical", "paper_faithful")

PrefixSolver = Callable[[np.ndarray, np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class SSParams:
    beta: int = 2
    profile: str = "practical"
    fail_prob: float = 0.05
    rng_seed: int = 0
    zeta: float | None = None
    base_cutoff: int = 8
    repeat_constant: int = 3

    def __post_init__(self):
        if self.beta < 1:
            raise ValueError("beta must be >= 1")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; expected one of {PROFILES}")
        if not 0 < self.fail_prob < 1:
            raise ValueError("fail_prob must lie in (0, 1)")
        if self.zeta is not None and not 0 < self.zeta <= 1:
            raise ValueError("zeta must lie in (0, 1]")
        if self.base_cutoff < 1:
            raise ValueError("base_cutoff must be >= 1")


def log_t(t: int) -> int:
    """``ceil(log2 t)``, at least 4 so that ``eps = 1/L <= 1/4``."""
    return max(4, (max(t, 1) - 1).bit_length())


@dataclass(frozen=True)
class Schedule:
    """Derived constants for one ``(u, t)`` pair."""

    L: int
    threshold: Fraction  # heavy iff x > threshold
    colors: int
    eps: Fraction

    def child_target(self, u: int) -> int:
        return math.floor((1 + self.eps) * u / 2)


def schedule(u: int, t: int, params: SSParams) -> Schedule:
    L = log_t(t)
    b = params.beta
    if params.profile == "paper_faithful":
        threshold = Fraction(u, b * L**3)
        colors = 2 * b * b * L**6
    else:
        threshold = Fraction(u, b * L)
        kappa = math.ceil(u / threshold) if threshold > 0 else 1
        colors = 2 * kappa * kappa
    return Schedule(L, threshold, colors, Fraction(1, L))


def repeats(t: int, fail_prob: float, c: int = 3) -> int:
    return math.ceil(c * math.log2(max(t, 2) / fail_prob))


@dataclass
class RunStats:
    max_depth: int = 0
    nodes: int = 0
    heavy_rounds: int = 0
    prefix_calls: int = 0


def _fold(prefix: PrefixSolver, a: np.ndarray, b: np.ndarray, u: int, stats: RunStats) -> np.ndarray:
    stats.prefix_calls += 1
    return prefix(a, b, u)


def _large(X: np.ndarray, u: int, t: int, params: SSParams, fail_prob: float, rng: np.random.Generator, prefix: PrefixSolver, stats: RunStats) -> np.ndarray:
    sch = schedule(u, t, params)
    zero = np.zeros(1, dtype=np.int64)
    out = zero
    if X.size == 0:
        return out
    for _ in range(repeats(t, fail_prob, params.repeat_constant)):
        stats.heavy_rounds += 1
        colors = rng.integers(0, sch.colors, size=X.size)
        order = np.argsort(colors, kind="stable")
        cuts = np.flatnonzero(np.diff(colors[order])) + 1
        O = zero
        for cls in np.split(X[order], cuts):
            O = _fold(prefix, O, np.concatenate((zero, np.sort(cls))), u, stats)
        out = np.union1d(out, O)
        if len(cuts) + 1 == X.size:
            # all elements got distinct colors: this round already produced
            # every subset sum, and later rounds can only repeat it
            break
    return out


def subset_sums_large(X, u: int, t: int, params: SSParams = SSParams(), cfg: EngineConfig = DEFAULT_CONFIG) -> SparseSet:
    """Subset sums up to ``u`` of a set of heavy elements, by color coding.

    Always a subset of ``S(X, u)``; equal to it with probability at least
    ``1 - params.fail_prob``.
    """
    x = np.asarray(X, dtype=np.int64)
    sch = schedule(u, t, params)
    if x.size and (x.min() <= sch.threshold or x.max() > u):
        raise ValueError(f"elements must lie in ({float(sch.threshold):.3f}, {u}]")
    if u > t:
        raise ValueError("u must not exceed t")
    rng = np.random.default_rng(params.rng_seed)
    prefix = _prefix_solver(params, cfg)
    return SparseSet(_large(x, u, t, params, params.fail_prob, rng, prefix, RunStats()).tolist())


def _prefix_solver(params: SSParams, cfg: EngineConfig) -> PrefixSolver:
    if params.zeta is None:
        return lambda a, b, u: np.asarray(solve_prefix(a, b, u, cfg), dtype=np.int64)
    zeta = params.zeta
    return lambda a, b, u: np.asarray(solve_prefix_relaxed(a, b, u, zeta, cfg), dtype=np.int64)


def _reduce(X: np.ndarray, u: int, t: int, params: SSParams, rng: np.random.Generator, prefix: PrefixSolver, stats: RunStats, depth: int) -> np.ndarray:
    stats.nodes += 1
    stats.max_depth = max(stats.max_depth, depth)
    X = X[X <= u]
    if X.size <= params.base_cutoff:
        return np.asarray(brute_subset_sums(X.tolist(), u), dtype=np.int64)
    sch = schedule(u, t, params)
    heavy = X[X > sch.threshold] if sch.threshold.denominator == 1 else X[X * sch.threshold.denominator > sch.threshold.numerator]
    light = np.setdiff1d(X, heavy, assume_unique=True)
    O = _large(heavy, u, t, params, 1 / max(u, 2), rng, prefix, stats)
    if light.size == 0:
        return O
    if light.size <= params.base_cutoff:
        rest = np.asarray(brute_subset_sums(light.tolist(), u), dtype=np.int64)
    else:
        side = rng.integers(0, 2, size=light.size).astype(bool)
        child = sch.child_target(u)
        O1 = _reduce(light[side], child, t, params, rng, prefix, stats, depth + 1)
        O2 = _reduce(light[~side], child, t, params, rng, prefix, stats, depth + 1)
        rest = _fold(prefix, O1, O2, u, stats)
    if O.size == 1:
        return rest
    return _fold(prefix, O, rest, u, stats)


def max_depth_bound(t: int) -> int:
    return log_t(t) + 4


def subset_sums(X, t: int, params: SSParams = SSParams(), cfg: EngineConfig = DEFAULT_CONFIG, stats: RunStats | None = None) -> SparseSet:
    """``S(X, t)`` with high probability, and never anything outside it."""
    x = np.unique(np.asarray(list(X), dtype=np.int64))
    if x.size and x[0] <= 0:
        raise ValueError("subset-sum items must be positive")
    if t < 0:
        return SparseSet()
    stats = stats if stats is not None else RunStats()
    rng = np.random.default_rng(params.rng_seed)
    out = _reduce(x, t, t, params, rng, _prefix_solver(params, cfg), stats, 0)
    if stats.max_depth > max_depth_bound(t):
        raise AssertionError(f"recursion depth {stats.max_depth} exceeds {max_depth_bound(t)}")
    return SparseSet(out.tolist())


def subset_sums_relaxed(X, t: int, zeta: float, params: SSParams = SSParams(), cfg: EngineConfig = DEFAULT_CONFIG, stats: RunStats | None = None) -> SparseSet:
    """As :func:`subset_sums`, with every sumset step done by the relaxed covering."""
    p = SSParams(params.beta, params.profile, params.fail_prob, params.rng_seed, zeta, params.base_cutoff, params.repeat_constant)
    return subset_sums(X, t, p, cfg, stats)


# --------------------------------------------------------------------------
# empirical check of the splitting behaviour


@dataclass
class SplitReport:
    eps: float
    mu: float
    bound: float
    max_ratio: float
    partitions: int
    exhaustive: bool
    survival_rate: float
    witnesses: int
    ratios: list[float] = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.max_ratio <= self.bound


def split_ratio(Z1, Z2, u: int, eps: Fraction) -> float:
    """``(|S(Z1, c)| + |S(Z2, c)|) / (|S(Z, u)| + 1)`` with ``c = floor((1+eps) u/2)``."""
    c = math.floor((1 + eps) * u / 2)
    num = len(brute_subset_sums(Z1, c)) + len(brute_subset_sums(Z2, c))
    return num / (len(brute_subset_sums(sorted(set(Z1) | set(Z2)), u)) + 1)


def split_survival_check(X_light, u: int, t: int, trials: int = 100, eps: float | Fraction | None = None, seed: int = 0) -> SplitReport:
    """Measure how random halving treats subset sums of small elements.

    * survival: for random witnesses ``I`` with ``sum(I) <= u``, how often
      both halves of a random split stay below ``floor((1+eps) u/2)``;
    * ratio: the subset-sum count ratio of a partition against the bound
      ``1 / (1 - 2 eps - 4 mu)``, over all partitions when there are at most
      ``trials`` of them and over random ones otherwise.
    """
    Z = sorted(set(int(x) for x in X_light))
    if not Z or Z[0] <= 0:
        raise ValueError("X_light must be a non-empty set of positive integers")
    mu = Fraction(Z[-1], u)
    if mu > Fraction(1, 16):
        raise ValueError(f"max element / u = {float(mu):.4f} exceeds 1/16")
    e = Fraction(1, log_t(t)) if eps is None else Fraction(eps).limit_denominator(10**6)
    if not 0 <= e <= Fraction(1, 4):
        raise ValueError("eps must lie in [0, 1/4]")
    bound = 1 / (1 - 2 * e - 4 * mu)
    rng = np.random.default_rng(seed)
    z = np.asarray(Z, dtype=np.int64)

    ratios = []
    exhaustive = 2 ** len(Z) <= trials
    masks = itertools.product((False, True), repeat=len(Z)) if exhaustive else (rng.integers(0, 2, len(Z)).astype(bool) for _ in range(trials))
    for mask in masks:
        mask = np.asarray(mask, dtype=bool)
        ratios.append(split_ratio(z[mask].tolist(), z[~mask].tolist(), u, e))

    c = math.floor((1 + e) * u / 2)
    kept = 0
    for _ in range(trials):
        perm = rng.permutation(z)
        witness = perm[: int(np.searchsorted(np.cumsum(perm), u, side="right"))]
        side = rng.integers(0, 2, witness.size).astype(bool)
        kept += int(witness[side].sum()) <= c and int(witness[~side].sum()) <= c
    return SplitReport(
        eps=float(e),
        mu=float(mu),
        bound=float(bound),
        max_ratio=max(ratios),
        partitions=len(ratios),
        exhaustive=exhaustive,
        survival_rate=kept / trials if trials else 1.0,
        witnesses=trials,
        ratios=ratios,
    )
