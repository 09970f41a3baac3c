"""Top-k convolution and top-k sumset via prefix-restricted probes.

The smallest threshold ``u`` whose prefix product holds at least ``k``
non-zeros is found by galloping binary search.  Each probe runs under a work budget
of ``c * k^(4/3) * log2(2d + 2)^e`` units; a probe that runs out is treated
as "``u`` too large".  When the search ends on an aborted probe the budget
is doubled and the search restarts, so aborts never affect correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import SparseSet, SparseVec
from .engine import DEFAULT_CONFIG, BudgetExceeded, EngineConfig, WorkMeter
from .prefix import convolve_prefix, solve_prefix


SLACK = 2


@dataclass(frozen=True)
class TopKParams:
    budget_constant: float = 64.0
    budget_log_exp: int = 3


@dataclass
class SearchStats:
    probes: int = 0
    aborted: int = 0
    restarts: int = 0


def probe_budget(k: int, top: int, params: TopKParams) -> float:
    return params.budget_constant * k ** (4 / 3) * math.log2(top + 2) ** params.budget_log_exp


class _Prober:
    """Budgeted probes with memoized completed results.

    Probes are deterministic, so a completed result can be reused by any
    later search on the same inputs; aborts are only reused under a budget
    that is not larger than the one that aborted.
    """

    def __init__(self, probe: Callable[[int, WorkMeter], Sequence], stats: SearchStats | None):
        self.probe = probe
        self.stats = stats if stats is not None else SearchStats()
        self.done: dict[int, Sequence] = {}
        self.aborted_at: dict[int, float] = {}

    def run(self, u: int, limit: float):
        if u in self.done:
            return self.done[u]
        if self.aborted_at.get(u, -1.0) >= limit:
            return None
        self.stats.probes += 1
        try:
            res = self.probe(u, WorkMeter(limit))
        except BudgetExceeded:
            self.stats.aborted += 1
            self.aborted_at[u] = limit
            return None
        self.done[u] = res
        return res


def _search(prober: _Prober, k: int, top: int, params: TopKParams, lo: int = -1, step0: int = 1) -> tuple[list, int]:
    """Returns the top-k entries and the threshold they were read from.

    ``lo`` must be a threshold known to hold fewer than ``k`` non-zeros;
    ``step0`` is the first galloping step.  Galloping upward from ``lo`` brackets the smallest large threshold
    within a factor of two before bisecting, so probes stay close to it.
    Bisection stops early once a completed probe holds at most ``SLACK*k``
    non-zeros.
    """
    limit = probe_budget(k, top, params)
    while True:
        a, step = lo, max(1, step0)  # a is small
        while True:
            b = min(a + step, top)
            best = prober.run(b, limit)
            if best is None or len(best) >= k:
                break
            if b == top:
                return list(best), top
            a, step = b, 2 * step
        # any completed large probe is exact; bisect only to keep it O(k)
        while b - a > 1 and (best is None or len(best) > SLACK * k):
            mid = (a + b) // 2
            res = prober.run(mid, limit)
            if res is None or len(res) >= k:
                b, best = mid, res
            else:
                a = mid
        if best is not None:
            return list(best[:k]), b
        prober.stats.restarts += 1
        limit *= 2


def top_k_convolution(f: SparseVec, g: SparseVec, k: int, params: TopKParams = TopKParams(), cfg: EngineConfig = DEFAULT_CONFIG, stats: SearchStats | None = None) -> list[tuple[int, int]]:
    """The ``k`` lowest-index non-zero entries of ``f * g``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not f or not g:
        return []
    top = f[-1][0] + g[-1][0]
    prober = _Prober(lambda u, meter: convolve_prefix(f, g, u, cfg, meter), stats)
    return _search(prober, k, top, params)[0]


def top_k_sumset(A, B, k: int, params: TopKParams = TopKParams(), cfg: EngineConfig = DEFAULT_CONFIG, stats: SearchStats | None = None) -> SparseSet:
    """The ``k`` smallest elements of ``A + B``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not A or not B:
        return SparseSet()
    top = A[-1] + B[-1]
    prober = _Prober(lambda u, meter: solve_prefix(A, B, u, cfg, meter), stats)
    return SparseSet(_search(prober, k, top, params)[0])


def prefix_via_topk(f: SparseVec, g: SparseVec, u: int, params: TopKParams = TopKParams(), cfg: EngineConfig = DEFAULT_CONFIG, stats: SearchStats | None = None) -> SparseVec:
    """``(f * g)`` on ``[u]`` from top-k searches with ``k = 1, 2, 4, ...``.

    Consecutive searches share probe results, and each search starts at the
    previous threshold, which holds fewer than the new ``k`` non-zeros.
    A completed probe at threshold ``at`` is exact on ``[at]``, so every
    ``k`` it already answers is read off it without a new search.
    """
    if not f or not g:
        return SparseVec()
    top = f[-1][0] + g[-1][0]
    prober = _Prober(lambda v, meter: convolve_prefix(f, g, v, cfg, meter), stats)
    k, lo, step = 1, -1, 1
    while True:
        _, at = _search(prober, k, top, params, lo, step)
        full = prober.done[at]
        while len(full) >= k and full[k - 1][0] <= u and at < u:
            k *= 2
        if len(full) >= k or at >= min(u, top):
            return SparseVec(e for e in full if e[0] <= u)
        # k doubles, so the next threshold is typically a similar distance away
        lo, step = at, max(1, at - lo)
