"""Output-size learning by repeated halving.

A restricted sumset problem on ``(A, B, [lo, hi])`` is reduced to a chain
of promise problems on the coarsened instances ``(A >> i, B >> i)``.  The
answer at level ``i + 1`` yields a superset ``T`` of the answer at level
``i`` whose size is within a constant factor of the output, and ``|T|`` at
level 0 is the estimate consumed by the covering constructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import SparseSet, brute_sumset


@dataclass(frozen=True)
class PromiseInstance:
    """Interval-restricted sumset instance with a promised superset ``T``."""

    A: SparseSet
    B: SparseSet
    lo: int
    hi: int
    T: SparseSet


@dataclass
class Level:
    i: int
    S: np.ndarray
    T: np.ndarray


# (A, B, lo, hi, out_estimate) -> sorted array of (A+B) ∩ [lo, hi]
LevelSolver = Callable[[np.ndarray, np.ndarray, int, int, int], np.ndarray]


def top_level(lo: int, hi: int) -> int:
    """``ceil(log2(hi - lo))``, taken as 0 when ``hi - lo <= 1``."""
    width = hi - lo
    return 0 if width <= 1 else (width - 1).bit_length()


def _halve(x: np.ndarray, i: int) -> np.ndarray:
    # x is sorted, so x >> i is sorted and only adjacent duplicates can occur
    if not i or x.size == 0:
        return x
    y = x >> i
    return y[np.r_[True, y[1:] != y[:-1]]]


def _promise(S_prev: np.ndarray | None, lo: int, hi: int, i: int) -> np.ndarray:
    lo_i, hi_i = lo >> i, hi >> i
    if S_prev is None:
        return np.arange(lo_i, hi_i + 1, dtype=np.int64)
    doubled = (2 * S_prev)[:, None] + np.arange(3)
    extra = np.array([lo_i, lo_i + 1, hi_i], dtype=np.int64)
    return np.unique(np.concatenate((doubled.ravel(), extra)))


def _check_level(S: np.ndarray, T: np.ndarray, i: int) -> None:
    pos = np.searchsorted(T, S)
    if S.size and (pos[-1] >= T.size or not (T[pos] == S).all()):
        raise AssertionError(f"level {i}: oracle answer is not inside the promise set")
    if T.size > 6 * S.size + 9:
        raise AssertionError(f"level {i}: |T| = {T.size} exceeds 6*{S.size}+9")


def promise_chain(A, B, lo: int, hi: int, solve_level: Callable[[int, np.ndarray, np.ndarray, np.ndarray], np.ndarray], stop: int = 0) -> tuple[list[Level], np.ndarray]:
    """Run the halving chain from the top level down to ``stop``.

    ``solve_level(i, A_i, B_i, T_i)`` must return the exact restricted sumset
    at level ``i``.  Returns the solved levels and the promise set at level
    ``stop - 1`` (or the level-0 promise when ``stop == 1``).
    """
    a = np.asarray(A, dtype=np.int64)
    b = np.asarray(B, dtype=np.int64)
    r = top_level(lo, hi)
    levels: list[Level] = []
    S = None
    for i in range(r, stop - 1, -1):
        T = _promise(S, lo, hi, i)
        S = np.asarray(solve_level(i, _halve(a, i), _halve(b, i), T), dtype=np.int64)
        _check_level(S, T, i)
        levels.append(Level(i, S, T))
    T_next = _promise(S, lo, hi, stop - 1) if stop > 0 else None
    return levels, T_next


def brute_promise_oracle(p: PromiseInstance) -> SparseSet:
    return brute_sumset(p.A, p.B, p.lo, p.hi)


def solve_via_promise(A, B, lo: int, hi: int, oracle: Callable[[PromiseInstance], SparseSet] = brute_promise_oracle, levels_out: list | None = None) -> SparseSet:
    """Exact ``(A+B) ∩ [lo, hi]`` using only calls to a promise-problem oracle.

    Every level is checked against the promise shape, and afterwards every
    level answer against the ``2*out + 2`` size bound.  Pass a list as
    ``levels_out`` to receive the per-level ``(i, S, T)`` records.
    """
    if len(A) == 0 or len(B) == 0:
        return SparseSet()

    def solve_level(i, a, b, T):
        p = PromiseInstance(SparseSet(a.tolist()), SparseSet(b.tolist()), lo >> i, hi >> i, SparseSet(T.tolist(), signed=True))
        return np.asarray(oracle(p), dtype=np.int64)

    levels, _ = promise_chain(A, B, lo, hi, solve_level)
    out = levels[-1].S.size
    for lv in levels:
        if lv.S.size > 2 * out + 2:
            raise AssertionError(f"level {lv.i}: |S| = {lv.S.size} exceeds 2*{out}+2")
    if levels_out is not None:
        levels_out.extend(levels)
    return SparseSet(levels[-1].S.tolist())


def approx_out(A, B, lo: int, hi: int, level_solver: LevelSolver | None = None) -> int:
    """Estimate ``out`` with ``out <= estimate <= 6*out + 9``.

    Levels ``r .. 1`` are solved exactly by ``level_solver`` (the interval
    covering by default), each seeded with the size of its own promise set;
    the estimate is the size of the level-0 promise.
    """
    if len(A) == 0 or len(B) == 0:
        return 0
    if level_solver is None:
        from .interval import solve_interval_with_estimate

        level_solver = solve_interval_with_estimate
    r = top_level(lo, hi)
    if r == 0:
        return hi - lo + 1

    def solve_level(i, a, b, T):
        return level_solver(a, b, lo >> i, hi >> i, int(T.size))

    _, T0 = promise_chain(A, B, lo, hi, solve_level, stop=1)
    return int(T0.size)
