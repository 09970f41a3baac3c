"""Prefix-restricted sumsets through an ``out^(4/3)``-cost rectangle covering.

The construction keeps a pool of unprocessed index rectangles, grouped by
their *type* ``(ceil log |I|, ceil log |J|)``.  Types are processed from
the largest down.  Small types go straight to the output.  Among the
subproblems of a large type, all sumsets are started together and every
call that finishes before only ``q`` remain is moved to the output; the
stragglers are split around the staircase ``A_i + B_j <= u``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .core import Covering, Instance, IndexRect, SparseSet, SparseVec, validate_covering
from .engine import DEFAULT_CONFIG, EngineConfig, WorkMeter, start_sumset
from .interval import as_array, convolve_over_covering, sumset_over_covering, trim
from .output_size import approx_out

SMALL_OUT_FLOOR = 64


def clog2(x: int) -> int:
    """``ceil(log2 x)`` for ``x >= 1``, with ``clog2(1) == 0``."""
    return (x - 1).bit_length()


def type_key(r: IndexRect) -> tuple[int, int]:
    return clog2(r.rows), clog2(r.cols)


def order_key(t: tuple[int, int]) -> tuple[int, int]:
    """Total order on types: by ``x + y``, ties broken by ``x``."""
    return t[0] + t[1], t[0]


@dataclass(frozen=True)
class Subproblem:
    rect: IndexRect

    @property
    def type_key(self) -> tuple[int, int]:
        return type_key(self.rect)


class SubproblemQueue:
    """Pending rectangles bucketed by type."""

    def __init__(self):
        self._by_type: dict[tuple[int, int], list[IndexRect]] = defaultdict(list)
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, r: IndexRect) -> None:
        self._by_type[type_key(r)].append(r)
        self._size += 1

    def pop_max_type(self) -> tuple[tuple[int, int], list[IndexRect]]:
        t = max(self._by_type, key=order_key)
        batch = sorted(self._by_type.pop(t))
        self._size -= len(batch)
        return t, batch

    def count_per_type(self) -> dict[tuple[int, int], int]:
        return {t: len(v) for t, v in self._by_type.items()}

    def rects(self) -> list[IndexRect]:
        return [r for batch in self._by_type.values() for r in batch]


def check_staircase(batch: list[IndexRect]) -> None:
    """Same-type rectangles must be disjoint and anti-monotone."""
    for r, s in zip(batch, batch[1:]):
        if not (r.i_hi < s.i_lo and r.j_lo > s.j_hi):
            raise AssertionError(f"{r} and {s} do not form a staircase")


def split_subproblem(r: IndexRect, A, B, u: int) -> tuple[IndexRect | None, list[IndexRect]]:
    """Split at the middle row along the ``A_i + B_j <= u`` boundary.

    Returns the rectangle ``(I1, J1)``, all of whose sums are at most ``u``,
    and up to two strictly smaller children.  The quadrant ``(I2, J2)`` and
    row ``i`` of ``J2`` only contain sums above ``u`` and are dropped.
    """
    i = (r.i_lo + r.i_hi) // 2
    # largest j in J with A_i + B_j <= u (j_lo - 1 when there is none)
    j = bisect_right(B, u - A[i - 1], r.j_lo - 1, r.j_hi)
    out = IndexRect(r.i_lo, i, r.j_lo, j) if j >= r.j_lo else None
    children = []
    if i - 1 >= r.i_lo and j + 1 <= r.j_hi:
        children.append(IndexRect(r.i_lo, i - 1, j + 1, r.j_hi))
    if i + 1 <= r.i_hi and j >= r.j_lo:
        children.append(IndexRect(i + 1, r.i_hi, r.j_lo, j))
    return out, children


def cube_root_ceil(x: int) -> int:
    q = max(1, round(x ** (1 / 3)))
    while q**3 < x:
        q += 1
    while q > 1 and (q - 1) ** 3 >= x:
        q -= 1
    return q


def subproblem_cap(q: int, n: int, m: int) -> int:
    return 2 * q * (clog2(n) + 1) * (clog2(m) + 1)


def _race(A, B, batch: list[IndexRect], q: int, cfg: EngineConfig, meter: WorkMeter | None, cov: Covering) -> list[IndexRect]:
    """Start all sumsets, double the per-call budget each round, and stop
    once at most ``q`` calls are unfinished.  Returns the stragglers."""
    calls = [(r, start_sumset(A[r.i_lo - 1 : r.i_hi], B[r.j_lo - 1 : r.j_hi], cfg)) for r in batch]
    budget = 1
    while True:
        pending = []
        for r, call in calls:
            if call.state == "in_progress":
                before = call.work_done
                call.step(budget)
                if meter is not None:
                    meter.charge(call.work_done - before)
            if call.state == "finished":
                cov.rects.append(r)
                cov.sumsets[r] = call.array
            else:
                pending.append((r, call))
        if len(pending) <= q:
            for _, call in pending:
                call.cancel()
            return [r for r, _ in pending]
        calls = pending
        budget *= 2


def covering_construction(A, B, u: int, out_estimate: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None, debug: bool = False) -> Covering:
    """Unique rectangle covering of ``(A, B, [u])`` of cost ``~out^(4/3)``.

    ``A`` and ``B`` must be normalized for ``u``.  With ``debug`` set, the
    loop invariant (output plus pending rectangles form a unique covering)
    is checked at every batch boundary by the exhaustive validator.
    """
    a, b = as_array(A), as_array(B)
    n, m = a.size, b.size
    if n == 0 or m == 0:
        return Covering()
    if out_estimate < SMALL_OUT_FLOOR or n * m <= out_estimate:
        return Covering.whole_grid(n, m)
    q = cube_root_ceil(out_estimate)
    cap = subproblem_cap(q, n, m)
    a_list, b_list = a.tolist(), b.tolist()
    inst = Instance(SparseSet(a_list), SparseSet(b_list), 0, u) if debug else None
    cov = Covering()
    queue = SubproblemQueue()
    queue.push(IndexRect(1, n, 1, m))
    while len(queue):
        if debug:
            pending = Covering(cov.rects + queue.rects())
            rep = validate_covering(inst, pending)
            if not rep.unique:
                raise AssertionError(f"loop invariant broken: {rep}")
        for t, c in queue.count_per_type().items():
            if c > cap:
                raise AssertionError(f"{c} subproblems of type {t} exceed the cap {cap}")
        (x, y), batch = queue.pop_max_type()
        if debug:
            check_staircase(batch)
        if 2 ** (x + y) <= out_estimate:
            cov.rects.extend(batch)
            continue
        if len(batch) > q:
            batch = _race(a, b, batch, q, cfg, meter, cov)
        for r in batch:
            out, children = split_subproblem(r, a_list, b_list, u)
            if out is not None:
                cov.rects.append(out)
            for c in children:
                queue.push(c)
    return cov


def solve_prefix_with_estimate(a: np.ndarray, b: np.ndarray, lo: int, hi: int, out_estimate: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> np.ndarray:
    """Level solver for the halving chain; ``lo`` is always 0 here."""
    a, b = trim(as_array(a), as_array(b), hi)
    if a.size == 0:
        return a
    cov = covering_construction(a, b, hi, out_estimate, cfg, meter)
    return sumset_over_covering(a, b, cov, lo, hi, cfg, meter)


def prefix_estimate(a: np.ndarray, b: np.ndarray, u: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> int:
    def level(x, y, lo, hi, est):
        return solve_prefix_with_estimate(x, y, lo, hi, est, cfg, meter)

    return approx_out(a, b, 0, u, level)


def solve_prefix(A, B, u: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseSet:
    """Exact ``(A+B) ∩ [u]``."""
    a, b = trim(as_array(A), as_array(B), u)
    if a.size == 0:
        return SparseSet()
    est = prefix_estimate(a, b, u, cfg, meter)
    return SparseSet(solve_prefix_with_estimate(a, b, 0, u, est, cfg, meter).tolist())


def convolve_prefix(f: SparseVec, g: SparseVec, u: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseVec:
    """Exact ``(f * g)`` on ``[u]`` as a sum over a unique covering."""
    if not f or not g:
        return SparseVec()
    a, b = trim(f.indices(), g.indices(), u)
    if a.size == 0:
        return SparseVec()
    est = prefix_estimate(a, b, u, cfg, meter)
    cov = covering_construction(a, b, u, est, cfg, meter)
    return convolve_over_covering(SparseVec(f[: a.size]), SparseVec(g[: b.size]), cov, 0, u, cfg, meter)
