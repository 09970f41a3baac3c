"""Relaxed prefix coverings from fixed-width value blocks.

With ``zeta = 2**-l`` and ``u`` a power of two, ``[0, u]`` is cut into
value blocks of length ``zeta*u/2``.  Any kept block pair has all its sums
below ``(1 + zeta) u``, so the cost is charged to the slightly larger
output ``(A+B) ∩ [(1+zeta) u]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Covering, IndexRect, SparseSet, SparseVec
from .engine import DEFAULT_CONFIG, EngineConfig, WorkMeter
from .interval import as_array, convolve_over_covering, sumset_over_covering, trim


@dataclass(frozen=True)
class RelaxedGrid:
    """Rounded parameters of a relaxed covering."""

    level: int  # zeta rounded down to 2**-level
    shift: int  # added to A and u so that u becomes a power of two
    u_pow: int
    block: int

    @property
    def zeta(self) -> float:
        return 2.0**-self.level


def relaxed_grid(u: int, zeta: float) -> RelaxedGrid:
    if not 0 < zeta <= 1:
        raise ValueError(f"zeta must lie in (0, 1], got {zeta}")
    if u < 1:
        raise ValueError(f"u must be >= 1, got {u}")
    level = 0
    while 2.0**-level > zeta:
        level += 1
    u_pow = 1 << (u - 1).bit_length()
    return RelaxedGrid(level, u_pow - u, u_pow, max(1, u_pow >> (level + 1)))


def _value_blocks(x: np.ndarray, width: int):
    ids = x // width
    starts = np.flatnonzero(np.r_[True, ids[1:] != ids[:-1]])
    ends = np.r_[starts[1:], x.size]
    return starts + 1, ends, x[starts], x[ends - 1]


def find_relaxed_covering(A, B, u: int, zeta: float) -> Covering:
    """Unique rectangle covering of ``(A, B, [u])`` of cost ``O(|(A+B) ∩ [(1+zeta)u]| / zeta)``."""
    grid = relaxed_grid(u, zeta)
    a, b = trim(as_array(A), as_array(B), u)
    if a.size == 0:
        return Covering()
    a = a + grid.shift
    ai_lo, ai_hi, a_min, a_max = _value_blocks(a, grid.block)
    bj_lo, bj_hi, b_min, b_max = _value_blocks(b, grid.block)
    keep = a_min[:, None] + b_min[None, :] <= grid.u_pow
    rows, cols = np.nonzero(keep)
    top = a_max[rows] + b_max[cols]
    limit = grid.u_pow + 2 * grid.block
    if top.size and int(top.max()) >= limit:
        raise AssertionError(f"kept block pair reaches {int(top.max())} >= (1+zeta)u = {limit}")
    rects = [
        IndexRect(int(ai_lo[x]), int(ai_hi[x]), int(bj_lo[y]), int(bj_hi[y]))
        for x, y in zip(rows.tolist(), cols.tolist())
    ]
    return Covering(rects)


def solve_prefix_relaxed(A, B, u: int, zeta: float, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseSet:
    """Exact ``(A+B) ∩ [u]`` through the relaxed covering."""
    a, b = trim(as_array(A), as_array(B), u)
    if a.size == 0:
        return SparseSet()
    cov = find_relaxed_covering(a, b, u, zeta)
    return SparseSet(sumset_over_covering(a, b, cov, 0, u, cfg, meter).tolist())


def convolve_prefix_relaxed(f: SparseVec, g: SparseVec, u: int, zeta: float, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseVec:
    if not f or not g:
        return SparseVec()
    a, b = trim(f.indices(), g.indices(), u)
    if a.size == 0:
        return SparseVec()
    cov = find_relaxed_covering(a, b, u, zeta)
    return convolve_over_covering(SparseVec(f[: a.size]), SparseVec(g[: b.size]), cov, 0, u, cfg, meter)
