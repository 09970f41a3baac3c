"""Unique rectangle coverings for interval-restricted sumsets.

``A`` and ``B`` are cut into ``q`` blocks of equal cardinality and a block
pair is kept when its value ranges can produce a sum inside ``[lo, hi]``.
Also home to the generic "solve over a covering" helpers used by every
covering construction.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Covering, IndexRect, SparseSet, SparseVec
from .engine import DEFAULT_CONFIG, EngineConfig, WorkMeter, convolve_arrays, sumset_arrays
from .output_size import approx_out


def as_array(x) -> np.ndarray:
    return x if isinstance(x, np.ndarray) else np.asarray(x, dtype=np.int64)


def trim(a: np.ndarray, b: np.ndarray, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`sumsetkit.core.normalize`."""
    if a.size == 0 or b.size == 0:
        return a[:0], b[:0]
    a2 = a[: np.searchsorted(a, hi - b[0], side="right")]
    b2 = b[: np.searchsorted(b, hi - a[0], side="right")]
    return a2, b2


def sumset_over_covering(A, B, cov: Covering, lo: int, hi: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> np.ndarray:
    """Union of the rectangle sumsets, restricted to ``[lo, hi]``.

    Sets ``cov.cost`` as a side effect.
    """
    a, b = as_array(A), as_array(B)
    parts = []
    cost = 0
    for r in cov.rects:
        s = cov.sumsets.get(r)
        if s is None:
            s = sumset_arrays(a[r.i_lo - 1 : r.i_hi], b[r.j_lo - 1 : r.j_hi], cfg, meter)
        cost += s.size
        parts.append(s[(s >= lo) & (s <= hi)])
    cov.cost = cost
    if not parts:
        return np.zeros(0, dtype=np.int64)
    if len(parts) == 1:
        return parts[0]
    return np.unique(np.concatenate(parts))


def _merge(idx: np.ndarray, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if idx.size == 0:
        return idx, vals
    order = np.argsort(idx, kind="stable")
    idx, vals = idx[order], vals[order]
    starts = np.flatnonzero(np.r_[True, idx[1:] != idx[:-1]])
    return idx[starts], np.add.reduceat(vals, starts)


def convolve_over_covering(f: SparseVec, g: SparseVec, cov: Covering, lo: int, hi: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseVec:
    """Sum of per-rectangle convolutions restricted to ``[lo, hi]``.

    Correct only for unique coverings, where every in-range pair is counted
    exactly once.
    """
    fi, fv, gi, gv = f.indices(), f.values(), g.indices(), g.values()
    idx_parts, val_parts = [], []
    big = False
    for r in cov.rects:
        i, v = convolve_arrays(fi[r.i_lo - 1 : r.i_hi], fv[r.i_lo - 1 : r.i_hi], gi[r.j_lo - 1 : r.j_hi], gv[r.j_lo - 1 : r.j_hi], cfg, meter)
        keep = (i >= lo) & (i <= hi)
        idx_parts.append(i[keep])
        val_parts.append(v[keep])
        big |= v.dtype == object
    if not idx_parts:
        return SparseVec()
    vals = np.concatenate([v.astype(object) for v in val_parts]) if big else np.concatenate(val_parts)
    idx, vals = _merge(np.concatenate(idx_parts), vals)
    return SparseVec(zip(idx.tolist(), vals.tolist()), value_bound=cfg.value_bound)


def interval_q(n: int, m: int, out_estimate: int) -> int:
    """``ceil(sqrt(n*m / out_estimate))`` clamped to ``[1, min(n, m)]``."""
    est = max(1, out_estimate)
    q = math.isqrt(n * m // est)
    while q * q * est < n * m:
        q += 1
    q = max(1, q)
    return min(q, min(n, m))


def _blocks(x: np.ndarray, q: int):
    """Equal-size blocks of ``x`` padded with copies of its maximum.

    Returns 1-based ``(lo, hi)`` index bounds of the real part of each
    non-empty block, and the block minima and maxima.
    """
    size = -(-x.size // q)
    starts = np.arange(0, x.size, size)
    ends = np.minimum(starts + size, x.size)
    return starts + 1, ends, x[starts], x[ends - 1]


def find_interval_covering(A, B, lo: int, hi: int, out_estimate: int) -> Covering:
    """Unique rectangle covering of cost ``O(sqrt(n*m*out_estimate))``."""
    a, b = as_array(A), as_array(B)
    n, m = a.size, b.size
    if n == 0 or m == 0:
        return Covering()
    q = interval_q(n, m, out_estimate)
    if q == 1:
        return Covering.whole_grid(n, m)
    ai_lo, ai_hi, a_min, a_max = _blocks(a, q)
    bj_lo, bj_hi, b_min, b_max = _blocks(b, q)
    keep = (a_min[:, None] + b_min[None, :] <= hi) & (a_max[:, None] + b_max[None, :] >= lo)
    rows, cols = np.nonzero(keep)
    rects = [
        IndexRect(int(ai_lo[x]), int(ai_hi[x]), int(bj_lo[y]), int(bj_hi[y]))
        for x, y in zip(rows.tolist(), cols.tolist())
    ]
    return Covering(rects)


def solve_interval_with_estimate(a: np.ndarray, b: np.ndarray, lo: int, hi: int, out_estimate: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> np.ndarray:
    a, b = trim(as_array(a), as_array(b), hi)
    if a.size == 0:
        return a
    cov = find_interval_covering(a, b, lo, hi, out_estimate)
    return sumset_over_covering(a, b, cov, lo, hi, cfg, meter)


def solve_interval(A, B, lo: int, hi: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseSet:
    """Exact ``(A+B) ∩ [lo, hi]``."""
    a, b = trim(as_array(A), as_array(B), hi)
    if a.size == 0:
        return SparseSet()

    def level(x, y, l, h, est):
        return solve_interval_with_estimate(x, y, l, h, est, cfg, meter)

    est = approx_out(a, b, lo, hi, level)
    return SparseSet(solve_interval_with_estimate(a, b, lo, hi, est, cfg, meter).tolist())


def convolve_interval(f: SparseVec, g: SparseVec, lo: int, hi: int, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseVec:
    """Exact ``(f * g)`` on ``[lo, hi]``, values with multiplicity."""
    if not f or not g:
        return SparseVec()
    a, b = trim(f.indices(), g.indices(), hi)
    if a.size == 0:
        return SparseVec()
    f, g = SparseVec(f[: a.size]), SparseVec(g[: b.size])

    def level(x, y, l, h, est):
        return solve_interval_with_estimate(x, y, l, h, est, cfg, meter)

    est = approx_out(a, b, lo, hi, level)
    cov = find_interval_covering(a, b, lo, hi, est)
    return convolve_over_covering(f, g, cov, lo, hi, cfg, meter)
