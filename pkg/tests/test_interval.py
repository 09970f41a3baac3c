import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_set, random_vec
from sumsetkit.core import Covering, Instance, SparseSet, SparseVec, brute_convolve, brute_sumset, rect_sumset, validate_covering
from sumsetkit.interval import convolve_interval, find_interval_covering, interval_q, solve_interval, trim
from sumsetkit.output_size import approx_out


def trimmed(A, B, hi):
    a, b = trim(np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64), hi)
    return a.tolist(), b.tolist()


def test_q_formula():
    assert interval_q(16, 16, 256) == 1
    assert interval_q(16, 16, 1) == 16
    assert interval_q(100, 100, 99) == 11  # ceil(sqrt(10000/99)) = ceil(10.05)
    assert interval_q(3, 1000, 1) == 3  # clamped to min(n, m)


def test_q_one_is_whole_grid():
    cov = find_interval_covering([1, 2, 3], [1, 2], 0, 10, out_estimate=6)
    assert cov.rects == Covering.whole_grid(3, 2).rects


def test_uniform_block_example():
    A = list(range(1, 17))
    cov = find_interval_covering(A, A, 0, 16, approx_out(A, A, 0, 16))
    rep = validate_covering(Instance(SparseSet(A), SparseSet(A), 0, 16), cov)
    assert rep.ok


def test_solve_examples():
    assert solve_interval([1, 2], [1, 2, 3], 3, 4) == (3, 4)
    assert solve_interval([5], [6], 0, 3) == ()


def test_convolve_example():
    f, g = SparseVec([(0, 1), (1, 2)]), SparseVec([(0, 3), (1, 4)])
    assert convolve_interval(f, g, 1, 1) == ((1, 10),)


def test_random_coverings():
    rng = np.random.default_rng(21)
    for _ in range(200):
        u = int(rng.integers(10, 8192))
        A, B = random_set(rng, 128, u), random_set(rng, 128, u)
        lo = int(rng.integers(0, u))
        hi = lo + int(rng.integers(0, u))
        A, B = trimmed(A, B, hi)
        if not A:
            continue
        est = approx_out(A, B, lo, hi)
        cov = find_interval_covering(A, B, lo, hi, est)
        rep = validate_covering(Instance(SparseSet(A), SparseSet(B), lo, hi), cov)
        assert rep.ok
        assert rep.cost <= 20 * math.sqrt(len(A) * len(B) * est)


def test_diagonal_disjointness():
    rng = np.random.default_rng(22)
    for _ in range(50):
        A, B = random_set(rng, 64, 2000), random_set(rng, 64, 2000)
        lo, hi = 500, 2500
        A, B = trimmed(A, B, hi)
        est = max(1, len(brute_sumset(A, B, lo, hi)))
        cov = find_interval_covering(A, B, lo, hi, est)
        q = interval_q(len(A), len(B), est)
        sa, sb = -(-len(A) // q), -(-len(B) // q)
        diagonals = {}
        for r in cov.rects:
            s = rect_sumset(A, B, r)
            if s[0] >= lo and s[-1] <= hi:
                diagonals.setdefault((r.j_lo - 1) // sb - (r.i_lo - 1) // sa, []).append(s)
        for sums in diagonals.values():
            total = sum(len(s) for s in sums)
            assert len(np.unique(np.concatenate(sums))) == total


def test_solve_random_vs_brute():
    rng = np.random.default_rng(23)
    for _ in range(500):
        u = int(rng.integers(1, 8192))
        A, B = random_set(rng, 128, u), random_set(rng, 128, u)
        lo = int(rng.integers(0, 2 * u))
        hi = lo + int(rng.integers(0, u + 1))
        assert solve_interval(A, B, lo, hi) == brute_sumset(A, B, lo, hi)


def test_convolve_random_vs_brute():
    rng = np.random.default_rng(24)
    for _ in range(200):
        u = int(rng.integers(1, 4096))
        f, g = random_vec(rng, 64, u), random_vec(rng, 64, u)
        lo = int(rng.integers(0, 2 * u))
        hi = lo + int(rng.integers(0, u + 1))
        assert convolve_interval(f, g, lo, hi) == brute_convolve(f, g, lo, hi)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(0, 500), min_size=1, max_size=30, unique=True).map(sorted),
    st.lists(st.integers(0, 500), min_size=1, max_size=30, unique=True).map(sorted),
    st.integers(0, 1000),
    st.integers(0, 500),
)
def test_indicator_multiplicities(A, B, lo, width):
    h = convolve_interval(SparseVec.indicator(A), SparseVec.indicator(B), lo, lo + width)
    assert h.support == solve_interval(A, B, lo, lo + width)
    counts = {}
    for a in A:
        for b in B:
            if lo <= a + b <= lo + width:
                counts[a + b] = counts.get(a + b, 0) + 1
    assert dict(h) == counts
