import itertools

import numpy as np
import pytest

from helpers import load_calibration, log_factor, random_prefix_family, random_set, random_vec
from sumsetkit.core import Covering, IndexRect, Instance, SparseSet, SparseVec, brute_convolve, brute_sumset, validate_covering
from sumsetkit.interval import trim
from sumsetkit.prefix import (
    SMALL_OUT_FLOOR,
    SubproblemQueue,
    check_staircase,
    clog2,
    convolve_prefix,
    covering_construction,
    cube_root_ceil,
    order_key,
    prefix_estimate,
    solve_prefix,
    split_subproblem,
    type_key,
)


def test_clog2():
    assert [clog2(x) for x in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]


def test_cube_root():
    assert [cube_root_ceil(x) for x in (1, 2, 8, 9, 27, 28, 10**6, 10**6 + 1)] == [1, 2, 2, 3, 3, 4, 100, 101]


def test_type_order():
    assert order_key((2, 1)) > order_key((1, 2)) > order_key((2, 0))
    assert type_key(IndexRect(1, 1, 1, 5)) == (0, 3)


def test_queue():
    q = SubproblemQueue()
    for r in [IndexRect(1, 2, 1, 4), IndexRect(5, 6, 9, 12), IndexRect(1, 1, 1, 1)]:
        q.push(r)
    t, batch = q.pop_max_type()
    assert t == (1, 2) and batch == [IndexRect(1, 2, 1, 4), IndexRect(5, 6, 9, 12)]
    assert len(q) == 1 and q.count_per_type() == {(0, 0): 1}


def test_staircase_check():
    check_staircase([IndexRect(1, 2, 7, 8), IndexRect(3, 4, 1, 2)])
    with pytest.raises(AssertionError):
        check_staircase([IndexRect(1, 2, 1, 2), IndexRect(3, 4, 5, 6)])


class TestSplit:
    def test_single_cell_below(self):
        assert split_subproblem(IndexRect(1, 1, 1, 1), [1], [2], 3) == (IndexRect(1, 1, 1, 1), [])

    def test_single_cell_above(self):
        assert split_subproblem(IndexRect(1, 1, 1, 1), [1], [5], 3) == (None, [])

    def test_random_partition(self):
        rng = np.random.default_rng(41)
        for _ in range(300):
            A = sorted(rng.choice(200, 8, replace=False).tolist())
            B = sorted(rng.choice(200, 8, replace=False).tolist())
            u = int(rng.integers(0, 400))
            r = IndexRect(1, 8, 1, 8)
            out, children = split_subproblem(r, A, B, u)
            cells = set(itertools.product(range(1, 9), range(1, 9)))
            seen = []
            if out is not None:
                seen += list(itertools.product(range(out.i_lo, out.i_hi + 1), range(out.j_lo, out.j_hi + 1)))
                assert all(A[i - 1] + B[j - 1] <= u for i, j in seen)
            for c in children:
                assert sum(type_key(c)) < sum(type_key(r))
                seen += list(itertools.product(range(c.i_lo, c.i_hi + 1), range(c.j_lo, c.j_hi + 1)))
            assert len(seen) == len(set(seen))
            # everything not kept has its sum above u
            for i, j in cells - set(seen):
                assert A[i - 1] + B[j - 1] > u


def run_construction(A, B, u, debug=False):
    a, b = trim(np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64), u)
    if a.size == 0:
        return None
    est = prefix_estimate(a, b, u)
    cov = covering_construction(a, b, u, est, debug=debug)
    inst = Instance(SparseSet(a.tolist()), SparseSet(b.tolist()), 0, u)
    return inst, est, cov, validate_covering(inst, cov)


def test_whole_grid_when_small():
    cov = covering_construction(np.arange(4), np.arange(4), 6, out_estimate=16)
    assert cov.rects == Covering.whole_grid(4, 4).rects
    cov = covering_construction(np.arange(100), np.arange(100), 150, out_estimate=SMALL_OUT_FLOOR - 1)
    assert len(cov.rects) == 1


def test_consecutive_example():
    A = list(range(1, 65))
    inst, est, cov, rep = run_construction(A, A, 64, debug=True)
    assert rep.ok


def test_debug_invariants_random():
    rng = np.random.default_rng(42)
    for _ in range(40):
        u = int(rng.integers(100, 8192))
        res = run_construction(random_set(rng, 128, u), random_set(rng, 128, u), u, debug=True)
        if res is not None:
            assert res[3].ok


def test_rects_disjoint():
    rng = np.random.default_rng(43)
    for _ in range(30):
        u = int(rng.integers(100, 4000))
        res = run_construction(random_set(rng, 64, u), random_set(rng, 64, u), u)
        if res is None:
            continue
        inst, _, cov, _ = res
        grid = np.zeros((inst.n, inst.m), dtype=int)
        for r in cov.rects:
            grid[r.i_lo - 1 : r.i_hi, r.j_lo - 1 : r.j_hi] += 1
        assert grid.max() <= 1


def test_cost_bound_random():
    K = load_calibration()["K"]
    for _, A, B, u in random_prefix_family():
        res = run_construction(A, B, u)
        if res is None:
            continue
        inst, est, cov, rep = res
        assert rep.ok
        assert rep.cost <= K * est ** (4 / 3) * log_factor(inst.n, inst.m)


def test_hard_for_naive_example():
    assert solve_prefix([0, 50, 51, 52], [0, 50, 52, 54], 100) == (0, 50, 51, 52, 54, 100)


def test_solve_small_example():
    assert solve_prefix([1, 2], [1, 2, 3], 4) == (2, 3, 4)


def test_solve_random_vs_brute():
    rng = np.random.default_rng(45)
    for _ in range(500):
        u = int(rng.integers(1, 8192))
        A, B = random_set(rng, 128, u), random_set(rng, 128, u)
        assert solve_prefix(A, B, u) == brute_sumset(A, B, 0, u)


def test_convolve_example():
    f, g = SparseVec([(0, 1), (1, 2)]), SparseVec([(0, 3), (1, 4)])
    assert convolve_prefix(f, g, 1) == ((0, 3), (1, 10))


def test_convolve_random_vs_brute():
    rng = np.random.default_rng(46)
    for _ in range(200):
        u = int(rng.integers(1, 8192))
        f, g = random_vec(rng, 128, u), random_vec(rng, 128, u)
        assert convolve_prefix(f, g, u) == brute_convolve(f, g, 0, u)


def test_indicator_support():
    rng = np.random.default_rng(47)
    for _ in range(50):
        A, B = random_set(rng, 64, 3000), random_set(rng, 64, 3000)
        h = convolve_prefix(SparseVec.indicator(A), SparseVec.indicator(B), 3000)
        assert h.support == solve_prefix(A, B, 3000)
