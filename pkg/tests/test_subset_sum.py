import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from sumsetkit.core import brute_subset_sums
from sumsetkit.subset_sum import (
    RunStats,
    SSParams,
    log_t,
    max_depth_bound,
    repeats,
    schedule,
    split_ratio,
    split_survival_check,
    subset_sums,
    subset_sums_large,
    subset_sums_relaxed,
)


class TestParams:
    @pytest.mark.parametrize(
        "kw",
        [dict(beta=0), dict(profile="fast"), dict(fail_prob=0), dict(fail_prob=1), dict(zeta=0), dict(zeta=2), dict(base_cutoff=0)],
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            SSParams(**kw)

    def test_log_t(self):
        assert [log_t(t) for t in (1, 2, 16, 17, 1024, 1025)] == [4, 4, 4, 5, 10, 11]

    def test_schedules(self):
        s = schedule(1000, 1024, SSParams())
        assert s.L == 10 and s.threshold == Fraction(1000, 20) and s.colors == 2 * 20**2
        assert s.eps == Fraction(1, 10) and s.child_target(1000) == 550
        p = schedule(1000, 1024, SSParams(profile="paper_faithful"))
        assert p.threshold == Fraction(1000, 2 * 1000) and p.colors == 2 * 4 * 10**6

    def test_repeats(self):
        assert repeats(1024, 0.05) == math.ceil(3 * math.log2(1024 / 0.05))


class TestLarge:
    def test_single(self):
        assert subset_sums_large([10], 10, 10) == (0, 10)

    def test_pair_sound(self):
        for seed in range(20):
            out = subset_sums_large([4, 5], 9, 9, SSParams(rng_seed=seed))
            assert set(out) <= {0, 4, 5, 9}
        assert subset_sums_large([4, 5], 9, 9) == (0, 4, 5, 9)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            subset_sums_large([1, 9], 9, 9)  # 1 is not heavy
        with pytest.raises(ValueError):
            subset_sums_large([12], 9, 9)
        with pytest.raises(ValueError):
            subset_sums_large([9], 9, 5)

    def test_random_heavy(self):
        rng = np.random.default_rng(61)
        exact = 0
        for trial in range(200):
            t = int(rng.integers(64, 2000))
            u = int(rng.integers(t // 2, t + 1))
            thr = schedule(u, t, SSParams()).threshold
            lo = math.floor(thr) + 1
            X = np.unique(rng.integers(lo, u + 1, size=int(rng.integers(1, 12)))).tolist()
            out = subset_sums_large(X, u, t, SSParams(fail_prob=0.01, rng_seed=trial))
            truth = brute_subset_sums(X, u)
            assert set(out) <= set(truth)
            exact += out == truth
        assert exact >= 198


class TestGeneral:
    def test_examples(self):
        assert subset_sums([1, 2, 3], 4) == (0, 1, 2, 3, 4)
        assert subset_sums([], 17) == (0,)
        assert subset_sums([5, 7], 6) == (0, 5)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            subset_sums([0, 3], 5)

    @pytest.mark.parametrize("profile", ["practical", "paper_faithful"])
    def test_random_vs_dp(self, profile):
        rng = np.random.default_rng(62)
        for trial in range(100):
            n = int(rng.integers(1, 41))
            t = int(rng.integers(1, 2001))
            X = np.unique(rng.integers(1, t + 1, size=n)).tolist()
            st = RunStats()
            out = subset_sums(X, t, SSParams(profile=profile, rng_seed=trial), stats=st)
            assert out == brute_subset_sums(X, t)
            assert st.max_depth <= max_depth_bound(t)

    def test_small_items_recurse(self):
        X = list(range(1, 60, 2))
        st = RunStats()
        out = subset_sums(X, 1500, stats=st)
        assert out == brute_subset_sums(X, 1500)
        assert st.max_depth >= 1 and st.prefix_calls > 0

    @pytest.mark.parametrize("zeta", [1, 0.5, 0.25, 0.125])
    def test_relaxed(self, zeta):
        rng = np.random.default_rng(63)
        for trial in range(40):
            t = int(rng.integers(1, 2001))
            X = np.unique(rng.integers(1, t + 1, size=int(rng.integers(1, 41)))).tolist()
            assert subset_sums_relaxed(X, t, zeta, SSParams(rng_seed=trial)) == brute_subset_sums(X, t)

    def test_relaxed_edge(self):
        assert subset_sums_relaxed([], 5, 0.5) == (0,)
        assert subset_sums_relaxed([1, 2, 3], 4, 1) == (0, 1, 2, 3, 4)


class TestSplitting:
    def test_rejects_large_mu(self):
        with pytest.raises(ValueError):
            split_survival_check(range(1, 9), 64, 64)

    def test_rejects_eps(self):
        with pytest.raises(ValueError):
            split_survival_check([1, 2], 64, 64, eps=0.3)

    def test_exhaustive_small(self):
        rep = split_survival_check([1, 2, 3, 4], 64, 64, trials=100, eps=0)
        assert rep.exhaustive and rep.partitions == 16
        assert rep.bound == pytest.approx(1 / (1 - 4 * 4 / 64))
        assert rep.ok

    def test_ratio_by_hand(self):
        # Z1 = {1}, Z2 = {2}, u = 4, eps = 0: c = 2, |S({1},2)| + |S({2},2)| = 4, |S(Z,4)| = 4
        assert split_ratio([1], [2], 4, Fraction(0)) == pytest.approx(4 / 5)

    def test_random_cases(self):
        rng = np.random.default_rng(64)
        for case in range(100):
            u = int(rng.integers(64, 600))
            mu_max = u // 16
            Z = np.unique(rng.integers(1, mu_max + 1, size=int(rng.integers(1, 12)))).tolist()
            eps = float(rng.choice([0, 0.05, 0.125, 0.25]))
            rep = split_survival_check(Z, u, u, trials=30, eps=eps, seed=case)
            assert rep.ok, rep
