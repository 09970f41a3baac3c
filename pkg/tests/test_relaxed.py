import numpy as np
import pytest

from helpers import random_set, random_vec
from sumsetkit.core import Instance, SparseSet, brute_convolve, brute_sumset, validate_covering
from sumsetkit.interval import trim
from sumsetkit.relaxed import convolve_prefix_relaxed, find_relaxed_covering, relaxed_grid, solve_prefix_relaxed

ZETAS = (1, 0.5, 0.25, 0.125)


def test_grid():
    g = relaxed_grid(100, 0.3)
    assert g.zeta == 0.25 and g.u_pow == 128 and g.shift == 28 and g.block == 16
    assert relaxed_grid(64, 1).block == 32


@pytest.mark.parametrize("zeta", [0, -1, 1.5])
def test_bad_zeta(zeta):
    with pytest.raises(ValueError):
        find_relaxed_covering([1], [1], 10, zeta)


def test_zeta_one_small_grid():
    A = B = list(range(1, 33))
    cov = find_relaxed_covering(A, B, 32, 1)
    assert len(cov.rects) <= 4
    assert validate_covering(Instance(SparseSet(A), SparseSet(B), 0, 32), cov).ok


def test_quarter_example():
    A = B = list(range(1, 33))
    cov = find_relaxed_covering(A, B, 32, 0.25)
    assert validate_covering(Instance(SparseSet(A), SparseSet(B), 0, 32), cov).ok


def test_empty():
    assert solve_prefix_relaxed([50], [60], 10, 0.5) == ()


@pytest.mark.parametrize("zeta", ZETAS)
def test_random_cost_and_validity(zeta):
    rng = np.random.default_rng(31)
    for _ in range(200):
        u = int(rng.integers(1, 8192))
        A, B = random_set(rng, 128, u), random_set(rng, 128, u)
        a, b = trim(np.asarray(A), np.asarray(B), u)
        if a.size == 0:
            continue
        cov = find_relaxed_covering(a, b, u, zeta)
        rep = validate_covering(Instance(SparseSet(a.tolist()), SparseSet(b.tolist()), 0, u), cov)
        assert rep.ok
        wide = len(brute_sumset(A, B, 0, int((1 + zeta) * u)))
        assert rep.cost <= 16 / zeta * wide


def test_solve_random_vs_brute():
    rng = np.random.default_rng(32)
    for k in range(500):
        u = int(rng.integers(1, 8192))
        A, B = random_set(rng, 128, u), random_set(rng, 128, u)
        zeta = ZETAS[k % 4]
        assert solve_prefix_relaxed(A, B, u, zeta) == brute_sumset(A, B, 0, u)


def test_convolve_random_vs_brute():
    rng = np.random.default_rng(33)
    for k in range(200):
        u = int(rng.integers(1, 4096))
        f, g = random_vec(rng, 64, u), random_vec(rng, 64, u)
        assert convolve_prefix_relaxed(f, g, u, ZETAS[k % 4]) == brute_convolve(f, g, 0, u)
