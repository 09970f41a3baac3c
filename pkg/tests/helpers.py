"""Shared instance grids and random-instance helpers for the test suite."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from sumsetkit.adversarial import build_hard_instance, build_xy_family, greedy_code
from sumsetkit.cli import gen_clustered, gen_progression, gen_twoshift, gen_uniform
from sumsetkit.core import SparseVec

FIXTURES = Path(__file__).parent / "fixtures"

GRID_GENERATORS = {
    "uniform": gen_uniform,
    "clustered": gen_clustered,
    "progression": gen_progression,
    "twoshift": gen_twoshift,
}
GRID_SIZES = ((8, 64), (32, 1024), (64, 4096), (128, 8192), (256, 65536))
GRID_SEEDS = (0, 1, 2)
HARD_GRID = tuple((base, L) for base in (2, 3, 4) for L in (4, 6))
HARD_DELTA = 0.3


def generator_grid():
    """Yields ``(label, A, B, u)`` over every generator, size and seed."""
    for name, gen in GRID_GENERATORS.items():
        for n, u in GRID_SIZES:
            for seed in GRID_SEEDS:
                a, b = gen(np.random.default_rng(1000 * n + seed), n, n, u)
                yield f"{name}-n{n}-u{u}-s{seed}", a, b, u
    for base, L in HARD_GRID:
        inst = hard_instance(base, L).instance
        yield f"hard-b{base}-L{L}", inst.A.array(), inst.B.array(), inst.hi


_HARD_CACHE: dict = {}


def hard_instance(base: int, code_len: int):
    key = (base, code_len)
    if key not in _HARD_CACHE:
        fam = build_xy_family(base, greedy_code(code_len, HARD_DELTA))
        _HARD_CACHE[key] = (fam, build_hard_instance(fam))
    return _HARD_CACHE[key][1]


def hard_family(base: int, code_len: int):
    hard_instance(base, code_len)
    return _HARD_CACHE[(base, code_len)][0]


def log_factor(n: int, m: int) -> float:
    return (1 + math.log2(max(n, 1)) * math.log2(max(m, 1))) ** 2


def load_calibration() -> dict:
    return json.loads((FIXTURES / "calibration.json").read_text())


def random_set(rng: np.random.Generator, max_size: int, u: int) -> list[int]:
    size = int(rng.integers(1, max_size + 1))
    return np.unique(rng.integers(0, u + 1, size=size)).tolist()


def random_vec(rng: np.random.Generator, max_size: int, u: int, max_value: int = 9) -> SparseVec:
    idx = random_set(rng, max_size, u)
    vals = rng.integers(1, max_value + 1, size=len(idx)).tolist()
    return SparseVec(zip(idx, vals))


def random_prefix_family(count: int = 300, seed: int = 44):
    """Yields ``(label, A, B, u)`` for the random prefix cost-bound family."""
    rng = np.random.default_rng(seed)
    for k in range(count):
        u = int(rng.integers(100, 20000))
        A, B = random_set(rng, 128, u), random_set(rng, 128, u)
        yield f"random-{k}", np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64), u
