"""Structured hard instances and hardness-reduction encoders.

* a greedy constant-weight binary code and the digit-set families built
  from it, where matching pairs ``X_i + Y_i`` are large and all crossed
  pairs ``X_i + Y_j`` are small;
* prefix instances assembled from those families, on which every
  rectangle covering is expensive relative to the output size;
* the exponent achieved by that construction;
* encoders from Boolean matrix multiplication and sliding-window Hamming
  distance to interval-restricted sumsets and convolutions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import Instance, SparseSet, SparseVec, brute_sumset

VERIFY_SIGMA = 10**6
_TOL = 1e-9


@dataclass(frozen=True)
class CodeFamily:
    code_len: int
    code_delta: float
    codewords: tuple[tuple[int, ...], ...]

    @property
    def g(self) -> int:
        return len(self.codewords)

    def index_sets(self) -> list[tuple[int, ...]]:
        return [tuple(i for i, bit in enumerate(w) if bit) for w in self.codewords]

    def min_distance(self) -> int | None:
        ws = np.asarray(self.codewords, dtype=np.int8)
        if len(ws) < 2:
            return None
        d = (ws[:, None, :] != ws[None, :, :]).sum(axis=2)
        return int(d[~np.eye(len(ws), dtype=bool)].min())


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def greedy_code(code_len: int, code_delta: float) -> CodeFamily:
    """Weight-``t/2`` code with pairwise distance at least ``delta * t``.

    Candidates are scanned in lexicographic order of their support sets;
    each pick marks every vector closer than ``delta * t`` as unpickable.
    """
    if code_len < 2 or code_len % 2:
        raise ValueError("code_len must be an even integer >= 2")
    if not 0 <= code_delta < 0.5:
        raise ValueError("code_delta must lie in [0, 1/2)")
    half = code_len // 2
    supports = list(itertools.combinations(range(code_len), half))
    vecs = np.zeros((len(supports), code_len), dtype=np.int8)
    for k, s in enumerate(supports):
        vecs[k, list(s)] = 1
    radius = code_delta * code_len - _TOL
    free = np.ones(len(supports), dtype=bool)
    picked = []
    for k in range(len(supports)):
        if not free[k]:
            continue
        picked.append(tuple(int(b) for b in vecs[k]))
        dist = (vecs != vecs[k]).sum(axis=1)
        free &= dist >= radius
    return CodeFamily(code_len, code_delta, tuple(picked))


def digit_set(I: Sequence[int], base: int) -> np.ndarray:
    """All numbers whose base-``base`` digits vanish outside positions ``I``."""
    s = np.zeros(1, dtype=np.int64)
    for i in I:
        s = (s[:, None] + np.arange(base, dtype=np.int64) * base**i).ravel()
    return np.sort(s)


def xy_alpha(base: int, code_len: int, code_delta: float) -> int:
    """``ceil(2^(delta t/2) * m^((1 - delta/2) t))``, tolerant to float noise."""
    val = 2 ** (code_delta * code_len / 2) * base ** ((1 - code_delta / 2) * code_len)
    return math.ceil(val * (1 - _TOL))


@dataclass
class XYFamily:
    base: int
    code: CodeFamily
    sigma: int
    alpha: int
    X_sets: list[SparseSet] = field(repr=False)
    Y_sets: list[SparseSet] = field(repr=False)

    @property
    def g(self) -> int:
        return self.code.g

    @property
    def root(self) -> int:
        return math.isqrt(self.sigma)


def check_xy_family(fam: XYFamily) -> None:
    """Brute-force check of sizes, matched sumsets and crossed sumsets."""
    inf = float("inf")
    for i, (X, Y) in enumerate(zip(fam.X_sets, fam.Y_sets)):
        if len(X) != fam.root or len(Y) != fam.root:
            raise AssertionError(f"family member {i} has size {len(X)}/{len(Y)}, expected {fam.root}")
        if len(brute_sumset(X, Y, -inf, inf)) != fam.sigma:
            raise AssertionError(f"|X_{i} + Y_{i}| != sigma")
    for i, X in enumerate(fam.X_sets):
        for j, Y in enumerate(fam.Y_sets):
            if i != j and len(brute_sumset(X, Y, -inf, inf)) > fam.alpha:
                raise AssertionError(f"|X_{i} + Y_{j}| exceeds alpha = {fam.alpha}")


def build_xy_family(base: int, code: CodeFamily, verify: bool | None = None) -> XYFamily:
    if base < 2:
        raise ValueError("base must be >= 2")
    t = code.code_len
    sigma = base**t
    if sigma >= 2**62:
        raise OverflowError(f"base^code_len = {sigma} does not fit in 62 bits")
    full = set(range(t))
    X_sets, Y_sets = [], []
    for I in code.index_sets():
        X_sets.append(SparseSet(digit_set(I, base).tolist()))
        Y_sets.append(SparseSet(digit_set(sorted(full - set(I)), base).tolist()))
    fam = XYFamily(base, code, sigma, xy_alpha(base, t, code.code_delta), X_sets, Y_sets)
    if verify if verify is not None else sigma <= VERIFY_SIGMA:
        check_xy_family(fam)
    return fam


@dataclass(frozen=True)
class HardInstance:
    instance: Instance
    g: int
    sigma: int
    alpha: int
    M: int

    @property
    def out_bound(self) -> int:
        return self.g**2 * self.alpha + 2 * self.sigma + 1

    @property
    def cost_bound(self) -> float:
        """Every rectangle covering costs at least this much."""
        return self.g * self.sigma / 4


def _even_shift(i: int) -> int:
    return i if i % 2 == 0 else 0


def build_hard_instance(fam: XYFamily, verify: bool | None = None) -> HardInstance:
    """Prefix instance whose rectangle coverings all cost ``>= g*sigma/4``.

    Block ``i`` of ``A`` is ``X_i`` shifted by ``i M^2 + E(i) M`` and block
    ``j`` of ``B`` is ``Y_j`` shifted by ``(g - j) M^2``; only odd diagonal
    blocks land in ``[u]``.
    """
    g, sigma = fam.g, fam.sigma
    if g < 2:
        raise ValueError("the hard instance needs at least two codewords")
    M = 100 * (sigma + g)
    u = g * M * M + 2 * sigma
    if u >= 2**62:
        raise OverflowError("hard instance does not fit in 62 bits")
    A_blocks = [np.asarray(X, dtype=np.int64) + (i * M * M + _even_shift(i) * M) for i, X in enumerate(fam.X_sets, 1)]
    B_blocks = [np.asarray(Y, dtype=np.int64) + (g - j) * M * M for j, Y in enumerate(fam.Y_sets, 1)]
    A = SparseSet(np.concatenate(A_blocks).tolist())
    B = SparseSet(np.concatenate(B_blocks[::-1]).tolist())
    hard = HardInstance(Instance(A, B, 0, u), g, sigma, fam.alpha, M)
    root = math.isqrt(sigma)
    if len(A) != g * root or len(B) != g * root:
        raise AssertionError("hard instance block sizes are off")
    if verify if verify is not None else sigma <= VERIFY_SIGMA:
        for i, (a, b) in enumerate(zip(A_blocks, B_blocks), 1):
            s = brute_sumset(a.tolist(), b.tolist(), 0, u)
            if i % 2 == 0 and len(s):
                raise AssertionError(f"even diagonal block {i} reaches [u]")
            if i % 2 == 1 and (len(s) != sigma or s[0] < g * M * M or s[-1] > g * M * M + 2 * sigma):
                raise AssertionError(f"odd diagonal block {i} leaves [gM^2, gM^2 + 2 sigma]")
        out = len(brute_sumset(A, B, 0, u))
        if out > hard.out_bound:
            raise AssertionError(f"out = {out} exceeds g^2 alpha + 2 sigma + 1 = {hard.out_bound}")
    return hard


def lower_bound_exponent(code_delta: float, base: int) -> float:
    """Exponent ``c`` with covering cost ``Omega(out^c)`` on the hard family."""
    if not 0 < code_delta < 0.5:
        raise ValueError("code_delta must lie in (0, 1/2)")
    if base < 2:
        raise ValueError("base must be >= 2")
    h = binary_entropy(code_delta)
    lm = math.log2(base)
    num = (1 - h) + lm
    den = max((2 - 2 * h + code_delta / 2) + (1 - code_delta / 2) * lm, lm)
    return num / den


# --------------------------------------------------------------------------
# hardness-reduction encoders


def _shifted(A: list[int], B: list[int], lo: int, hi: int) -> tuple[Instance, int, int]:
    sa, sb = -min(A), -min(B)
    inst = Instance(
        SparseSet(sorted(a + sa for a in A)),
        SparseSet(sorted(b + sb for b in B)),
        lo + sa + sb,
        hi + sa + sb,
    )
    return inst, sa, sb


def bmm_sets(Abar, Bbar) -> tuple[Instance, int]:
    """Signed instance for the Boolean product of two ``n x n`` 0/1 matrices."""
    Abar = np.asarray(Abar, dtype=np.int64)
    Bbar = np.asarray(Bbar, dtype=np.int64)
    n = Abar.shape[0]
    if n < 1 or Abar.shape != (n, n) or Bbar.shape != (n, n):
        raise ValueError("expected two square matrices of the same size")
    M = 10 * (n * n + n) + 1
    A = [r * M * M + int(Abar[i - 1, r - 1]) * M + i for i in range(1, n + 1) for r in range(1, n + 1)]
    B = [-r * M * M + int(Bbar[r - 1, j - 1]) * M + n * j for r in range(1, n + 1) for j in range(1, n + 1)]
    inst = Instance(SparseSet(sorted(A), signed=True), SparseSet(sorted(B), signed=True), 2 * M + n + 1, 2 * M + n * n + n)
    return inst, M


def encode_bmm(Abar, Bbar) -> tuple[Instance, Callable[[Sequence[int]], np.ndarray]]:
    """Shifted non-negative instance and decoder for the Boolean product.

    ``decode`` takes ``(A+B) ∩ [lo, hi]`` of the returned instance and
    yields ``C`` with ``C_ij = 1`` iff ``2M + i + n j`` is a sum.
    """
    signed, M = bmm_sets(Abar, Bbar)
    n = np.asarray(Abar).shape[0]
    inst, sa, sb = _shifted(list(signed.A), list(signed.B), signed.lo, signed.hi)

    def decode(sums) -> np.ndarray:
        present = {int(s) - sa - sb for s in sums}
        C = np.zeros((n, n), dtype=np.int64)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                C[i - 1, j - 1] = (2 * M + i + n * j) in present
        return C

    return inst, decode


def naive_boolean_product(Abar, Bbar) -> np.ndarray:
    a = np.asarray(Abar, dtype=np.int64)
    b = np.asarray(Bbar, dtype=np.int64)
    return (a @ b > 0).astype(np.int64)


def encode_swhd(text: Sequence, pattern: Sequence) -> tuple[Instance, Callable[[SparseVec], list[int]]]:
    """Instance and decoder for sliding-window Hamming distance.

    ``text`` has length ``2n`` and ``pattern`` length ``n``; symbols may be
    any hashable, orderable values.  ``decode`` takes the convolution of the
    indicator vectors on ``[lo, hi]`` and returns the distance of the
    pattern to the window at every offset ``1..n``.
    """
    n = len(pattern)
    if n < 1 or len(text) != 2 * n:
        raise ValueError("text must be exactly twice as long as a non-empty pattern")
    alphabet = {s: k for k, s in enumerate(sorted(set(text) | set(pattern)))}
    M = 100 * n
    A = [M * alphabet[text[i - 1]] + i for i in range(1, 2 * n + 1)]
    B = [-M * alphabet[pattern[j - 1]] - j for j in range(1, n + 1)]
    inst, sa, sb = _shifted(A, B, 1, n)

    def decode(vec: SparseVec) -> list[int]:
        mult = dict(vec)
        return [n - mult.get(x + sa + sb, 0) for x in range(1, n + 1)]

    return inst, decode


def naive_swhd(text: Sequence, pattern: Sequence) -> list[int]:
    """Distances of ``pattern`` to ``text[x : x + n]`` for ``x = 1..n``."""
    n = len(pattern)
    return [sum(text[x + j] != pattern[j] for j in range(n)) for x in range(1, n + 1)]
