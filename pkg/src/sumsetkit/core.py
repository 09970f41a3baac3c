"""Domain types, brute-force oracles and covering validation.

Sets are sorted tuples of integers; vectors are sorted tuples of
``(index, value)`` pairs with positive integer values.  Index rectangles
are 1-based and inclusive, matching the convention ``A_1 < A_2 < ... < A_n``.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

DEFAULT_VALUE_BOUND = 2**62 - 1


class SparseSet(tuple):
    """Strictly increasing tuple of integers.

    Non-negative unless ``signed=True``; signed sets only appear in the
    hardness encoders.
    """

    __slots__ = ()

    def __new__(cls, elements: Iterable[int] = (), *, signed: bool = False):
        items = tuple(int(x) for x in elements)
        for a, b in zip(items, items[1:]):
            if a >= b:
                raise ValueError(f"set elements must be strictly increasing: {a} >= {b}")
        if items and not signed and items[0] < 0:
            raise ValueError(f"negative element {items[0]} in unsigned set")
        return super().__new__(cls, items)

    @classmethod
    def of(cls, elements: Iterable[int], *, signed: bool = False) -> "SparseSet":
        """Build from any iterable, sorting and removing duplicates."""
        if isinstance(elements, np.ndarray):
            return cls(np.unique(elements).tolist(), signed=signed)
        return cls(sorted(set(int(x) for x in elements)), signed=signed)

    def array(self) -> np.ndarray:
        return np.asarray(self, dtype=np.int64)

    def __repr__(self) -> str:
        return f"SparseSet({list(self)})"


class SparseVec(tuple):
    """Strictly increasing ``(index, value)`` pairs with positive values."""

    __slots__ = ()

    def __new__(cls, entries: Iterable[tuple[int, int]] = (), *, value_bound: int = DEFAULT_VALUE_BOUND):
        items = tuple((int(i), int(v)) for i, v in entries)
        prev = -1
        for i, v in items:
            if i <= prev:
                raise ValueError(f"vector indices must be strictly increasing and non-negative (at {i})")
            if v <= 0:
                raise ValueError(f"vector values must be positive (index {i} has {v})")
            if v > value_bound:
                raise OverflowError(f"value {v} at index {i} exceeds value_bound {value_bound}")
            prev = i
        return super().__new__(cls, items)

    @classmethod
    def from_dict(cls, d: dict[int, int]) -> "SparseVec":
        return cls(sorted((i, v) for i, v in d.items() if v))

    @classmethod
    def indicator(cls, s: Iterable[int]) -> "SparseVec":
        return cls((x, 1) for x in s)

    @property
    def support(self) -> SparseSet:
        return SparseSet(i for i, _ in self)

    def indices(self) -> np.ndarray:
        return np.fromiter((i for i, _ in self), dtype=np.int64, count=len(self))

    def values(self) -> np.ndarray:
        return np.fromiter((v for _, v in self), dtype=np.int64, count=len(self))

    def mass(self) -> int:
        return sum(v for _, v in self)

    def restrict(self, lo: int, hi: int) -> "SparseVec":
        return SparseVec((i, v) for i, v in self if lo <= i <= hi)

    def __repr__(self) -> str:
        return f"SparseVec({list(self)})"


class IndexRect(NamedTuple):
    """Pair of 1-based inclusive index intervals into sorted A and B."""

    i_lo: int
    i_hi: int
    j_lo: int
    j_hi: int

    @property
    def rows(self) -> int:
        return self.i_hi - self.i_lo + 1

    @property
    def cols(self) -> int:
        return self.j_hi - self.j_lo + 1

    def check(self, n: int, m: int) -> None:
        if not (1 <= self.i_lo <= self.i_hi <= n and 1 <= self.j_lo <= self.j_hi <= m):
            raise ValueError(f"{self} is empty or out of bounds for a {n}x{m} grid")


@dataclass
class Covering:
    """Collection of index rectangles together with known sumsets.

    ``sumsets`` caches ``A_I + B_J`` for rectangles whose sumset was already
    computed during construction, so the solver does not redo the work.
    """

    rects: list[IndexRect] = field(default_factory=list)
    is_unique: bool = True
    is_rectangle: bool = True
    cost: int | None = None
    sumsets: dict[IndexRect, np.ndarray] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.rects)

    def __iter__(self):
        return iter(self.rects)

    @classmethod
    def whole_grid(cls, n: int, m: int) -> "Covering":
        return cls([IndexRect(1, n, 1, m)])

    def dump(self) -> str:
        """One ``I_lo I_hi J_lo J_hi`` line per rectangle."""
        return "".join(f"{r.i_lo} {r.i_hi} {r.j_lo} {r.j_hi}\n" for r in self.rects)


@dataclass(frozen=True)
class Instance:
    A: SparseSet
    B: SparseSet
    lo: int
    hi: int
    out_estimate: int | None = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty restriction interval [{self.lo}, {self.hi}]")

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def m(self) -> int:
        return len(self.B)

    @property
    def is_empty(self) -> bool:
        return not self.A or not self.B


@dataclass
class ValidationReport:
    covering: bool
    unique: bool
    rectangle: bool
    cost: int
    uncovered: int = 0
    overcovered: int = 0

    @property
    def ok(self) -> bool:
        return self.covering and self.unique and self.rectangle


def brute_sumset(A: Iterable[int], B: Iterable[int], lo: int, hi: int) -> SparseSet:
    a = np.asarray(list(A), dtype=np.int64)
    b = np.asarray(list(B), dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return SparseSet()
    s = np.unique(np.add.outer(a, b))
    s = s[(s >= lo) & (s <= hi)]
    return SparseSet(s.tolist(), signed=bool(s.size and s[0] < 0))


def brute_convolve(f: SparseVec, g: SparseVec, lo: int, hi: int, *, value_bound: int = DEFAULT_VALUE_BOUND) -> SparseVec:
    out: dict[int, int] = {}
    for i, x in f:
        for j, y in g:
            s = i + j
            if lo <= s <= hi:
                out[s] = out.get(s, 0) + x * y
    for s, v in out.items():
        if v > value_bound:
            raise OverflowError(f"convolution value {v} at {s} exceeds value_bound {value_bound}")
    return SparseVec.from_dict(out)


def brute_subset_sums(X: Iterable[int], t: int) -> SparseSet:
    """Bellman's DP restricted to attainable sums, O(n * |S(X, t)|)."""
    sums = {0}
    for x in X:
        if x <= 0:
            raise ValueError(f"subset-sum items must be positive, got {x}")
        sums |= {s + x for s in sums if s + x <= t}
    return SparseSet(sorted(sums)) if t >= 0 else SparseSet()


def normalize(inst: Instance) -> Instance:
    """Drop elements that cannot take part in any sum <= hi."""
    if inst.is_empty:
        return inst
    minA, minB = inst.A[0], inst.B[0]
    A = inst.A[: bisect_right(inst.A, inst.hi - minB)]
    B = inst.B[: bisect_right(inst.B, inst.hi - minA)]
    signed = (A and A[0] < 0) or (B and B[0] < 0)
    return Instance(SparseSet(A, signed=signed), SparseSet(B, signed=signed), inst.lo, inst.hi, inst.out_estimate)


def rect_sumset(A, B, r: IndexRect) -> np.ndarray:
    a = np.asarray(A[r.i_lo - 1 : r.i_hi], dtype=np.int64)
    b = np.asarray(B[r.j_lo - 1 : r.j_hi], dtype=np.int64)
    return np.unique(np.add.outer(a, b))


def validate_covering(inst: Instance, cov: Covering) -> ValidationReport:
    """Exhaustive check of covering, uniqueness, rectangularity and cost.

    Quadratic in the grid size; meant for tests.
    """
    n, m = inst.n, inst.m
    counts = np.zeros((n, m), dtype=np.int64)
    rectangle = True
    cost = 0
    for r in cov.rects:
        if not isinstance(r, IndexRect):
            rectangle = False
            continue
        try:
            r.check(n, m)
        except ValueError:
            rectangle = False
            continue
        counts[r.i_lo - 1 : r.i_hi, r.j_lo - 1 : r.j_hi] += 1
        cost += len(rect_sumset(inst.A, inst.B, r))
    if n and m:
        sums = np.add.outer(np.asarray(inst.A, dtype=np.int64), np.asarray(inst.B, dtype=np.int64))
        live = (sums >= inst.lo) & (sums <= inst.hi)
    else:
        live = np.zeros((n, m), dtype=bool)
    uncovered = int(np.count_nonzero(live & (counts == 0)))
    over = int(np.count_nonzero(live & (counts > 1)))
    return ValidationReport(
        covering=uncovered == 0,
        unique=uncovered == 0 and over == 0,
        rectangle=rectangle,
        cost=cost,
        uncovered=uncovered,
        overcovered=over,
    )


def ruzsa_check(X, Y, Z, W) -> bool:
    """|X+Y| * |Z| * |W| <= |X+Z| * |Z+W| * |W+Y|, in exact integers."""
    inf = float("inf")

    def size(P, Q):
        return len(brute_sumset(P, Q, -inf, inf))

    return size(X, Y) * len(Z) * len(W) <= size(X, Z) * size(Z, W) * size(W, Y)


def index_interval(sorted_vals, lo: int, hi: int) -> tuple[int, int]:
    """1-based inclusive index range of elements within [lo, hi] (may be empty)."""
    return bisect_left(sorted_vals, lo) + 1, bisect_right(sorted_vals, hi)
