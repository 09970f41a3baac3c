"""Exact output-sensitive sumsets and non-negative sparse convolution.

Three backends share one contract (always exact, only the running time is
random):

* ``brute``: all pairs.
* ``dense_transform``: one full-length number-theoretic transform.
* ``sparse_recovery``: hash indices modulo random primes, recover isolated
  output entries from an index-weighted second hash and peel them until the
  recovered mass equals ``sum(f) * sum(g)``.

All transforms are computed modulo three NTT-friendly primes and combined by
Garner's CRT, so results are bit-exact.  Work is measured in units of 1024
butterflies (or one recovered/emitted element); every backend is written as a
generator that announces the cost of its next chunk, which lets
:class:`SteppableCall` interleave many computations on one thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Generator

import numpy as np

from .core import DEFAULT_VALUE_BOUND, SparseSet, SparseVec

BLOCK = 1024
BRUTE_PAIRS = 1024
NTT_PRIMES = ((998244353, 3), (469762049, 3), (754974721, 11))
_P1, _P2, _P3 = (p for p, _ in NTT_PRIMES)
CRT_MODULUS = _P1 * _P2 * _P3
_INV_P1_MOD_P2 = pow(_P1, -1, _P2)
_INV_P1P2_MOD_P3 = pow(_P1 * _P2 % _P3, -1, _P3)
_INT64_SAFE = 2**62
DENSE_FALLBACK_LEN = 1 << 24

BACKENDS = ("auto", "brute", "dense_transform", "sparse_recovery")


class BudgetExceeded(RuntimeError):
    """Raised by :class:`WorkMeter` once its limit is passed."""


class WorkMeter:
    """Accumulates engine work units, optionally aborting past a limit."""

    def __init__(self, limit: float | None = None):
        self.total = 0
        self.limit = limit

    def charge(self, units: int) -> None:
        self.total += units
        if self.limit is not None and self.total > self.limit:
            raise BudgetExceeded(f"work {self.total} exceeds budget {self.limit}")


@dataclass(frozen=True)
class EngineConfig:
    backend: str = "auto"
    rng_seed: int = 0
    recovery_rounds_cap: int = 2
    bucket_constant: float = 2.0
    value_bound: int = DEFAULT_VALUE_BOUND

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; expected one of {BACKENDS}")
        if self.recovery_rounds_cap < 1:
            raise ValueError("recovery_rounds_cap must be >= 1")
        if self.bucket_constant < 2:
            raise ValueError("bucket_constant must be >= 2")


DEFAULT_CONFIG = EngineConfig()


# --------------------------------------------------------------------------
# number-theoretic transforms


def transform_units(size: int) -> int:
    return max(1, math.ceil((size // 2) * max(1, size.bit_length() - 1) / BLOCK))


def _next_pow2(x: int) -> int:
    return 1 << max(0, (x - 1).bit_length())


@lru_cache(maxsize=64)
def _tables(p: int, g: int, size: int):
    logn = size.bit_length() - 1
    rev = np.zeros(size, dtype=np.int64)
    for b in range(logn):
        rev |= ((np.arange(size) >> b) & 1) << (logn - 1 - b)

    def powers(w):
        half = max(1, size // 2)
        tw = np.ones(half, dtype=np.int64)
        k, wk = 1, w
        while k < half:
            tw[k : 2 * k] = tw[:k] * wk % p
            k, wk = 2 * k, wk * wk % p
        return tw

    w = pow(g, (p - 1) // size, p)
    return rev, powers(w), powers(pow(w, p - 2, p)), pow(size, p - 2, p)


def _ntt(a: np.ndarray, p: int, g: int, inverse: bool = False) -> np.ndarray:
    size = a.shape[0]
    rev, tw, itw, size_inv = _tables(p, g, size)
    twiddles = itw if inverse else tw
    a = a[rev]
    h = 1
    while h < size:
        blocks = a.reshape(-1, 2 * h)
        u = blocks[:, :h]
        v = blocks[:, h:] * twiddles[:: size // (2 * h)][:h] % p
        a = np.concatenate(((u + v) % p, (u - v) % p), axis=1).reshape(-1)
        h *= 2
    if inverse:
        a = a * size_inv % p
    return a


def _crt(residues, big: bool):
    """Garner reconstruction from residues modulo the leading NTT primes."""
    if len(residues) == 1:
        return residues[0].astype(object) if big else residues[0]
    r1, r2 = residues[0], residues[1]
    x2 = (r2 - r1 % _P2) % _P2 * _INV_P1_MOD_P2 % _P2
    t = r1 + _P1 * x2
    if len(residues) == 2:
        return t.astype(object) if big else t
    x3 = (residues[2] - t % _P3) % _P3 * _INV_P1P2_MOD_P3 % _P3
    if big:
        return t.astype(object) + (_P1 * _P2) * x3.astype(object)
    return t + (_P1 * _P2) * x3


def _primes_for(bound: int):
    """Fewest NTT primes whose product exceeds ``bound``."""
    prod = 1
    for k, (p, _) in enumerate(NTT_PRIMES):
        prod *= p
        if bound < prod:
            return NTT_PRIMES[: k + 1]
    raise OverflowError(f"values up to {bound} exceed the exact transform range")


def _residues(pos, val, weight, p, size):
    x = val % p
    if weight is not None:
        x = x * (weight % p) % p
    return np.bincount(pos, weights=x, minlength=size).astype(np.int64) % p


def _modular_products(inputs, terms, size, fold: int | None, bound: int):
    """Exact sums of linear (or length-``fold`` cyclic) convolution products.

    ``inputs`` is a list of ``(positions, values, weights)``; each term is a
    list of ``(x, y)`` index pairs into ``inputs`` whose products are summed.
    Every output value must be at most ``bound``.
    """
    primes = _primes_for(bound)
    per_prime = []
    for p, g in primes:
        spectra = [_ntt(_residues(pos, val, w, p, size), p, g) for pos, val, w in inputs]
        out = []
        for term in terms:
            acc = np.zeros(size, dtype=np.int64)
            for x, y in term:
                acc = (acc + spectra[x] * spectra[y]) % p
            c = _ntt(acc, p, g, inverse=True)
            if fold is not None:
                tail = c[fold : 2 * fold]
                c = c[:fold].copy()
                c[: tail.size] += tail
                c %= p
            out.append(c)
        per_prime.append(out)
    big = bound >= _INT64_SAFE
    return [_crt([r[k] for r in per_prime], big) for k in range(len(terms))]


def _transform_cost(n_inputs: int, n_terms: int, size: int, bound: int) -> int:
    return len(_primes_for(bound)) * (n_inputs + n_terms) * transform_units(size)


# --------------------------------------------------------------------------
# primes


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(lo: int, hi: int, rng: np.random.Generator) -> int:
    lo = max(lo, 2)
    hi = max(hi, lo + 1)
    while True:
        x = int(rng.integers(lo, hi + 1))
        if is_prime(x):
            return x


# --------------------------------------------------------------------------
# backends (generators yielding the cost of the next chunk)

Result = tuple[np.ndarray, np.ndarray]


def _brute_gen(fi, fv, gi, gv, big: bool) -> Generator[int, None, Result]:
    yield math.ceil(fi.size * gi.size / BLOCK)
    if big:
        fv, gv = fv.astype(object), gv.astype(object)
    s = np.add.outer(fi, gi).ravel()
    v = np.multiply.outer(fv, gv).ravel()
    order = np.argsort(s, kind="stable")
    s, v = s[order], v[order]
    starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    idx, vals = s[starts], np.add.reduceat(v, starts)
    yield idx.size
    return idx, vals


def _dense_gen(fi, fv, gi, gv, mass: int) -> Generator[int, None, Result]:
    length = int(fi[-1]) + int(gi[-1]) + 1
    size = _next_pow2(length)
    yield _transform_cost(2, 1, size, mass)
    (c,) = _modular_products([(fi, fv, None), (gi, gv, None)], [[(0, 1)]], size, None, mass)
    c = c[:length]
    idx = np.flatnonzero(c != 0)
    vals = c[idx]
    yield idx.size
    return idx.astype(np.int64), vals


def _hash(fi, fv, gi, gv, p: int, bound: int):
    size = _next_pow2(2 * p - 1)
    inputs = [(fi % p, fv, None), (fi % p, fv, fi), (gi % p, gv, None), (gi % p, gv, gi)]
    c0, c1 = _modular_products(inputs, [[(0, 2)], [(1, 2), (0, 3)]], size, p, bound)
    return c0, c1


def _square_hash(fi, fv, gi, gv, p: int):
    """Index-squared weighted hash, modulo the first NTT prime only."""
    size = _next_pow2(2 * p - 1)
    q = _P1
    f1, g1 = fi % q, gi % q
    inputs = [
        (fi % p, fv, None), (fi % p, fv, f1), (fi % p, fv, f1 * f1 % q),
        (gi % p, gv, None), (gi % p, gv, g1), (gi % p, gv, g1 * g1 % q),
    ]
    (c2,) = _modular_products(inputs, [[(2, 3), (1, 4), (1, 4), (0, 5)]], size, p, 1)
    return c2


def _hash_recovered(hs, hv, p: int, big: bool):
    if big:
        h0 = np.zeros(p, dtype=object)
        h1 = np.zeros(p, dtype=object)
        for s, v in zip(hs.tolist(), hv.tolist()):
            h0[s % p] += v
            h1[s % p] += s * v
        return h0, h1
    h0 = np.zeros(p, dtype=np.int64)
    h1 = np.zeros(p, dtype=np.int64)
    np.add.at(h0, hs % p, hv)
    np.add.at(h1, hs % p, hs * hv)
    return h0, h1


def _square_recovered(hs, hv, p: int):
    h2 = np.zeros(p, dtype=np.int64)
    if hs.size:
        w = hs % _P1
        np.add.at(h2, hs % p, (np.asarray(hv % _P1, dtype=np.int64) * (w * w % _P1)) % _P1)
    return h2 % _P1


def _sparse_gen(fi, fv, gi, gv, mass: int, big: bool, cfg: EngineConfig) -> Generator[int, None, Result]:
    rng = np.random.default_rng(cfg.rng_seed)
    top = int(fi[-1]) + int(gi[-1])
    logf = math.log2(top + 2)
    C = cfg.bucket_constant
    bound = (top + 1) * mass
    dtype = object if big else np.int64
    hs = np.zeros(0, dtype=np.int64)
    hv = np.zeros(0, dtype=dtype)
    k, rounds_at_k = 2, 0
    while True:
        width = math.ceil(C * k * logf)
        if 2 * width >= top + 1:
            return (yield from _dense_gen(fi, fv, gi, gv, mass))
        p = random_prime(width, 2 * width, rng)
        yield _transform_cost(4, 2, _next_pow2(2 * p - 1), bound) + _transform_cost(6, 1, _next_pow2(2 * p - 1), 1)
        c0, c1 = _hash(fi, fv, gi, gv, p, bound)
        c2 = _square_hash(fi, fv, gi, gv, p)
        h0, h1 = _hash_recovered(hs, hv, p, big)
        h2 = _square_recovered(hs, hv, p)
        r0, r1 = c0 - h0, c1 - h1
        if (r0 < 0).any() or (r1 < 0).any():
            hs, hv = hs[:0], hv[:0]
            continue
        buckets = np.flatnonzero(r0 > 0)
        found = 0
        if buckets.size:
            b0, b1 = r0[buckets], r1[buckets]
            b2 = (c2[buckets] - h2[buckets]) % _P1
            # Cauchy-Schwarz: b0 * b2 == b1 ** 2 only if the bucket holds one index
            m0, m1 = b0 % _P1, b1 % _P1
            ok = ((m0 * b2 - m1 * m1) % _P1 == 0).astype(bool)
            ok &= (b1 % b0 == 0).astype(bool)
            s = b1 // b0
            ok &= ((s % p) == buckets).astype(bool) & (s <= top).astype(bool)
            new_s = s[ok].astype(np.int64)
            new_v = b0[ok]
            found = new_s.size
            if found:
                yield found
                hs = np.concatenate((hs, new_s))
                hv = np.concatenate((hv, new_v.astype(dtype)))
                order = np.argsort(hs, kind="stable")
                hs, hv = hs[order], hv[order]
                starts = np.flatnonzero(np.r_[True, hs[1:] != hs[:-1]])
                hs, hv = hs[starts], np.add.reduceat(hv, starts) if hv.size else hv
        remaining = mass - int(hv.sum())
        if remaining < 0:
            hs, hv = hs[:0], hv[:0]
            continue
        if remaining == 0:
            vwidth = math.ceil(C * max(2, hs.size) * logf)
            if 2 * vwidth >= top + 1:
                dense = yield from _dense_gen(fi, fv, gi, gv, mass)
                if np.array_equal(dense[0], hs) and all(np.asarray(dense[1] == hv, dtype=bool)):
                    return hs, hv
                return dense
            q = random_prime(vwidth, 2 * vwidth, rng)
            yield _transform_cost(4, 2, _next_pow2(2 * q - 1), bound)
            c0, c1 = _hash(fi, fv, gi, gv, q, bound)
            h0, h1 = _hash_recovered(hs, hv, q, big)
            if np.asarray(c0 == h0, dtype=bool).all() and np.asarray(c1 == h1, dtype=bool).all():
                return hs, hv
            hs, hv = hs[:0], hv[:0]
            continue
        rounds_at_k += 1
        if found == 0 or rounds_at_k >= cfg.recovery_rounds_cap:
            k, rounds_at_k = 2 * k, 0


def _choose_backend(n: int, m: int, top: int, mass: int, cfg: EngineConfig) -> str:
    if cfg.backend == "sparse_recovery" and (top + 1) * mass >= CRT_MODULUS:
        # the index-weighted hash would not fit the exact transform range
        return "dense_transform" if top < DENSE_FALLBACK_LEN else "brute"
    if cfg.backend != "auto":
        return cfg.backend
    if n * m <= BRUTE_PAIRS:
        return "brute"
    if (top + 1) * mass >= CRT_MODULUS:
        return "dense_transform" if top < DENSE_FALLBACK_LEN else "brute"
    costs = {
        "brute": math.ceil(n * m / BLOCK),
        "dense_transform": _transform_cost(2, 1, _next_pow2(top + 1), mass),
    }
    guess = min(n * m, top + 1)
    width = math.ceil(cfg.bucket_constant * guess * math.log2(top + 2))
    size = _next_pow2(4 * width)
    costs["sparse_recovery"] = 2 * (_transform_cost(4, 2, size, (top + 1) * mass) + _transform_cost(6, 1, size, 1))
    return min(costs, key=costs.get)


def _conv_gen(fi, fv, gi, gv, cfg: EngineConfig) -> Generator[int, None, Result]:
    """Shift to zero offsets, dispatch, and check the mass certificate."""
    mass = int(fv.sum()) * int(gv.sum())
    if mass >= CRT_MODULUS:
        raise OverflowError(f"total mass {mass} exceeds the exact transform range")
    off_f, off_g = int(fi[0]), int(gi[0])
    fi, gi = fi - off_f, gi - off_g
    top = int(fi[-1]) + int(gi[-1])
    big = (top + 1) * mass >= _INT64_SAFE
    backend = _choose_backend(fi.size, gi.size, top, mass, cfg)
    if backend == "brute":
        idx, vals = yield from _brute_gen(fi, fv, gi, gv, big)
    elif backend == "dense_transform":
        idx, vals = yield from _dense_gen(fi, fv, gi, gv, mass)
    else:
        idx, vals = yield from _sparse_gen(fi, fv, gi, gv, mass, big, cfg)
    total = int(vals.sum()) if vals.size else 0
    assert total == mass, f"mass certificate failed: {total} != {mass}"
    if vals.size and int(vals.max()) > cfg.value_bound:
        raise OverflowError(f"convolution value {int(vals.max())} exceeds value_bound {cfg.value_bound}")
    return idx + (off_f + off_g), vals


def _drive(gen, meter: WorkMeter | None):
    try:
        cost = next(gen)
        while True:
            if meter is not None:
                meter.charge(cost)
            cost = gen.send(None)
    except StopIteration as stop:
        return stop.value


def _as_array(x) -> np.ndarray:
    return x if isinstance(x, np.ndarray) else np.asarray(x, dtype=np.int64)


def convolve_arrays(fi, fv, gi, gv, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> Result:
    fi, fv, gi, gv = map(_as_array, (fi, fv, gi, gv))
    if fi.size == 0 or gi.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return _drive(_conv_gen(fi, fv, gi, gv, cfg), meter)


def _ones(n: int) -> np.ndarray:
    return np.ones(n, dtype=np.int64)


def _sumset_by_pairs(a: np.ndarray, b: np.ndarray, cfg: EngineConfig) -> bool:
    if cfg.backend == "brute":
        return True
    if cfg.backend != "auto":
        return False
    top = int(a[-1] - a[0]) + int(b[-1] - b[0])
    return _choose_backend(a.size, b.size, top, a.size * b.size, cfg) == "brute"


def sumset_arrays(a, b, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> np.ndarray:
    a, b = _as_array(a), _as_array(b)
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    if _sumset_by_pairs(a, b, cfg):
        # same work accounting as _brute_gen, without the value bookkeeping
        if meter is not None:
            meter.charge(math.ceil(a.size * b.size / BLOCK))
        out = np.unique(np.add.outer(a, b))
        if meter is not None:
            meter.charge(out.size)
        return out
    idx, _ = _drive(_conv_gen(a, _ones(a.size), b, _ones(b.size), cfg), meter)
    return idx


def sumset(A, B, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseSet:
    if not A or not B:
        raise ValueError("sumset needs non-empty inputs")
    return SparseSet(sumset_arrays(A, B, cfg, meter).tolist())


def convolve(f: SparseVec, g: SparseVec, cfg: EngineConfig = DEFAULT_CONFIG, meter: WorkMeter | None = None) -> SparseVec:
    if not f or not g:
        raise ValueError("convolve needs non-empty inputs")
    idx, vals = convolve_arrays(f.indices(), f.values(), g.indices(), g.values(), cfg, meter)
    return SparseVec(zip(idx.tolist(), vals.tolist()), value_bound=cfg.value_bound)


# --------------------------------------------------------------------------
# cooperative execution


class SteppableCall:
    """A sumset computation that advances only when given work budget.

    Cumulative work never exceeds the cumulative budget handed to
    :meth:`step`; a chunk that costs more than one step's budget runs once
    enough credit has accumulated.
    """

    def __init__(self, gen):
        self._gen = gen
        self._credit = 0
        self.work_done = 0
        self.state = "in_progress"
        self.array: np.ndarray | None = None
        try:
            self._pending = next(gen)
        except StopIteration as stop:
            self._finish(stop.value)

    def _finish(self, value):
        self.array = value[0] if isinstance(value, tuple) else value
        self.state = "finished"
        self._gen = None

    @property
    def result(self) -> SparseSet | None:
        return None if self.array is None else SparseSet(self.array.tolist())

    def step(self, budget: int) -> str:
        if self.state != "in_progress":
            raise RuntimeError(f"cannot step a {self.state} call")
        if budget < 1:
            raise ValueError("budget must be >= 1")
        self._credit += budget
        while self._credit >= self._pending:
            self._credit -= self._pending
            self.work_done += self._pending
            try:
                self._pending = self._gen.send(None)
            except StopIteration as stop:
                self._finish(stop.value)
                break
        return self.state

    def cancel(self) -> None:
        if self._gen is not None:
            self._gen.close()
            self._gen = None
        if self.state == "in_progress":
            self.state = "cancelled"


def _sumset_gen(a, b, cfg):
    if _sumset_by_pairs(a, b, cfg):
        yield math.ceil(a.size * b.size / BLOCK)
        out = np.unique(np.add.outer(a, b))
        yield out.size
        return out
    idx, _ = yield from _conv_gen(a, _ones(a.size), b, _ones(b.size), cfg)
    return idx


def start_sumset(A, B, cfg: EngineConfig = DEFAULT_CONFIG) -> SteppableCall:
    a, b = _as_array(A), _as_array(B)
    if a.size == 0 or b.size == 0:
        raise ValueError("sumset needs non-empty inputs")
    return SteppableCall(_sumset_gen(a, b, cfg))


def step(call: SteppableCall, budget: int) -> str:
    return call.step(budget)


def cancel(call: SteppableCall) -> None:
    call.cancel()
