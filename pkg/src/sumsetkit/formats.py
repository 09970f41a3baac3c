"""Plain-text file formats for sets, vectors and subset-sum instances."""

from __future__ import annotations

from pathlib import Path

from .core import SparseSet, SparseVec

SET_HEADER = "# sparse-set v1"
VEC_HEADER = "# sparse-vec v1"
SUBSET_SUM_HEADER = "# subset-sum v1"


class FormatError(ValueError):
    pass


def _body(text: str, header: str) -> list[str]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != header:
        raise FormatError(f"expected header {header!r}")
    return [ln for ln in lines[1:] if not ln.startswith("#")]


def dumps_set(s: SparseSet) -> str:
    return "\n".join([SET_HEADER, *map(str, s)]) + "\n"


def loads_set(text: str) -> SparseSet:
    try:
        return SparseSet(int(ln) for ln in _body(text, SET_HEADER))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def dumps_vec(v: SparseVec) -> str:
    return "\n".join([VEC_HEADER, *(f"{i} {x}" for i, x in v)]) + "\n"


def loads_vec(text: str) -> SparseVec:
    entries = []
    for ln in _body(text, VEC_HEADER):
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"bad vector line {ln!r}")
        entries.append((int(parts[0]), int(parts[1])))
    try:
        return SparseVec(entries)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def dumps_subset_sum(X, t: int) -> str:
    return "\n".join([SUBSET_SUM_HEADER, f"t={t}", *map(str, X)]) + "\n"


def loads_subset_sum(text: str) -> tuple[SparseSet, int]:
    body = _body(text, SUBSET_SUM_HEADER)
    if not body or not body[0].startswith("t="):
        raise FormatError("missing t=<int> line")
    t = int(body[0][2:])
    items = sorted(int(ln) for ln in body[1:])
    if any(x <= 0 for x in items):
        raise FormatError("subset-sum items must be positive")
    return SparseSet.of(items), t


def read_set(path) -> SparseSet:
    return loads_set(Path(path).read_text())


def read_vec(path) -> SparseVec:
    return loads_vec(Path(path).read_text())
