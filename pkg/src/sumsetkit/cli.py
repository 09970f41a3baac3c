"""Benchmark harness: generate instances, run algorithms, emit reports.

Arguments are ``key=value`` tokens, for example::

    sumsetkit gen=uniform n=64 m=64 u=4096 algo=prefix43 oracle=on trials=50 seed=7

One report row is written per trial, in CSV (default) or JSON lines.  The
exit code is 2 for bad arguments, 1 if any oracle check failed, else 0.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .adversarial import build_hard_instance, build_xy_family, greedy_code, lower_bound_exponent
from .core import Instance, SparseSet, brute_subset_sums, brute_sumset, normalize
from .engine import DEFAULT_CONFIG, WorkMeter
from .interval import find_interval_covering, sumset_over_covering, trim
from .output_size import approx_out
from .prefix import covering_construction, prefix_estimate
from .relaxed import find_relaxed_covering
from .subset_sum import RunStats, SSParams, subset_sums, subset_sums_relaxed
from .topk import top_k_sumset

REPORT_HEADER = "# sumset-kit report v1"
GENERATORS = ("uniform", "clustered", "progression", "hard", "twoshift")
ALGORITHMS = ("prefix43", "interval", "relaxed", "topk", "subsetsum", "subsetsum_relaxed", "exponent")

USAGE = f"""usage: sumsetkit key=value ...

  gen      {' | '.join(GENERATORS)}   (default uniform)
  algo     {' | '.join(ALGORITHMS)}   (required)
  n, m     set sizes (default 64)         u    upper end (default 4096)
  lo       lower end for algo=interval    k    top-k size (default 16)
  t        subset-sum target (default u)  zeta relaxation in (0, 1] (default 0.5)
  base, codelen, delta                    hard-instance / exponent parameters
  trials   number of seeded runs (default 1)
  seed     base seed (default $SUMSETKIT_SEED or 0)
  oracle   on | off (default off)         format csv | jsonl (default csv)
  out_file write reports here instead of stdout
"""


class UsageError(ValueError):
    pass


@dataclass
class RunReport:
    gen: str
    params: str
    seed: int
    trial: int
    algo: str
    n: int
    m: int
    out: int
    out_est: int | None
    cost: int | None
    work: int
    wall_ms: float
    correct: bool | None = None
    lower_bound: float | None = None

    def row(self) -> dict:
        return asdict(self)


REPORT_FIELDS = tuple(f.name for f in fields(RunReport))


# --------------------------------------------------------------------------
# generators


def gen_uniform(rng: np.random.Generator, n: int, m: int, u: int) -> tuple[np.ndarray, np.ndarray]:
    return (
        np.unique(rng.integers(0, u + 1, size=n)),
        np.unique(rng.integers(0, u + 1, size=m)),
    )


def gen_clustered(rng: np.random.Generator, n: int, m: int, u: int, clusters: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """A few dense blocks of consecutive integers at random positions."""

    def one(size):
        width = max(1, size // clusters)
        starts = rng.integers(0, max(1, u - width) + 1, size=clusters)
        x = (starts[:, None] + np.arange(width)).ravel()
        return np.unique(x[x <= u])

    return one(n), one(m)


def gen_progression(rng: np.random.Generator, n: int, m: int, u: int) -> tuple[np.ndarray, np.ndarray]:
    """Arithmetic progressions with a shared random step."""
    step = int(rng.integers(1, max(1, u // max(n, m, 1)) + 1))
    a0, b0 = (int(v) for v in rng.integers(0, step, size=2))
    return (
        np.arange(a0, u + 1, step, dtype=np.int64)[:n],
        np.arange(b0, u + 1, step, dtype=np.int64)[:m],
    )


def gen_twoshift(rng: np.random.Generator, n: int, m: int, u: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense block at 0 plus a block near ``u`` in each set.

    The high blocks of ``A`` (step ``h``) and ``B`` (step 1) add up to
    ``h^2`` distinct sums, all above ``u``, so computing ``A+B`` and then
    discarding wastes a constant fraction of the work.
    """
    ha, hb = max(1, n // 2), max(1, m // 2)
    A = np.r_[np.arange(ha), u - ha * hb + hb * np.arange(ha)]
    B = np.r_[np.arange(hb), u - hb + 1 + np.arange(hb)]
    jitter = int(rng.integers(0, 2))
    return np.unique(np.clip(A + jitter, 0, u)), np.unique(np.clip(B, 0, u))


_SIMPLE = {
    "uniform": gen_uniform,
    "clustered": gen_clustered,
    "progression": gen_progression,
    "twoshift": gen_twoshift,
}


# --------------------------------------------------------------------------
# argument handling


_INT = ("n", "m", "u", "lo", "k", "t", "base", "codelen", "trials", "seed")
_FLOAT = ("zeta", "delta")
_CHOICE = {
    "gen": GENERATORS,
    "algo": ALGORITHMS,
    "oracle": ("on", "off"),
    "format": ("csv", "jsonl"),
}
_STR = ("out_file",)


def parse_args(argv: Sequence[str], env: dict | None = None) -> dict:
    env = os.environ if env is None else env
    opts: dict = {}
    for tok in argv:
        key, sep, val = tok.partition("=")
        key = key.lstrip("-")
        if not sep:
            raise UsageError(f"expected key=value, got {tok!r}")
        if key in opts:
            raise UsageError(f"duplicate flag {key!r}")
        try:
            if key in _INT:
                opts[key] = int(val)
            elif key in _FLOAT:
                opts[key] = float(val)
            elif key in _CHOICE:
                if val not in _CHOICE[key]:
                    raise UsageError(f"{key} must be one of {', '.join(_CHOICE[key])}")
                opts[key] = val
            elif key in _STR:
                opts[key] = val
            else:
                raise UsageError(f"unknown flag {key!r}")
        except ValueError as e:
            if isinstance(e, UsageError):
                raise
            raise UsageError(f"bad value for {key}: {val!r}") from None
    if "algo" not in opts:
        raise UsageError("algo is required")
    if "seed" not in opts:
        try:
            opts["seed"] = int(env.get("SUMSETKIT_SEED", 0))
        except ValueError:
            raise UsageError("SUMSETKIT_SEED must be an integer") from None
    d = dict(gen="uniform", n=64, m=64, u=4096, lo=0, k=16, zeta=0.5, base=2, codelen=6, delta=0.3, trials=1, oracle="off", format="csv")
    d.update(opts)
    d.setdefault("t", d["u"])
    for key in ("n", "m", "k", "trials", "base", "codelen"):
        if d[key] < 1:
            raise UsageError(f"{key} must be positive")
    if d["u"] < 0 or d["t"] < 0:
        raise UsageError("u and t must be non-negative")
    if not d["lo"] <= d["u"]:
        raise UsageError("need lo <= u")
    if not 0 < d["zeta"] <= 1:
        raise UsageError("zeta must lie in (0, 1]")
    return d


def _descriptor(d: dict) -> str:
    if d["gen"] == "hard":
        keys = ("base", "codelen", "delta")
    else:
        keys = ("n", "m", "u") + (("lo",) if d["algo"] == "interval" else ())
    return " ".join(f"{k}={d[k]}" for k in keys)


# --------------------------------------------------------------------------
# runs


def _instance(d: dict, rng: np.random.Generator) -> tuple[Instance, float | None]:
    if d["gen"] == "hard":
        fam = build_xy_family(d["base"], greedy_code(d["codelen"], d["delta"]))
        hard = build_hard_instance(fam)
        return hard.instance, hard.cost_bound
    a, b = _SIMPLE[d["gen"]](rng, d["n"], d["m"], d["u"])
    return Instance(SparseSet(a.tolist()), SparseSet(b.tolist()), d["lo"], d["u"]), None


def _run_covering(d: dict, inst: Instance, meter: WorkMeter) -> tuple[np.ndarray, int, int]:
    algo = d["algo"]
    hi = inst.hi
    lo = inst.lo if algo == "interval" else 0
    a, b = trim(inst.A.array(), inst.B.array(), hi)
    if a.size == 0:
        return a, 0, 0
    if algo == "prefix43":
        est = prefix_estimate(a, b, hi, DEFAULT_CONFIG, meter)
        cov = covering_construction(a, b, hi, est, DEFAULT_CONFIG, meter)
    elif algo == "interval":
        est = approx_out(a, b, lo, hi)
        cov = find_interval_covering(a, b, lo, hi, est)
    else:
        est = None
        cov = find_relaxed_covering(a, b, hi, d["zeta"])
    out = sumset_over_covering(a, b, cov, lo, hi, DEFAULT_CONFIG, meter)
    return out, est, cov.cost


def run_trial(d: dict, trial: int) -> RunReport:
    seed = d["seed"] + trial
    rng = np.random.default_rng(seed)
    algo = d["algo"]
    oracle = d["oracle"] == "on"
    meter = WorkMeter()
    correct = None
    t0 = time.perf_counter()
    if algo in ("subsetsum", "subsetsum_relaxed"):
        X = np.unique(rng.integers(1, max(d["u"], 1) + 1, size=d["n"]))
        params = SSParams(rng_seed=seed)
        rs = RunStats()
        if algo == "subsetsum":
            S = subset_sums(X.tolist(), d["t"], params, stats=rs)
        else:
            S = subset_sums_relaxed(X.tolist(), d["t"], d["zeta"], params, stats=rs)
        wall = (time.perf_counter() - t0) * 1000
        if oracle:
            correct = S == brute_subset_sums(X.tolist(), d["t"])
        return RunReport(d["gen"], f"n={d['n']} u={d['u']} t={d['t']}", seed, trial, algo, int(X.size), 0, len(S), None, None, rs.prefix_calls, wall, correct)

    inst, bound = _instance(d, rng)
    if algo == "topk":
        res = top_k_sumset(inst.A, inst.B, d["k"])
        wall = (time.perf_counter() - t0) * 1000
        if oracle:
            full = brute_sumset(inst.A, inst.B, 0, inst.A[-1] + inst.B[-1]) if inst.A and inst.B else SparseSet()
            correct = tuple(res) == tuple(full[: d["k"]])
        return RunReport(d["gen"], _descriptor(d), seed, trial, algo, inst.n, inst.m, len(res), None, None, meter.total, wall, correct, bound)

    out, est, cost = _run_covering(d, inst, meter)
    wall = (time.perf_counter() - t0) * 1000
    if oracle:
        lo = inst.lo if algo == "interval" else 0
        correct = out.tolist() == list(brute_sumset(inst.A, inst.B, lo, inst.hi))
    return RunReport(d["gen"], _descriptor(d), seed, trial, algo, inst.n, inst.m, int(out.size), est, cost, meter.total, wall, correct, bound)


def write_reports(reports: list[RunReport], fmt: str, stream) -> None:
    if fmt == "jsonl":
        for r in reports:
            stream.write(json.dumps(r.row()) + "\n")
        return
    stream.write(REPORT_HEADER + "\n")
    w = csv.DictWriter(stream, fieldnames=REPORT_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: ("" if v is None else v) for k, v in r.row().items()})


def read_reports(text: str) -> list[RunReport]:
    """Parse CSV output of :func:`write_reports` back into reports."""
    lines = text.splitlines()
    if not lines or lines[0] != REPORT_HEADER:
        raise ValueError("missing report header")
    conv: dict[str, Callable] = {f.name: f.type for f in fields(RunReport)}
    out = []
    for row in csv.DictReader(lines[1:]):
        kw = {}
        for k, v in row.items():
            typ = conv[k]
            if v == "":
                kw[k] = None
            elif "bool" in typ:
                kw[k] = v == "True"
            elif "float" in typ:
                kw[k] = float(v)
            elif "int" in typ:
                kw[k] = int(v)
            else:
                kw[k] = v
        out.append(RunReport(**kw))
    return out


# --------------------------------------------------------------------------
# exponent fit


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    points: int


def fit_exponent(reports: Sequence[RunReport], min_points: int = 5, min_decades: float = 2.0) -> ExponentFit:
    """Least-squares slope of ``log cost`` against ``log out``."""
    pts = [(r.out, r.cost) for r in reports if r.out and r.cost]
    if len(pts) < min_points:
        raise ValueError(f"need at least {min_points} reports with positive out and cost, got {len(pts)}")
    x = np.log10([p[0] for p in pts])
    y = np.log10([p[1] for p in pts])
    if x.max() - x.min() < min_decades:
        raise ValueError(f"out spans {x.max() - x.min():.2f} decades, need {min_decades}")
    res = stats.linregress(x, y)
    return ExponentFit(float(res.slope), float(res.stderr), float(res.intercept), len(pts))


# --------------------------------------------------------------------------
# entry point


def cli_main(argv: Sequence[str] | None = None, env: dict | None = None, stdout=None, stderr=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if any(a in ("-h", "--help", "help") for a in argv):
        stdout.write(USAGE)
        return 0
    try:
        d = parse_args(argv, env)
        if d["gen"] == "hard" or d["algo"] == "exponent":
            greedy_code(d["codelen"], d["delta"])
    except ValueError as e:
        stderr.write(f"error: {e}\n{USAGE}")
        return 2

    if d["algo"] == "exponent":
        try:
            c = lower_bound_exponent(d["delta"], d["base"])
        except ValueError as e:
            stderr.write(f"error: {e}\n{USAGE}")
            return 2
        stdout.write(f"c = {c:.6f}\n")
        return 0

    reports = [run_trial(d, i) for i in range(d["trials"])]
    buf = io.StringIO()
    write_reports(reports, d["format"], buf)
    if "out_file" in d:
        with open(d["out_file"], "w") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    failed = [r for r in reports if r.correct is False]
    if failed:
        stderr.write(f"{len(failed)} of {len(reports)} runs disagree with the oracle\n")
        return 1
    return 0


def main() -> None:  # pragma: no cover
    sys.exit(cli_main())
