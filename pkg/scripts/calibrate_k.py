"""Calibrate the constant K in cost <= K * out_est^(4/3) * (1 + log n log m)^2.

Runs the covering construction once over the test generator grid and the
random prefix family, and writes twice the largest observed ratio (rounded
up to two significant digits) to tests/fixtures/calibration.json.  Run from the repository root;
the committed value is then frozen.
"""

import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import itertools  # noqa: E402

from helpers import FIXTURES, generator_grid, log_factor, random_prefix_family  # noqa: E402

from sumsetkit.interval import trim  # noqa: E402
from sumsetkit.prefix import covering_construction, prefix_estimate  # noqa: E402
from sumsetkit.core import Instance, SparseSet, validate_covering  # noqa: E402


def main() -> None:
    worst, where = 0.0, None
    for label, a, b, u in itertools.chain(generator_grid(), random_prefix_family()):
        a, b = trim(a, b, u)
        if a.size == 0:
            continue
        est = prefix_estimate(a, b, u)
        cov = covering_construction(a, b, u, est)
        rep = validate_covering(Instance(SparseSet(a.tolist()), SparseSet(b.tolist()), 0, u), cov)
        ratio = rep.cost / (max(est, 1) ** (4 / 3) * log_factor(a.size, b.size))
        if ratio > worst:
            worst, where = ratio, label
    exp = math.floor(math.log10(2 * worst)) - 1
    K = math.ceil(2 * worst / 10**exp) * 10**exp
    data = {"K": K, "max_ratio": worst, "worst_instance": where}
    (FIXTURES / "calibration.json").write_text(json.dumps(data, indent=2) + "\n")
    print(data)


if __name__ == "__main__":
    main()
