"""Output-sensitive restricted sumsets, sparse convolutions and subset sums."""

from .adversarial import (
    CodeFamily,
    HardInstance,
    XYFamily,
    build_hard_instance,
    build_xy_family,
    encode_bmm,
    encode_swhd,
    greedy_code,
    lower_bound_exponent,
)
from .core import (
    Covering,
    IndexRect,
    Instance,
    SparseSet,
    SparseVec,
    ValidationReport,
    brute_convolve,
    brute_subset_sums,
    brute_sumset,
    normalize,
    ruzsa_check,
    validate_covering,
)
from .engine import (
    BudgetExceeded,
    EngineConfig,
    SteppableCall,
    WorkMeter,
    cancel,
    convolve,
    start_sumset,
    step,
    sumset,
)
from .interval import convolve_interval, find_interval_covering, solve_interval
from .output_size import approx_out, solve_via_promise
from .prefix import convolve_prefix, covering_construction, solve_prefix
from .relaxed import convolve_prefix_relaxed, find_relaxed_covering, solve_prefix_relaxed
from .subset_sum import SSParams, split_survival_check, subset_sums, subset_sums_large, subset_sums_relaxed
from .topk import TopKParams, prefix_via_topk, top_k_convolution, top_k_sumset

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
