"""Low-entropy permutation families and exact backwards-analysis audits."""

from .core import (
    CostFunction,
    Permutation,
    PermutationDistribution,
    PermutationFamily,
    make_permutation,
    total_cost,
    uniform_distribution,
)
from .transition import (
    TransitionGraph,
    build_transition_graph,
    graphs_equal,
    memoryless_distribution,
    sample_memoryless,
    uniform_transition_graph,
)
from .audit import (
    check_backwards_uniform,
    check_maxwise,
    check_minwise,
    adversarial_cost_function,
    efficiency_witness,
    equivalence_report,
    lower_bound_certificate,
)
from .construct import (
    alpha_uniform_family,
    dk_distribution,
    dk_sample,
    even_split,
    lcm_check,
    lcm_family,
    pebble_family,
)

__all__ = [
    "CostFunction",
    "Permutation",
    "PermutationDistribution",
    "PermutationFamily",
    "TransitionGraph",
    "adversarial_cost_function",
    "alpha_uniform_family",
    "build_transition_graph",
    "check_backwards_uniform",
    "check_maxwise",
    "check_minwise",
    "dk_distribution",
    "dk_sample",
    "efficiency_witness",
    "equivalence_report",
    "even_split",
    "graphs_equal",
    "lcm_check",
    "lcm_family",
    "lower_bound_certificate",
    "make_permutation",
    "memoryless_distribution",
    "pebble_family",
    "sample_memoryless",
    "total_cost",
    "uniform_distribution",
    "uniform_transition_graph",
]

__version__ = "0.1.0"
