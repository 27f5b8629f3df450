"""Carathéodory sparsification and public-to-private coin compilation."""
from .compiler import (
    CompilationReport,
    PrivateCoinProtocol,
    index_bits,
    measured_cost_bound_check,
    newman_transform,
    run_private_protocol,
    simulate_private_runs,
)
from .errors import InvalidInputError, ReductionFailedError, SamplingFailedError, SizeGuardError
from .geometry import (
    ConvexCombination,
    PointSet,
    SamplingPlan,
    approx_caratheodory_sample,
    caratheodory_reduce,
    eval_combination,
    find_affine_dependence,
)
from .harness import brute_force_best_error, build_equality, build_random_mixture
from .protocols import (
    DeterministicProtocol,
    ProbabilityTable,
    PublicCoinProtocol,
    TruthTable,
    comm_cost,
    error_linf,
    mixture_table,
    output_table,
)
