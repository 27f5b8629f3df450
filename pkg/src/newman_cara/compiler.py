"""Public-coin to private-coin compilation.

Pipeline: embed the public protocol's members as 0/1 points in R^N, measure
the error of their mixture, optionally shrink the support to N + 1 members
with exact Carathéodory, then sparsify by sampling. The private protocol
has Alice draw an index from the sparse distribution, send it to Bob in
``ceil(log2 k)`` bits, after which both run the chosen member.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import InvalidInputError
from .geometry import (
    ConvexCombination,
    SamplingPlan,
    caratheodory_reduce,
    eval_combination,
    linf_distance,
    sample_count,
    sample_until_close,
)
from .protocols import (
    DeterministicProtocol,
    ProbabilityTable,
    PublicCoinProtocol,
    TruthTable,
    check_n,
    comm_cost,
    embed_public,
    error_linf,
    input_index,
    mixture_table,
    table_size,
)

# exact reduction is only switched on automatically up to this ambient dimension
AUTO_REDUCTION_MAX_DIM = 4096


def index_bits(k: int) -> int:
    """Fixed-length code size for an index in ``[k]``: ``ceil(log2 k)``, 0 for ``k == 1``."""
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k!r}")
    return (k - 1).bit_length()


class PrivateCoinProtocol:
    """Alice samples member ``i`` with probability ``weights[i]`` and sends ``i``."""

    def __init__(self, protocols: Sequence[DeterministicProtocol], weights, source_indices=None):
        self._public = PublicCoinProtocol(protocols, weights)
        if (self._public.weights <= 0).any():
            raise InvalidInputError("private protocol support must carry positive weights")
        self.n = self._public.n
        self.protocols = self._public.protocols
        self.weights = self._public.weights
        if source_indices is None:
            source_indices = range(len(self.protocols))
        self.source_indices = [int(i) for i in source_indices]
        self._cdf = np.cumsum(self.weights)

    @property
    def k(self) -> int:
        return len(self.protocols)

    @property
    def index_bits(self) -> int:
        return index_bits(self.k)

    @property
    def total_cost(self) -> int:
        return self.index_bits + max(p.declared_cost for p in self.protocols)

    def as_public(self) -> PublicCoinProtocol:
        return self._public

    def sample_index(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        i = np.searchsorted(self._cdf, u, side="right")
        return np.minimum(i, self.k - 1)


@dataclass(frozen=True)
class CompilationReport:
    n: int
    epsilon_measured: float
    delta_target: float
    eta: float
    error_measured: float
    mixture_distance: float
    k: int
    samples: int
    attempts: int
    index_bits: int
    public_cost: int
    private_cost: int
    support_in: int
    support_reduced: int
    reduction_used: bool
    seed: int
    guarantee_holds: bool

    def to_json(self) -> dict:
        return asdict(self)


def _reduction_wanted(flag, support, dim):
    if support <= dim + 1:
        return False
    if flag is None:
        return dim <= AUTO_REDUCTION_MAX_DIM
    return bool(flag)


def newman_transform(
    f: TruthTable,
    pub: PublicCoinProtocol,
    delta: float,
    eta: float = 0.01,
    use_exact_reduction: Optional[bool] = None,
    seed: int = 0,
    max_retries: int = 16,
):
    """Compile ``pub`` into a private-coin protocol for ``f``.

    ``use_exact_reduction=None`` reduces only when the support exceeds
    ``N + 1`` and ``N <= 4096``; ``True`` reduces whenever the support
    exceeds ``N + 1``; ``False`` never reduces.

    Returns ``(PrivateCoinProtocol, CompilationReport)``. The report's
    ``guarantee_holds`` records whether the compiled protocol's worst-case
    error, recomputed over every input, is at most the input's worst-case
    error plus ``delta``.
    """
    if f.n != pub.n:
        raise InvalidInputError(f"function has n={f.n}, protocol has n={pub.n}")
    dim = table_size(pub.n)
    plan = SamplingPlan(dim, delta, eta, max_retries)

    combo = embed_public(pub)
    target = eval_combination(combo)
    eps = error_linf(f, ProbabilityTable(pub.n, np.clip(target, 0.0, 1.0)))

    reduced = combo
    used = _reduction_wanted(use_exact_reduction, len(combo), dim)
    if used:
        reduced = caratheodory_reduce(combo)

    outcome = sample_until_close(reduced, plan, seed)
    sparse: ConvexCombination = outcome.combination
    src = sparse.indices.tolist()
    private = PrivateCoinProtocol([pub.protocols[i] for i in src], sparse.weights, src)

    compiled = mixture_table(private.as_public())
    err = error_linf(f, compiled)
    report = CompilationReport(
        n=pub.n,
        epsilon_measured=eps,
        delta_target=float(delta),
        eta=float(eta),
        error_measured=err,
        mixture_distance=linf_distance(compiled.values, target),
        k=private.k,
        samples=plan.k,
        attempts=outcome.attempts,
        index_bits=private.index_bits,
        public_cost=comm_cost(pub),
        private_cost=private.total_cost,
        support_in=len(combo),
        support_reduced=len(reduced),
        reduction_used=used,
        seed=int(seed),
        guarantee_holds=bool(err <= eps + delta),
    )
    return private, report


def run_private_protocol(p: PrivateCoinProtocol, x, y, seed=None):
    """One execution on ``(x, y)``; returns ``(output_bit, bits_used)``.

    ``seed`` may be an int or a ``numpy.random.Generator`` (consumed in place).
    """
    input_index(p.n, x, y)
    rng = np.random.default_rng(seed)
    i = int(p.sample_index(rng))
    bit, cost = p.protocols[i].evaluator(x, y)
    return bit, p.index_bits + cost


def simulate_private_runs(p: PrivateCoinProtocol, x, y, trials, seed=None):
    """``trials`` executions on ``(x, y)`` driven by one generator.

    Produces the same sequence as calling ``run_private_protocol`` ``trials``
    times with a shared generator. Returns ``(outputs, bits_used)`` arrays.
    """
    input_index(p.n, x, y)
    rng = np.random.default_rng(seed)
    picks = p.sample_index(rng, trials)
    outputs = np.empty(trials, dtype=np.uint8)
    bits = np.empty(trials, dtype=np.int64)
    for i in np.unique(picks).tolist():
        bit, cost = p.protocols[i].evaluator(x, y)
        sel = picks == i
        outputs[sel] = bit
        bits[sel] = p.index_bits + cost
    return outputs, bits


def frequency_tolerance(trials: int, slack: float = 0.005) -> float:
    """Allowed gap between an empirical acceptance rate and its mean."""
    return 3.0 * math.sqrt(0.25 / trials) + slack


@dataclass(frozen=True)
class ScalingRow:
    n: int
    dimension: int
    k: int
    index_bits: int


def measured_cost_bound_check(n_values, delta, eta=0.01) -> List[ScalingRow]:
    """Index length of the compiled protocol as a function of ``n``.

    Pure arithmetic on the sample count for ``d = 2**(2n)``; no tables are
    built, so ``n`` only has to respect the global guard.
    """
    rows = []
    for n in n_values:
        d = table_size(check_n(n))
        k = sample_count(d, delta, eta)
        rows.append(ScalingRow(int(n), d, k, index_bits(k)))
    return rows


def logarithmic_growth_ok(rows: Sequence[ScalingRow]) -> bool:
    """Index bits never decrease with ``n`` and grow by at most
    ``ceil(log2(n / n')) + 1`` between any ``n' < n``."""
    rows = sorted(rows, key=lambda r: r.n)
    for a, b in zip(rows, rows[1:]):
        if b.index_bits < a.index_bits:
            return False
    for i, lo in enumerate(rows):
        for hi in rows[i + 1:]:
            if hi.n > lo.n and hi.index_bits - lo.index_bits > math.ceil(math.log2(hi.n / lo.n)) + 1:
                return False
    return True
