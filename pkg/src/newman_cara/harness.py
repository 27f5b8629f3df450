"""Test subjects for the compiler: EQUALITY with inner-product hashing,
random mixtures, and a table-free brute-force error oracle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SizeGuardError
from .protocols import DeterministicProtocol, PublicCoinProtocol, TruthTable, check_n

MAX_HASH_BITS = 16
ORACLE_MAX_N = 6
ORACLE_MAX_SUPPORT = 1 << 12


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


@dataclass(frozen=True)
class EqualityFamily:
    """Public-coin EQUALITY with ``t`` independent GF(2) inner-product hashes.

    The hash string ``r`` has ``t * n`` bits; hash ``j`` (0-based) uses the
    vector ``(r >> (j * n)) & (2**n - 1)``. Alice sends her ``t`` hash bits,
    Bob answers whether all of them match his, so each protocol costs
    ``t + 1`` bits on every input.
    """

    n: int
    t: int

    def __post_init__(self):
        check_n(self.n)
        if self.t < 1:
            raise InvalidInputError(f"t must be a positive integer, got {self.t!r}")
        if self.t * self.n > MAX_HASH_BITS:
            raise SizeGuardError(f"t*n = {self.t * self.n} exceeds {MAX_HASH_BITS} hash bits")

    @property
    def size(self) -> int:
        return 1 << (self.t * self.n)

    def hash_vectors(self, r):
        mask = (1 << self.n) - 1
        return [(r >> (j * self.n)) & mask for j in range(self.t)]

    def protocol(self, r) -> DeterministicProtocol:
        if not 0 <= r < self.size:
            raise InvalidInputError(f"hash string {r} outside [0, {self.size})")
        vecs = self.hash_vectors(r)
        cost = self.t + 1
        side = 1 << self.n

        def evaluator(x, y):
            alice = [_parity(a & x) for a in vecs]
            bob = [_parity(a & y) for a in vecs]
            return int(alice == bob), cost

        def tables():
            xs = np.arange(side)
            eq = np.ones((side, side), dtype=bool)
            for a in vecs:
                h = np.array([_parity(a & v) for v in xs], dtype=np.uint8)
                eq &= h[:, None] == h[None, :]
            return eq.ravel().astype(np.uint8), np.full(side * side, cost, dtype=np.int64)

        return DeterministicProtocol(self.n, evaluator, cost, tables, name=f"eq[n={self.n},t={self.t},r={r}]")


def equality_table(n) -> TruthTable:
    side = 1 << check_n(n)
    return TruthTable(n, np.eye(side, dtype=np.uint8).ravel())


def build_equality(n, t):
    """Return ``(EQUALITY truth table, uniform public-coin hash protocol)``."""
    fam = EqualityFamily(n, t)
    protocols = [fam.protocol(r) for r in range(fam.size)]
    weights = np.full(fam.size, 1.0 / fam.size)
    return equality_table(n), PublicCoinProtocol(protocols, weights)


def table_protocol(n, outputs, cost, name="") -> DeterministicProtocol:
    """Protocol that looks its answer up in a fixed output table."""
    out = np.asarray(outputs, dtype=np.uint8).copy()
    out.setflags(write=False)
    side = 1 << n

    def evaluator(x, y):
        return int(out[x * side + y]), cost

    def tables():
        return out, np.full(out.size, cost, dtype=np.int64)

    return DeterministicProtocol(n, evaluator, cost, tables, name=name)


def constant_protocol(n, bit) -> DeterministicProtocol:
    """Output ``bit`` on every input; costs the one answer bit."""
    side = 1 << check_n(n)
    return table_protocol(n, np.full(side * side, bit, dtype=np.uint8), 1, name=f"const{bit}")


def build_random_mixture(n, q, seed=0) -> PublicCoinProtocol:
    """``q`` protocols with uniformly random output tables and random weights."""
    check_n(n)
    if q < 1:
        raise InvalidInputError(f"q must be >= 1, got {q!r}")
    rng = np.random.default_rng(seed)
    size = 1 << (2 * n)
    outs = rng.integers(0, 2, size=(q, size), dtype=np.uint8)
    raw = rng.random(q) + 1e-3
    weights = raw / raw.sum()
    protocols = [table_protocol(n, outs[i], 2 * n, name=f"rand[{i}]") for i in range(q)]
    return PublicCoinProtocol(protocols, weights)


def brute_force_best_error(f: TruthTable, pub: PublicCoinProtocol) -> float:
    """Worst-case error of ``pub`` against ``f``, computed input by input.

    Calls each protocol's evaluator directly and never touches the
    vectorized tables, so it is independent of the ``mixture_table`` path.
    """
    if f.n != pub.n:
        raise InvalidInputError(f"function has n={f.n}, protocol has n={pub.n}")
    if pub.n > ORACLE_MAX_N or len(pub) > ORACLE_MAX_SUPPORT:
        raise SizeGuardError(f"oracle limited to n <= {ORACLE_MAX_N} and support <= {ORACLE_MAX_SUPPORT}")
    side = 1 << pub.n
    worst = 0.0
    for x in range(side):
        for y in range(side):
            accept = 0.0
            for p, w in zip(pub.protocols, pub.weights.tolist()):
                if w > 0:
                    accept += w * p.evaluator(x, y)[0]
            worst = max(worst, abs(f(x, y) - accept))
    return worst
