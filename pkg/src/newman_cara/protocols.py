"""Boolean functions, two-party protocols and their embedding in R^N.

Inputs ``x, y`` are integers in ``[0, 2**n)``. A function or protocol on
``n``-bit inputs is identified with a vector of length ``N = 2**(2n)`` whose
entry ``x * 2**n + y`` is its value on ``(x, y)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError, SizeGuardError
from .geometry import WEIGHT_SUM_TOL, ConvexCombination, PointSet, eval_combination

MAX_N = 14
TABLE_TOL = 1e-12


def check_n(n):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n!r}")
    if n > MAX_N:
        raise SizeGuardError(f"n = {n} exceeds the guard n <= {MAX_N}")
    return int(n)


def table_size(n) -> int:
    return 1 << (2 * check_n(n))


def input_index(n, x, y) -> int:
    side = 1 << n
    if not (0 <= x < side and 0 <= y < side):
        raise InvalidInputError(f"inputs ({x}, {y}) outside {{0,1}}^{n}")
    return x * side + y


class TruthTable:
    """A Boolean function of ``(x, y)``, bit-packed little-endian within bytes."""

    def __init__(self, n, bits):
        self.n = check_n(n)
        bits = np.asarray(bits)
        if bits.shape != (table_size(n),):
            raise InvalidInputError(f"expected {table_size(n)} bits, got shape {bits.shape}")
        if not np.isin(bits, (0, 1)).all():
            raise InvalidInputError("truth table entries must be 0 or 1")
        self._packed = np.packbits(bits.astype(np.uint8), bitorder="little")

    @classmethod
    def from_function(cls, n, fn):
        side = 1 << check_n(n)
        bits = [fn(x, y) for x in range(side) for y in range(side)]
        return cls(n, np.asarray(bits, dtype=np.uint8))

    @property
    def size(self) -> int:
        return table_size(self.n)

    def bits(self) -> np.ndarray:
        return np.unpackbits(self._packed, count=self.size, bitorder="little")

    def __call__(self, x, y) -> int:
        i = input_index(self.n, x, y)
        return int((self._packed[i >> 3] >> (i & 7)) & 1)

    def __eq__(self, other):
        return isinstance(other, TruthTable) and self.n == other.n and np.array_equal(self._packed, other._packed)

    def to_json(self) -> dict:
        return {"n": self.n, "bits_hex": self._packed.tobytes().hex()}

    @classmethod
    def from_json(cls, doc):
        try:
            n = check_n(doc["n"])
            raw = bytes.fromhex(doc["bits_hex"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad truth table document: {exc}") from None
        if len(raw) != (table_size(n) + 7) // 8:
            raise InvalidInputError("bits_hex has the wrong length")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), count=table_size(n), bitorder="little")
        return cls(n, bits)


class ProbabilityTable:
    """Acceptance probability of a randomized protocol on each input."""

    def __init__(self, n, values):
        self.n = check_n(n)
        v = np.asarray(values, dtype=np.float64)
        if v.shape != (table_size(n),):
            raise InvalidInputError(f"expected {table_size(n)} values, got shape {v.shape}")
        if not np.isfinite(v).all() or (v < -TABLE_TOL).any() or (v > 1 + TABLE_TOL).any():
            raise InvalidInputError("probability table entries must lie in [0, 1]")
        v.setflags(write=False)
        self.values = v

    def __call__(self, x, y) -> float:
        return float(self.values[input_index(self.n, x, y)])

    def to_json(self) -> dict:
        return {"n": self.n, "values": self.values.tolist()}

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(doc["n"], doc["values"])
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"bad probability table document: {exc}") from None


Evaluator = Callable[[int, int], Tuple[int, int]]


@dataclass(frozen=True, eq=False)
class DeterministicProtocol:
    """A deterministic two-party protocol, reduced to what Newman's step uses.

    ``evaluator(x, y)`` returns ``(output_bit, bits_exchanged)``; the bit
    count includes the final answer bit. ``tables`` is an optional
    vectorized shortcut returning both as length-``N`` arrays in input-index
    order; when present it must agree with ``evaluator``.
    """

    n: int
    evaluator: Evaluator
    declared_cost: int
    tables: Optional[Callable[[], Tuple[np.ndarray, np.ndarray]]] = None
    name: str = ""

    def __post_init__(self):
        check_n(self.n)
        if self.declared_cost < 0:
            raise InvalidInputError("declared_cost must be nonnegative")

    def __call__(self, x, y):
        input_index(self.n, x, y)
        return self.evaluator(x, y)


def _enumerate(p: DeterministicProtocol):
    if p.tables is not None:
        out, cost = p.tables()
        return np.asarray(out, dtype=np.uint8), np.asarray(cost, dtype=np.int64)
    side = 1 << p.n
    out = np.empty(side * side, dtype=np.uint8)
    cost = np.empty(side * side, dtype=np.int64)
    for x in range(side):
        for y in range(side):
            b, c = p.evaluator(x, y)
            out[x * side + y] = b
            cost[x * side + y] = c
    return out, cost


def output_table(p: DeterministicProtocol) -> TruthTable:
    """Evaluate ``p`` on every input pair; checks bits and per-input costs."""
    table_size(p.n)
    out, cost = _enumerate(p)
    if (cost > p.declared_cost).any():
        raise InvalidInputError(f"protocol {p.name!r} exceeds its declared cost {p.declared_cost}")
    return TruthTable(p.n, out)


class PublicCoinProtocol:
    """A distribution over deterministic protocols sharing the same ``n``."""

    def __init__(self, protocols: Sequence[DeterministicProtocol], weights):
        protocols = list(protocols)
        if not protocols:
            raise InvalidInputError("need at least one protocol")
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (len(protocols),):
            raise InvalidInputError(f"{len(protocols)} protocols but weights of shape {w.shape}")
        if not np.isfinite(w).all() or (w < 0).any():
            raise InvalidInputError("weights must be finite and nonnegative")
        if abs(float(np.sum(w)) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError(f"weights sum to {float(np.sum(w))!r}, not 1")
        ns = {p.n for p in protocols}
        if len(ns) != 1:
            raise InvalidInputError(f"protocols disagree on n: {sorted(ns)}")
        self.n = ns.pop()
        self.protocols = protocols
        w.setflags(write=False)
        self.weights = w

    def __len__(self):
        return len(self.protocols)

    @classmethod
    def point_mass(cls, protocol):
        return cls([protocol], [1.0])


def embed(protocols: Sequence[DeterministicProtocol]) -> PointSet:
    """Stack the output tables of ``protocols`` as rows of a 0/1 point set."""
    rows = np.stack([output_table(p).bits() for p in protocols])
    return PointSet(rows)


def embed_public(pub: PublicCoinProtocol) -> ConvexCombination:
    return ConvexCombination.from_dense(embed(pub.protocols), pub.weights)


def mixture_table(pub: PublicCoinProtocol) -> ProbabilityTable:
    """Acceptance probabilities of ``pub``: the weighted sum of its output tables."""
    values = eval_combination(embed_public(pub))
    return ProbabilityTable(pub.n, np.clip(values, 0.0, 1.0))


def error_linf(f: TruthTable, t: ProbabilityTable) -> float:
    """Worst-case error probability: ``max_(x,y) |f(x,y) - t(x,y)|``."""
    if f.n != t.n:
        raise InvalidInputError(f"truth table has n={f.n}, probability table has n={t.n}")
    return float(np.max(np.abs(f.bits().astype(np.float64) - t.values)))


def comm_cost(pub: PublicCoinProtocol) -> int:
    """Worst-case bits exchanged by any protocol that has positive weight."""
    live = [p.declared_cost for p, w in zip(pub.protocols, pub.weights) if w > 0]
    if not live:
        raise InvalidInputError("public-coin protocol has empty support")
    return max(live)
