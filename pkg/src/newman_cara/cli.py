"""Command-line front end.

Exit codes: 0 success, 1 a checked guarantee failed, 2 usage / guard /
parse error, 3 algorithmic failure (sampling retries exhausted).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import jsonio
from .compiler import (
    frequency_tolerance,
    logarithmic_growth_ok,
    measured_cost_bound_check,
    newman_transform,
    simulate_private_runs,
)
from .errors import InvalidInputError, ReductionFailedError, SamplingFailedError
from .geometry import (
    ConvexCombination,
    SamplingPlan,
    caratheodory_reduce,
    combination_from_json,
    combination_to_json,
    eval_combination,
    linf_distance,
    sample_until_close,
)
from .harness import build_equality, build_random_mixture
from .protocols import TruthTable, mixture_table

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_ALGORITHM = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    input: Optional[str] = None
    output: Optional[str] = None
    report: Optional[str] = None
    family: str = "equality"
    n: int = 4
    t: int = 2
    q: int = 20
    subject_seed: int = 0
    delta: float = 0.1
    eta: float = 0.01
    seed: int = 0
    use_exact_reduction: Optional[bool] = None
    max_retries: int = 16
    trials: int = 100_000
    inputs: int = 16
    n_values: List[int] = field(default_factory=lambda: [2, 4, 6, 8])

    def validate(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise UsageError(f"--delta must be > 0, got {self.delta}")
        if not 0 < self.eta < 1:
            raise UsageError(f"--eta must lie in (0, 1), got {self.eta}")
        for name in ("seed", "subject_seed"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise UsageError(f"--{name.replace('_', '-')} must be a 64-bit unsigned integer, got {v}")
        if self.max_retries < 1 or self.trials < 1 or self.inputs < 1:
            raise UsageError("--max-retries, --trials and --inputs must be positive")
        return self


def _emit(doc, path):
    text = jsonio.dumps(doc)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _info(msg, cfg):
    # keep stdout clean for JSON when no output file is given
    print(msg, file=sys.stdout if cfg.output else sys.stderr)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def cmd_sparsify(cfg: CliConfig) -> int:
    ps, combo = combination_from_json(_load_json(cfg.input))
    if combo is None:
        combo = ConvexCombination.from_dense(ps, np.full(len(ps), 1.0 / len(ps)))
    target = eval_combination(combo)
    if cfg.use_exact_reduction:
        combo = caratheodory_reduce(combo)
    plan = SamplingPlan(ps.dimension, cfg.delta, cfg.eta, cfg.max_retries)
    result = sample_until_close(combo, plan, cfg.seed).combination
    dist = linf_distance(eval_combination(result), target)
    _emit(combination_to_json(result), cfg.output)
    _info(f"distance {jsonio.fmt_real(dist)}", cfg)
    _info(f"support {len(result)}", cfg)
    return EXIT_OK if dist <= cfg.delta else EXIT_CHECK_FAILED


def _build_subject(subject):
    family = subject.get("family")
    if family == "equality":
        return build_equality(subject["n"], subject["t"])
    if family == "random":
        pub = build_random_mixture(subject["n"], subject["q"], subject["subject_seed"])
        # target: the majority answer of the mixture, the best deterministic guess
        f = TruthTable(subject["n"], (mixture_table(pub).values >= 0.5).astype(np.uint8))
        return f, pub
    raise UsageError(f"unknown protocol family {family!r}")


def _subject_of(cfg):
    if cfg.family == "equality":
        return {"family": "equality", "n": cfg.n, "t": cfg.t}
    return {"family": "random", "n": cfg.n, "q": cfg.q, "subject_seed": cfg.subject_seed}


def _compile(subject, delta, eta, reduction, seed, max_retries):
    f, pub = _build_subject(subject)
    return newman_transform(f, pub, delta, eta, reduction, seed, max_retries)


def cmd_newman(cfg: CliConfig) -> int:
    subject = _subject_of(cfg)
    private, report = _compile(subject, cfg.delta, cfg.eta, cfg.use_exact_reduction, cfg.seed, cfg.max_retries)
    doc = report.to_json()
    doc["subject"] = subject
    doc["exact_reduction_flag"] = cfg.use_exact_reduction
    doc["max_retries"] = cfg.max_retries
    doc["support"] = [{"index": i, "weight": w} for i, w in zip(private.source_indices, private.weights.tolist())]
    _emit(doc, cfg.output)
    return EXIT_OK if report.guarantee_holds else EXIT_CHECK_FAILED


def _pick_inputs(n, count, rng):
    side = 1 << n
    total = side * side
    if count >= total:
        return list(range(total))
    diag = min(count // 4, side)
    chosen = [int(x) * side + int(x) for x in rng.choice(side, size=diag, replace=False)]
    off = np.setdiff1d(np.arange(total), chosen)
    chosen += [int(i) for i in rng.choice(off, size=count - diag, replace=False)]
    return sorted(chosen)


def cmd_verify(cfg: CliConfig) -> int:
    doc = _load_json(cfg.report)
    try:
        subject = doc["subject"]
        private, report = _compile(
            subject,
            doc["delta_target"],
            doc["eta"],
            doc.get("exact_reduction_flag"),
            doc["seed"],
            doc.get("max_retries", 16),
        )
        stored = [(int(e["index"]), float(e["weight"])) for e in doc["support"]]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"report is missing compiled artifacts: {exc}") from None
    rebuilt = list(zip(private.source_indices, private.weights.tolist()))
    if len(stored) != len(rebuilt) or any(
        i != j or abs(a - b) > 1e-15 for (i, a), (j, b) in zip(stored, rebuilt)
    ):
        raise UsageError("report support does not match the recompiled protocol")

    table = mixture_table(private.as_public())
    tol = frequency_tolerance(cfg.trials)
    side = 1 << private.n
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for idx in _pick_inputs(private.n, cfg.inputs, rng):
        x, y = divmod(idx, side)
        out, _ = simulate_private_runs(private, x, y, cfg.trials, np.random.SeedSequence([cfg.seed, idx]))
        freq = float(out.mean())
        dev = abs(freq - float(table.values[idx]))
        rows.append({"x": x, "y": y, "expected": float(table.values[idx]), "frequency": freq,
                     "deviation": dev, "pass": dev <= tol})
    ok = all(r["pass"] for r in rows)
    _emit({"trials": cfg.trials, "seed": cfg.seed, "tolerance": tol, "k": private.k,
           "all_pass": ok, "inputs": rows}, cfg.output)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_scaling(cfg: CliConfig) -> int:
    rows = measured_cost_bound_check(cfg.n_values, cfg.delta, cfg.eta)
    halved = measured_cost_bound_check(cfg.n_values, cfg.delta / 2, cfg.eta)
    ok = logarithmic_growth_ok(rows)
    _emit({
        "delta": cfg.delta,
        "eta": cfg.eta,
        "rows": [{"n": r.n, "dimension": r.dimension, "k": r.k, "index_bits": r.index_bits} for r in rows],
        "delta_halved_log2k_increase": [math.log2(h.k / r.k) for r, h in zip(rows, halved)],
        "logarithmic_growth": ok,
    }, cfg.output)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="newman-cara", description="Carathéodory sparsification and Newman compilation")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, delta=0.1):
        p.add_argument("--delta", type=float, default=delta)
        p.add_argument("--eta", type=float, default=0.01)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--max-retries", type=int, default=16)
        p.add_argument("-o", "--output")

    p = sub.add_parser("sparsify", help="sparsify a convex combination read from JSON")
    p.add_argument("input")
    p.add_argument("--exact", dest="use_exact_reduction", action="store_true",
                   help="apply exact Carathéodory reduction before sampling")
    common(p)

    p = sub.add_parser("newman", help="compile a public-coin protocol and write the report")
    p.add_argument("--family", choices=["equality", "random"], default="equality")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--q", type=int, default=20)
    p.add_argument("--subject-seed", type=_seed, default=0)
    p.add_argument("--exact-reduction", dest="use_exact_reduction", action=argparse.BooleanOptionalAction,
                   default=None, help="default: reduce only when support > N+1 and N <= 4096")
    common(p)

    p = sub.add_parser("verify", help="Monte Carlo check of a compiled protocol against its table")
    p.add_argument("report")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--inputs", type=int, default=16)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("-o", "--output")

    p = sub.add_parser("scaling", help="index length versus n at fixed delta")
    p.add_argument("--n-values", type=int, nargs="+", default=[2, 4, 6, 8])
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("-o", "--output")
    return parser


COMMANDS = {"sparsify": cmd_sparsify, "newman": cmd_newman, "verify": cmd_verify, "scaling": cmd_scaling}


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    cfg = CliConfig(**args)
    try:
        cfg.validate()
        return COMMANDS[cfg.subcommand](cfg)
    except (UsageError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SamplingFailedError, ReductionFailedError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_ALGORITHM


if __name__ == "__main__":
    sys.exit(main())
