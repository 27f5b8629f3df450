"""Compile t-hash EQUALITY over a grid of (n, t, delta) and tabulate
measured error and cost against the public-coin baseline."""
import argparse
from dataclasses import dataclass, field

from newman_cara import build_equality, newman_transform


@dataclass
class SweepConfig:
    n_values: list = field(default_factory=lambda: [2, 3, 4, 5, 6])
    t_values: list = field(default_factory=lambda: [1, 2])
    deltas: list = field(default_factory=lambda: [0.2, 0.1, 0.05])
    eta: float = 0.01
    seed: int = 0


def run(cfg: SweepConfig):
    header = f"{'n':>2} {'t':>2} {'delta':>6} {'eps':>6} {'err':>7} {'k':>5} {'idx':>4} {'pub':>4} {'pri':>4}"
    print(header)
    print("-" * len(header))
    for n in cfg.n_values:
        for t in cfg.t_values:
            if t * n > 16:
                continue
            f, pub = build_equality(n, t)
            for delta in cfg.deltas:
                _, rep = newman_transform(f, pub, delta, cfg.eta, seed=cfg.seed)
                flag = "" if rep.guarantee_holds else "  <-- guarantee violated"
                print(f"{n:>2} {t:>2} {delta:>6.3f} {rep.epsilon_measured:>6.3f} {rep.error_measured:>7.4f} "
                      f"{rep.k:>5} {rep.index_bits:>4} {rep.public_cost:>4} {rep.private_cost:>4}{flag}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-values", type=int, nargs="+", default=SweepConfig().n_values)
    ap.add_argument("--t-values", type=int, nargs="+", default=SweepConfig().t_values)
    ap.add_argument("--deltas", type=float, nargs="+", default=SweepConfig().deltas)
    ap.add_argument("--eta", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=0)
    run(SweepConfig(**vars(ap.parse_args())))
