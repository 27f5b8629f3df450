"""Empirical first-draw failure rate of the sampling step versus the
Hoeffding budget eta, on random sign vectors in dimension d."""
import argparse
import math
from dataclasses import dataclass

import numpy as np

from newman_cara.geometry import ConvexCombination, PointSet, SamplingPlan, sample_until_close


@dataclass
class RateConfig:
    dimension: int = 1024
    points: int = 64
    delta: float = 0.1
    trials: int = 300
    seed: int = 0


def run(cfg: RateConfig, etas=(0.5, 0.2, 0.1, 0.01)):
    rng = np.random.default_rng(cfg.seed)
    ps = PointSet(rng.choice(np.array([-1.0, 1.0]), size=(cfg.points, cfg.dimension)))
    c = ConvexCombination.from_dense(ps, rng.dirichlet(np.ones(cfg.points)))
    print(f"d={cfg.dimension} m={cfg.points} delta={cfg.delta} trials={cfg.trials}")
    print(f"{'eta':>6} {'k':>6} {'fail rate':>10} {'allowed':>8} {'mean dist':>10}")
    for eta in etas:
        plan = SamplingPlan(cfg.dimension, cfg.delta, eta)
        outs = [sample_until_close(c, plan, s) for s in range(cfg.trials)]
        rate = sum(o.attempts > 1 for o in outs) / cfg.trials
        allowed = eta + 3 * math.sqrt(eta / cfg.trials)
        mean_dist = np.mean([o.distance for o in outs])
        print(f"{eta:>6.3f} {plan.k:>6} {rate:>10.4f} {allowed:>8.4f} {mean_dist:>10.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(RateConfig()).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    run(RateConfig(**vars(ap.parse_args())))
