"""Iteration count and achieved success against sqrt(N) for single-target search.

    python scripts/scaling_sweep.py --n-min 8 --n-max 20 --step 2
"""
import argparse
import math
import time
from dataclasses import dataclass

import numpy as np

from grovermeasure import MarkedSet, optimal_iterations, run_grover


@dataclass
class SweepConfig:
    n_min: int = 8
    n_max: int = 20
    step: int = 2
    seed: int = 1


def sweep(cfg: SweepConfig):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for n in range(cfg.n_min, cfg.n_max + 1, cfg.step):
        n_big = 1 << n
        plan = optimal_iterations(n_big, 1)
        target = int(rng.integers(n_big))
        t0 = time.perf_counter()
        state = run_grover(n, MarkedSet.of(n, target), plan.k_star)
        elapsed = time.perf_counter() - t0
        rows.append((n, plan.k_star, math.pi / 4 * math.sqrt(n_big),
                     plan.predicted_success[-1], state.probabilities()[target], elapsed))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(SweepConfig()).items():
        parser.add_argument("--" + name.replace("_", "-"), type=int, default=default)
    cfg = SweepConfig(**vars(parser.parse_args()))
    print(f"{'n':>3} {'k*':>6} {'pi/4 sqrtN':>11} {'predicted':>12} {'achieved':>12} {'1-1/N':>12} {'secs':>7}")
    for n, k, ref, pred, got, secs in sweep(cfg):
        print(f"{n:>3} {k:>6} {ref:>11.3f} {pred:>12.9f} {got:>12.9f} {1 - 2.0 ** -n:>12.9f} {secs:>7.2f}")


if __name__ == "__main__":
    main()
