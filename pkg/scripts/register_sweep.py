"""How register size and detector threshold decide whether events are conclusive.

For each register size, prints success probability at k*, the largest leftover
probability on any other pointer outcome, and the fraction of conclusive
events for a few thresholds.
"""
import argparse
from dataclasses import dataclass, field

from grovermeasure import DetectorModel, optimal_iterations, run_experiment, stern_gerlach_spec


@dataclass
class RegisterSweepConfig:
    n_min: int = 1
    n_max: int = 12
    trials: int = 2000
    seed: int = 1
    thresholds: list = field(default_factory=lambda: [0.001, 0.01, 0.1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-min", type=int, default=RegisterSweepConfig.n_min)
    parser.add_argument("--n-max", type=int, default=RegisterSweepConfig.n_max)
    parser.add_argument("--trials", type=int, default=RegisterSweepConfig.trials)
    parser.add_argument("--seed", type=int, default=RegisterSweepConfig.seed)
    parser.add_argument("--thresholds", type=float, nargs="+", default=None)
    args = parser.parse_args()
    cfg = RegisterSweepConfig(args.n_min, args.n_max, args.trials, args.seed)
    if args.thresholds:
        cfg.thresholds = args.thresholds

    spec = stern_gerlach_spec()
    header = " ".join(f"eps={e:<8g}" for e in cfg.thresholds)
    print(f"{'n':>3} {'k*':>5} {'p(target)':>12} {'p(other)':>12}  conclusive: {header}")
    for n in range(cfg.n_min, cfg.n_max + 1):
        plan = optimal_iterations(1 << n, 1)
        p = plan.predicted_success[-1]
        other = p if n == 1 else (1 - p) / ((1 << n) - 1)
        fracs = []
        for eps in cfg.thresholds:
            stats = run_experiment(spec, n, DetectorModel(eps), cfg.trials, cfg.seed)
            fracs.append(1 - stats.inconclusive_count / stats.trials)
        cells = " ".join(f"{f:<12.3f}" for f in fracs)
        print(f"{n:>3} {plan.k_star:>5} {p:>12.9f} {other:>12.3e}              {cells}")


if __name__ == "__main__":
    main()
