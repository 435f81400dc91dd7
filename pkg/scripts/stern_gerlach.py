"""Stern-Gerlach run: padded register vs the literal two-state register.

Prints projection, decoherence and Grover-mechanism statistics side by side.
"""
import argparse
from dataclasses import dataclass

from grovermeasure import DetectorModel, compare_models, stern_gerlach_spec


@dataclass
class SternGerlachConfig:
    register_qubits: int = 8
    epsilon: float = 0.01
    trials: int = 10_000
    seed: int = 42


def report(title, cmp):
    g = cmp.grover
    print(title)
    print(f"  k* = {g.plan.k_star}, predicted success {g.plan.predicted_success[-1]:.6f}")
    for i, label in enumerate(cmp.labels):
        print(f"  {label:>8}: projection {cmp.projection_frequencies[i]:.4f}  "
              f"decoherence {cmp.decoherence_distribution[i]:.4f} (distribution only)  "
              f"grover {g.empirical_frequencies[i]:.4f}")
    print(f"  inconclusive {g.inconclusive_count}/{g.trials}, TV(projection, grover) = {cmp.tv_distance:.4f}")


def main():
    cfg = SternGerlachConfig()
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--register-qubits", type=int, default=cfg.register_qubits)
    parser.add_argument("--epsilon", type=float, default=cfg.epsilon)
    parser.add_argument("--trials", type=int, default=cfg.trials)
    parser.add_argument("--seed", type=int, default=cfg.seed)
    cfg = SternGerlachConfig(**vars(parser.parse_args()))

    spec = stern_gerlach_spec()
    det = DetectorModel(cfg.epsilon)
    report(f"padded register, n = {cfg.register_qubits}",
           compare_models(spec, cfg.register_qubits, det, cfg.trials, cfg.seed))
    report("literal register, n = 1", compare_models(spec, 1, det, cfg.trials, cfg.seed))


if __name__ == "__main__":
    main()
