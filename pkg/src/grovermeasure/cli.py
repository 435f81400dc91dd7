"""Command-line front end: ``plan``, ``run``, ``measure`` and ``compare``.

Exit codes: 0 success, 2 usage or validation error, 3 infeasible
configuration (pointer outcomes do not fit in the register).
Every random draw derives from ``--seed`` (default 1), so repeated
invocations print byte-identical output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import bruteforce
from .grover import MarkedSet, optimal_iterations, predict_state, run_grover
from .measurement import (
    CONVENTION_NOTES,
    DEFAULT_SEED,
    ExperimentDescriptor,
    RegisterTooSmallError,
    bundled_descriptor,
    compare_models,
    run_experiment,
    success_by_iterations,
)
from .statevector import MAX_QUBITS

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

STRICT_K_MAX = 8


class UsageError(Exception):
    pass


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _n_qubits(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= n <= MAX_QUBITS:
        raise argparse.ArgumentTypeError(f"must be in [1, {MAX_QUBITS}], got {n}")
    return n


def _iterations(text: str):
    if text == "auto":
        return "auto"
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer or 'auto', got {text!r}") from None
    if k < 0:
        raise argparse.ArgumentTypeError(f"iteration count must be >= 0, got {k}")
    return k


def _seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= seed < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return seed


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _marked_indices(values) -> list[int]:
    out = []
    for chunk in values:
        for part in chunk.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                out.append(int(part))
            except ValueError:
                raise UsageError(f"marked index {part!r} is not an integer") from None
    return out


def cmd_plan(args) -> str:
    n_big = 1 << args.n_qubits
    if not 1 <= args.m <= n_big:
        raise UsageError(f"--m must be in [1, {n_big}], got {args.m}")
    plan = optimal_iterations(n_big, args.m)
    if args.format == "csv":
        return _csv(["k", "predicted_success"], enumerate(plan.predicted_success))
    return dumps(plan.to_dict())


def cmd_run(args) -> str:
    try:
        marked = MarkedSet(args.n_qubits, tuple(_marked_indices(args.marked)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    n_big, m = marked.n_big, marked.m
    plan = optimal_iterations(n_big, m)
    k = plan.k_star if args.k == "auto" else args.k
    state = run_grover(args.n_qubits, marked, k)
    probs = state.probabilities()
    alpha, beta = predict_state(n_big, m, k)

    mask = marked.mask()
    predicted_amps = np.where(mask, beta / math.sqrt(m), alpha / math.sqrt(n_big - m) if n_big > m else 0.0)
    deviation = float(np.max(np.abs(state.amplitudes - predicted_amps)))
    report = {
        "n_qubits": args.n_qubits,
        "k": k,
        "plan": plan.to_dict() if args.k == "auto" else None,
        "solution_probabilities": {str(i): float(probs[i]) for i in marked.solutions},
        "max_non_solution_probability": float(probs[~mask].max()) if n_big > m else 0.0,
        "predicted": {
            "alpha": alpha,
            "beta": beta,
            "success": beta * beta,
            "per_solution_probability": beta * beta / m,
            "per_non_solution_probability": alpha * alpha / (n_big - m) if n_big > m else 0.0,
        },
        "deviation": deviation,
    }
    if args.n_qubits <= bruteforce.MAX_DENSE_QUBITS and k <= bruteforce.MAX_CHECK_ITERATIONS:
        report["bruteforce_deviation"] = bruteforce.check_equivalence(args.n_qubits, marked, k)
    if args.format == "csv":
        return _csv(["index", "marked", "probability"],
                    ((i, int(mask[i]), float(probs[i])) for i in range(n_big)))
    return dumps(report)


def _load_descriptor(args) -> ExperimentDescriptor:
    path = args.descriptor
    if not os.path.exists(path):
        try:
            path = bundled_descriptor(os.path.basename(path))
        except FileNotFoundError:
            raise UsageError(f"descriptor not found: {args.descriptor}") from None
    try:
        desc = ExperimentDescriptor.load(path)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.seed is not None:
        desc.seed = args.seed
    if args.trials is not None:
        desc.trials = args.trials
    if args.strict_paper_n2:
        desc.strict_paper_n2 = True
    return desc


def _write_events(path, stats) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "target", "registered", "conclusive"])
        for trial, target, registered, conclusive in stats.events:
            writer.writerow([trial, target, "" if registered is None else registered, int(conclusive)])


def _descriptor_meta(desc: ExperimentDescriptor) -> dict:
    return {
        "labels": desc.spec.pointer_labels,
        "outcome_labels": desc.spec.outcome_labels,
        "born_weights": [float(w) for w in desc.spec.born_weights],
        "register_qubits": desc.effective_register_qubits,
        "epsilon": desc.epsilon,
        "trials": desc.trials,
        "seed": desc.seed,
        "strict_paper_n2": desc.strict_paper_n2,
    }


def cmd_measure(args) -> str:
    desc = _load_descriptor(args)
    n = desc.effective_register_qubits
    stats = run_experiment(desc.spec, n, desc.detector, desc.trials, desc.seed,
                           parallel=args.parallel, keep_events=args.events is not None)
    if args.events is not None:
        _write_events(args.events, stats)
    if args.format == "csv":
        rows = [(label, c, f) for label, c, f in
                zip(desc.spec.pointer_labels, stats.counts, stats.empirical_frequencies)]
        rows.append(("inconclusive", stats.inconclusive_count, stats.inconclusive_count / stats.trials))
        return _csv(["outcome", "count", "frequency"], rows)
    report = _descriptor_meta(desc)
    report.update({
        "plan": stats.plan.to_dict(),
        "counts": stats.counts,
        "inconclusive": stats.inconclusive_count,
        "frequencies": stats.empirical_frequencies,
        "tv_distance": None,
        "convention_notes": CONVENTION_NOTES,
    })
    if desc.strict_paper_n2:
        report["success_by_k"] = success_by_iterations(n, STRICT_K_MAX)
    return dumps(report)


def cmd_compare(args) -> str:
    desc = _load_descriptor(args)
    n = desc.effective_register_qubits
    cmp = compare_models(desc.spec, n, desc.detector, desc.trials, desc.seed, parallel=args.parallel)
    if args.format == "csv":
        rows = zip(cmp.labels, cmp.projection_frequencies, cmp.decoherence_distribution,
                   cmp.grover.empirical_frequencies)
        return _csv(["outcome", "projection", "decoherence", "grover"], rows)
    report = _descriptor_meta(desc)
    body = cmp.to_dict()
    report.update({
        "plan": cmp.grover.plan.to_dict(),
        "counts": cmp.grover.counts,
        "inconclusive": cmp.grover.inconclusive_count,
        "frequencies": cmp.grover.empirical_frequencies,
        "tv_distance": cmp.tv_distance,
        "models": {k: body[k] for k in ("projection", "decoherence", "grover")},
        "convention_notes": CONVENTION_NOTES,
    })
    return dumps(report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grovermeasure",
        description="Grover amplitude amplification and a Grover-driven measurement model.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("plan", parents=[common], help="closed-form iteration plan")
    p.add_argument("--n-qubits", type=_n_qubits, required=True)
    p.add_argument("--m", type=int, default=1, help="number of solutions")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", parents=[common], help="simulate G^k on the uniform state")
    p.add_argument("--n-qubits", type=_n_qubits, required=True)
    p.add_argument("--marked", nargs="+", required=True, help="solution indices (space or comma separated)")
    p.add_argument("--k", type=_iterations, default="auto")
    p.set_defaults(func=cmd_run)

    for name, func, text in (("measure", cmd_measure, "simulate Grover-mechanism measurement events"),
                             ("compare", cmd_compare, "projection vs decoherence vs Grover mechanism")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("descriptor", help="experiment descriptor JSON (bundled: stern_gerlach.json)")
        p.add_argument("--seed", type=_seed, default=None,
                       help=f"overrides the descriptor seed (descriptor default {DEFAULT_SEED})")
        p.add_argument("--trials", type=_positive, default=None)
        p.add_argument("--parallel", type=_positive, default=1, metavar="T")
        p.add_argument("--strict-paper-n2", action="store_true",
                       help="use the literal 1-qubit register with no padding")
        if name == "measure":
            p.add_argument("--events", default=None, metavar="CSV", help="write one row per trial")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RegisterTooSmallError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
