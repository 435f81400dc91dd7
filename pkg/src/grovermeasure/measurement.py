"""Measurement models: projection, decoherence, and a Grover-running apparatus.

The apparatus model works like this. A target outcome ``t`` is drawn with Born
weight ``|c_t|^2``. An ``n``-qubit register starts in the uniform state. It
then runs ``k*`` Grover iterations with the single solution ``slot(t)``.
Outcomes whose register probability falls below the detector threshold are
invisible. A trial is conclusive when exactly one pointer outcome stays
visible.

Drawing the target by Born weight is an input to the model. The mechanism
itself does not explain where it comes from.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .grover import GroverPlan, MarkedSet, optimal_iterations, run_grover
from .statevector import (
    MAX_QUBITS,
    StateVector,
    born_sample,
    check_n_qubits,
    random_source,
    sample_index,
)

COEFF_TOL = 1e-10
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-8
PSD_CHECK_MAX_DIM = 64
DEFAULT_REGISTER_QUBITS = 8
DEFAULT_EPSILON = 0.01
DEFAULT_SEED = 1

# substream tags for random_source(seed, tag, trial)
GROVER_STREAM = 0
PROJECTION_STREAM = 1

CONVENTION_NOTES = {
    "density_matrix": "rho = |Psi><Psi|, entries_ij = c_i * conj(c_j); the conjugate-first "
    "ordering conj(c_i) * c_j is its transpose and agrees for real coefficients",
    "slot_mapping": "pointer outcome i occupies register index i; all other register "
    "indices are non-solution apparatus microstates",
    "target_selection": "the marked outcome is drawn with Born weight |c_t|^2 (model input)",
    "detector": "an outcome is visible iff its register probability >= epsilon",
    "decoherence": "distribution-only: the reduced density matrix has no individual-event mechanism",
}


class RegisterTooSmallError(ValueError):
    """The pointer outcomes do not fit into the apparatus register."""


@dataclass
class SystemSpec:
    coefficients: np.ndarray
    outcome_labels: list[str] = field(default_factory=list)
    pointer_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or c.shape[0] < 2:
            raise ValueError("a system needs at least two outcome coefficients")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        total = float(np.sum(np.abs(c) ** 2))
        if abs(total - 1.0) > COEFF_TOL:
            raise ValueError(f"sum |c_i|^2 = {total!r}, expected 1")
        self.coefficients = c
        n_out = c.shape[0]
        if not self.outcome_labels:
            self.outcome_labels = [f"a{i}" for i in range(n_out)]
        if not self.pointer_labels:
            self.pointer_labels = [f"X{i}" for i in range(n_out)]
        self.outcome_labels = [str(s) for s in self.outcome_labels]
        self.pointer_labels = [str(s) for s in self.pointer_labels]
        if len(self.outcome_labels) != n_out or len(self.pointer_labels) != n_out:
            raise ValueError(f"label arrays must have length {n_out}")

    @property
    def n_out(self) -> int:
        return self.coefficients.shape[0]

    @property
    def born_weights(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


def stern_gerlach_spec() -> SystemSpec:
    amp = 1.0 / math.sqrt(2.0)
    return SystemSpec(
        np.array([amp, amp]),
        outcome_labels=["up", "down"],
        pointer_labels=["(x1,y1)", "(x2,y2)"],
    )


class DensityMatrix:
    __slots__ = ("entries",)

    def __init__(self, entries):
        rho = np.array(entries, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise ValueError(f"density matrix trace is {tr}, expected 1")
        if rho.shape[0] <= PSD_CHECK_MAX_DIM:
            if np.min(np.linalg.eigvalsh(rho)) < -PSD_TOL:
                raise ValueError("density matrix is not positive semidefinite")
        self.entries = rho

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()


def pure_density_matrix(spec: SystemSpec) -> DensityMatrix:
    c = spec.coefficients
    return DensityMatrix(np.outer(c, c.conj()))


def project_reduce(rho: DensityMatrix) -> DensityMatrix:
    """Sum of P_i rho P_i over pointer projectors P_i = |X_i><X_i|."""
    dim = rho.dim
    out = np.zeros_like(rho.entries)
    for i in range(dim):
        proj = np.zeros((dim, dim), dtype=np.complex128)
        proj[i, i] = 1.0
        out += proj @ rho.entries @ proj
    return DensityMatrix(out)


def coherence_norm(rho: DensityMatrix) -> float:
    """L1 norm of the off-diagonal part."""
    off = np.abs(rho.entries)
    np.fill_diagonal(off, 0.0)
    return float(off.sum())


def slot(i: int) -> int:
    return i


def _check_register(spec: SystemSpec, register_qubits: int) -> int:
    n = check_n_qubits(register_qubits)
    if spec.n_out > (1 << n):
        raise RegisterTooSmallError(
            f"{spec.n_out} pointer outcomes do not fit in a {n}-qubit register"
        )
    return n


def build_entangled_state(spec: SystemSpec, register_qubits: int) -> StateVector:
    """sum_i c_i |S_i>|X_i>, with the pair (S_i, X_i) stored at slot(i)."""
    n = _check_register(spec, register_qubits)
    amps = np.zeros(1 << n, dtype=np.complex128)
    for i, c in enumerate(spec.coefficients):
        amps[slot(i)] = c
    return StateVector(amps, copy=False)


@dataclass(frozen=True)
class DetectorModel:
    threshold_epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        eps = self.threshold_epsilon
        if not (isinstance(eps, (int, float)) and 0.0 < eps < 1.0):
            raise ValueError(f"detector threshold must lie in (0, 1), got {eps!r}")


@dataclass
class MeasurementEvent:
    target_index: int
    registered_index: int | None
    detectable_set: frozenset[int]
    conclusive: bool
    final_probabilities: np.ndarray


@dataclass
class RunStats:
    trials: int
    counts: list[int]
    inconclusive_count: int
    empirical_frequencies: list[float]
    plan: GroverPlan
    register_qubits: int
    events: list[tuple[int, int, int | None, bool]] | None = None

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "register_qubits": self.register_qubits,
            "plan": self.plan.to_dict(),
            "counts": list(self.counts),
            "inconclusive": self.inconclusive_count,
            "frequencies": list(self.empirical_frequencies),
        }


@dataclass
class ModelComparison:
    labels: list[str]
    projection_counts: list[int]
    projection_frequencies: list[float]
    decoherence_distribution: list[float]
    grover: RunStats
    tv_distance: float

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "projection": {
                "counts": list(self.projection_counts),
                "frequencies": list(self.projection_frequencies),
            },
            "decoherence": {
                "kind": "distribution-only",
                "distribution": list(self.decoherence_distribution),
            },
            "grover": self.grover.to_dict(),
            "tv_distance": self.tv_distance,
        }


@lru_cache(maxsize=256)
def _amplified_pointer_probs(register_qubits: int, target_slot: int, k: int) -> np.ndarray:
    # the post-Grover register depends only on (n, slot, k); reuse across trials
    state = run_grover(register_qubits, MarkedSet.of(register_qubits, target_slot), k)
    probs = state.probabilities()
    probs.setflags(write=False)
    return probs


def _event(spec: SystemSpec, n: int, k: int, detector: DetectorModel,
           rng: np.random.Generator) -> MeasurementEvent:
    target = sample_index(spec.born_weights, rng)
    reg_probs = _amplified_pointer_probs(n, slot(target), k)
    final = np.array([reg_probs[slot(i)] for i in range(spec.n_out)])
    visible = frozenset(int(i) for i in np.flatnonzero(final >= detector.threshold_epsilon))
    conclusive = len(visible) == 1
    registered = next(iter(visible)) if conclusive else None
    return MeasurementEvent(target, registered, visible, conclusive, final)


def run_measurement_event(spec: SystemSpec, register_qubits: int, detector: DetectorModel,
                          rng: np.random.Generator) -> MeasurementEvent:
    n = _check_register(spec, register_qubits)
    if not isinstance(detector, DetectorModel):
        raise TypeError("detector must be a DetectorModel")
    k = optimal_iterations(1 << n, 1).k_star
    return _event(spec, n, k, detector, rng)


def _trial_chunk(args):
    spec, n, k, detector, seed, lo, hi = args
    rows = []
    for trial in range(lo, hi):
        ev = _event(spec, n, k, detector, random_source(seed, GROVER_STREAM, trial))
        rows.append((trial, ev.target_index, ev.registered_index, ev.conclusive))
    return rows


def _chunks(trials: int, parts: int):
    step = max(1, math.ceil(trials / parts))
    return [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]


def run_experiment(spec: SystemSpec, register_qubits: int, detector: DetectorModel,
                   trials: int, seed: int = DEFAULT_SEED, *, parallel: int = 1,
                   keep_events: bool = False) -> RunStats:
    """Aggregate independent measurement events.

    Trial ``i`` draws from its own substream of ``seed``; counts are integer
    sums, so ``parallel`` changes wall time but never the result.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n = _check_register(spec, register_qubits)
    plan = optimal_iterations(1 << n, 1)
    jobs = [(spec, n, plan.k_star, detector, seed, lo, hi)
            for lo, hi in _chunks(trials, max(1, parallel))]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            parts = list(pool.map(_trial_chunk, jobs))
    else:
        parts = [_trial_chunk(job) for job in jobs]

    counts = [0] * spec.n_out
    inconclusive = 0
    events = []
    for rows in parts:
        for row in rows:
            if row[3]:
                counts[row[2]] += 1
            else:
                inconclusive += 1
        if keep_events:
            events.extend(rows)
    events.sort()
    freqs = [c / trials for c in counts]
    return RunStats(trials, counts, inconclusive, freqs, plan, n,
                    events if keep_events else None)


def projection_sample(spec: SystemSpec, register_qubits: int, trials: int,
                      seed: int = DEFAULT_SEED) -> list[int]:
    """Counts from direct Born sampling of the entangled state (process 1)."""
    state = build_entangled_state(spec, register_qubits)
    counts = [0] * spec.n_out
    for trial in range(trials):
        xi = born_sample(state, random_source(seed, PROJECTION_STREAM, trial))
        counts[xi] += 1
    return counts


def total_variation(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p, float) - np.asarray(q, float))))


def compare_models(spec: SystemSpec, register_qubits: int, detector: DetectorModel,
                   trials: int, seed: int = DEFAULT_SEED, *, parallel: int = 1) -> ModelComparison:
    grover = run_experiment(spec, register_qubits, detector, trials, seed, parallel=parallel)
    proj_counts = projection_sample(spec, register_qubits, trials, seed)
    proj_freqs = [c / trials for c in proj_counts]
    deco = project_reduce(pure_density_matrix(spec)).diagonal()
    return ModelComparison(
        labels=list(spec.pointer_labels),
        projection_counts=proj_counts,
        projection_frequencies=proj_freqs,
        decoherence_distribution=[float(x) for x in deco],
        grover=grover,
        tv_distance=total_variation(proj_freqs, grover.empirical_frequencies),
    )


DESCRIPTOR_SCHEMA = {
    "type": "object",
    "required": ["coefficients"],
    "properties": {
        "coefficients": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
        "labels": {"type": "array", "items": {"type": "string"}},
        "pointer_labels": {"type": "array", "items": {"type": "string"}},
        "register_qubits": {"type": "integer", "minimum": 1, "maximum": MAX_QUBITS},
        "epsilon": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "strict_paper_n2": {"type": "boolean"},
    },
    "additionalProperties": False,
}


@dataclass
class ExperimentDescriptor:
    """Parsed experiment descriptor (the JSON input of ``measure``/``compare``)."""

    spec: SystemSpec
    register_qubits: int = DEFAULT_REGISTER_QUBITS
    epsilon: float = DEFAULT_EPSILON
    trials: int = 10_000
    seed: int = DEFAULT_SEED
    strict_paper_n2: bool = False

    @property
    def detector(self) -> DetectorModel:
        return DetectorModel(self.epsilon)

    @property
    def effective_register_qubits(self) -> int:
        # literal two-state register: no padding, so Grover cannot amplify
        return 1 if self.strict_paper_n2 else self.register_qubits

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentDescriptor":
        import jsonschema

        try:
            jsonschema.validate(doc, DESCRIPTOR_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ValueError(f"invalid descriptor: {exc.message}") from None
        coeffs = np.array([complex(re, im) for re, im in doc["coefficients"]])
        spec = SystemSpec(coeffs, doc.get("labels", []), doc.get("pointer_labels", []))
        kwargs = {key: doc[key] for key in
                  ("register_qubits", "epsilon", "trials", "seed", "strict_paper_n2")
                  if key in doc}
        return cls(spec, **kwargs)

    @classmethod
    def load(cls, path) -> "ExperimentDescriptor":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"descriptor {path} is not valid JSON: {exc}") from None
        return cls.from_dict(doc)


def bundled_descriptor(name: str) -> Path:
    """Path of a descriptor shipped with the package, e.g. ``stern_gerlach.json``."""
    ref = resources.files("grovermeasure") / "data" / name
    if not ref.is_file():
        raise FileNotFoundError(name)
    return Path(str(ref))


def success_by_iterations(register_qubits: int, k_max: int, target: int = 0) -> list[float]:
    """Register probability of the marked slot after k = 0..k_max iterations."""
    marked = MarkedSet.of(register_qubits, slot(target))
    return [float(run_grover(register_qubits, marked, k).probabilities()[slot(target)])
            for k in range(k_max + 1)]
