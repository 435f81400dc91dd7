"""Grover iteration on statevectors and its closed-form rotation model.

The oracle is applied in phase form, ``|xi> -> (-1)^f(xi) |xi>``, which is the
exact effect of the bit-flip oracle when the ancilla sits in
``(|0> - |1>)/sqrt(2)``; no ancilla qubit is simulated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .statevector import (
    DimensionError,
    StateVector,
    check_n_qubits,
    check_norm,
    check_unitary,
    hadamard_all_inplace,
    zero_state,
    _wrap,
)

# half-integer ties in the k* rounding are resolved downward within this slack
TIE_TOL = 1e-12


@dataclass(frozen=True)
class MarkedSet:
    """Solution indices of the search problem, i.e. the support of f."""

    n_qubits: int
    solutions: tuple[int, ...]
    _index: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = check_n_qubits(self.n_qubits)
        dim = 1 << n
        sols = tuple(int(s) for s in self.solutions)
        if not sols:
            raise ValueError("a marked set needs at least one solution (M >= 1)")
        if len(set(sols)) != len(sols):
            raise ValueError(f"duplicate solution indices in {sols}")
        bad = [s for s in sols if not 0 <= s < dim]
        if bad:
            raise ValueError(f"solution indices {bad} out of range [0, {dim})")
        sols = tuple(sorted(sols))
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "solutions", sols)
        idx = np.array(sols, dtype=np.int64)
        idx.setflags(write=False)
        object.__setattr__(self, "_index", idx)

    @classmethod
    def of(cls, n_qubits: int, *solutions: int) -> "MarkedSet":
        return cls(n_qubits, tuple(solutions))

    @property
    def n_big(self) -> int:
        return 1 << self.n_qubits

    @property
    def m(self) -> int:
        return len(self.solutions)

    @property
    def indices(self) -> np.ndarray:
        return self._index

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n_big, dtype=bool)
        out[self._index] = True
        return out

    def __contains__(self, xi) -> bool:
        i = int(np.searchsorted(self._index, xi))
        return i < len(self._index) and self._index[i] == xi

    def __len__(self):
        return len(self.solutions)


@dataclass(frozen=True)
class GroverPlan:
    n_big: int
    m_solutions: int
    theta: float
    k_star: int
    predicted_success: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "n": self.n_big,
            "m": self.m_solutions,
            "theta": self.theta,
            "k_star": self.k_star,
            "predicted_success": list(self.predicted_success),
        }


def _check_match(state: StateVector, marked: MarkedSet) -> None:
    if state.n_qubits != marked.n_qubits:
        raise DimensionError(
            f"state has {state.n_qubits} qubits but marked set is over {marked.n_qubits}"
        )


def _check_counts(n_big: int, m: int) -> None:
    if n_big < 1:
        raise ValueError(f"search space size must be >= 1, got {n_big}")
    if not 1 <= m <= n_big:
        raise ValueError(f"number of solutions must satisfy 1 <= M <= N, got M={m}, N={n_big}")


# in-place kernels on raw amplitude arrays; callers own the buffers

def _oracle_inplace(amps: np.ndarray, marked: MarkedSet) -> None:
    amps[marked.indices] *= -1.0


def _diffusion_inplace(amps: np.ndarray) -> None:
    # 2|psi><psi| - I on the uniform |psi>: inversion about the mean
    mean = amps.mean()
    np.subtract(2.0 * mean, amps, out=amps)


def apply_oracle(state: StateVector, marked: MarkedSet) -> StateVector:
    _check_match(state, marked)
    amps = state.amplitudes.copy()
    _oracle_inplace(amps, marked)
    return _wrap(amps)


def apply_phase_shift_zero(state: StateVector) -> StateVector:
    """2|0><0| - I: every basis state except |0> picks up a sign."""
    amps = -state.amplitudes
    amps[0] = -amps[0]
    return _wrap(amps)


def apply_diffusion(state: StateVector) -> StateVector:
    amps = state.amplitudes.copy()
    _diffusion_inplace(amps)
    return _wrap(amps)


def grover_step(state: StateVector, marked: MarkedSet) -> StateVector:
    _check_match(state, marked)
    amps = state.amplitudes.copy()
    _oracle_inplace(amps, marked)
    _diffusion_inplace(amps)
    return _wrap(amps)


def apply_generalized_diffusion(state: StateVector, u) -> StateVector:
    """U (2|0><0| - I) U^dagger with an arbitrary unitary ``u`` in place of H^n.

    Only the first column of ``u`` matters: the result is 2|u0><u0|s> - |s>.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (state.dim, state.dim):
        raise DimensionError(f"matrix shape {u.shape} does not match state dimension {state.dim}")
    check_unitary(u)
    col = u[:, 0]
    amps = 2.0 * np.vdot(col, state.amplitudes) * col - state.amplitudes
    return _wrap(amps)


def rotation_angle(n_big: int, m: int) -> float:
    """theta with cos(theta/2) = sqrt((N - M)/N), in (0, pi]."""
    _check_counts(n_big, m)
    # arcsin form keeps full relative precision when M/N is tiny
    return 2.0 * math.asin(math.sqrt(m / n_big))


def predict_state(n_big: int, m: int, k: int) -> tuple[float, float]:
    """Coefficients of G^k|psi> on the non-solution / solution states."""
    if k < 0:
        raise ValueError(f"iteration count must be >= 0, got {k}")
    half = (2 * k + 1) * rotation_angle(n_big, m) / 2.0
    return math.cos(half), math.sin(half)


def optimal_iterations(n_big: int, m: int) -> GroverPlan:
    theta = rotation_angle(n_big, m)
    x = math.pi / (2.0 * theta) - 0.5
    lower = math.floor(x)
    if abs(x - lower - 0.5) <= TIE_TOL:
        k_star = lower
    else:
        k_star = math.floor(x + 0.5)
    k_star = max(0, int(k_star))
    success = tuple(math.sin((2 * k + 1) * theta / 2.0) ** 2 for k in range(k_star + 1))
    return GroverPlan(n_big, m, theta, k_star, success)


def run_grover(n_qubits: int, marked: MarkedSet, k: int) -> StateVector:
    """G^k H^n |0...0>, checking the norm after every iteration."""
    if k < 0:
        raise ValueError(f"iteration count must be >= 0, got {k}")
    start = zero_state(n_qubits)
    _check_match(start, marked)
    amps = hadamard_all_inplace(start.amplitudes)
    for _ in range(k):
        _oracle_inplace(amps, marked)
        _diffusion_inplace(amps)
        check_norm(amps)
    return _wrap(amps)


def split_components(state: StateVector, marked: MarkedSet) -> tuple[complex, complex, float]:
    """Project ``state`` onto the non-solution and solution uniform states.

    Returns ``(<alpha|s>, <beta|s>, leakage)`` where ``leakage`` is the norm of
    the part of ``s`` outside their span. When every index is a solution the
    non-solution state does not exist and its coefficient is reported as 0.
    """
    _check_match(state, marked)
    amps = state.amplitudes
    mask = marked.mask()
    m = marked.m
    rest = marked.n_big - m
    sol = amps[mask]
    non = amps[~mask]
    b = sol.sum() / math.sqrt(m)
    a = non.sum() / math.sqrt(rest) if rest else 0j
    resid = np.concatenate([sol - b / math.sqrt(m), non - (a / math.sqrt(rest) if rest else 0)])
    return complex(a), complex(b), float(np.linalg.norm(resid))


def uniform_components(marked: MarkedSet) -> tuple[StateVector | None, StateVector]:
    """The normalized states |alpha> (non-solutions) and |beta> (solutions)."""
    mask = marked.mask()
    beta = np.where(mask, 1.0 / math.sqrt(marked.m), 0.0).astype(np.complex128)
    rest = marked.n_big - marked.m
    alpha = None
    if rest:
        alpha = _wrap(np.where(mask, 0.0, 1.0 / math.sqrt(rest)).astype(np.complex128))
    return alpha, _wrap(beta)
