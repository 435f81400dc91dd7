"""Dense-matrix reference for the Grover operators (n <= 6).

Everything here is built from explicit matrices (Kronecker products, outer
products) and shares no code with the fast in-place kernels, so it can act
as an independent oracle for them.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

from .grover import MarkedSet, run_grover

MAX_DENSE_QUBITS = 6
MAX_CHECK_ITERATIONS = 50

_H1 = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


def _check_small(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_DENSE_QUBITS:
        raise ValueError(f"dense reference supports 1 <= n <= {MAX_DENSE_QUBITS}, got {n_qubits}")


def hadamard_matrix(n_qubits: int) -> np.ndarray:
    _check_small(n_qubits)
    return reduce(np.kron, [_H1] * n_qubits)


def uniform_vector(n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    return np.ones(dim, dtype=np.complex128) / np.sqrt(dim)


def phase_shift_zero_matrix(n_qubits: int) -> np.ndarray:
    _check_small(n_qubits)
    dim = 1 << n_qubits
    e0 = np.zeros(dim, dtype=np.complex128)
    e0[0] = 1.0
    return 2.0 * np.outer(e0, e0.conj()) - np.eye(dim)


def oracle_matrix(marked: MarkedSet) -> np.ndarray:
    _check_small(marked.n_qubits)
    diag = np.array(
        [-1.0 if xi in set(marked.solutions) else 1.0 for xi in range(marked.n_big)],
        dtype=np.complex128,
    )
    return np.diag(diag)


def diffusion_matrix_hadamard(n_qubits: int) -> np.ndarray:
    """H^n (2|0><0| - I) H^n."""
    h = hadamard_matrix(n_qubits)
    return h @ phase_shift_zero_matrix(n_qubits) @ h


def diffusion_matrix_projector(n_qubits: int) -> np.ndarray:
    """2|psi><psi| - I with |psi> the uniform superposition."""
    _check_small(n_qubits)
    psi = uniform_vector(n_qubits)
    return 2.0 * np.outer(psi, psi.conj()) - np.eye(1 << n_qubits)


def grover_matrix(n_qubits: int, marked: MarkedSet, form: str = "hadamard") -> np.ndarray:
    """Full Grover step matrix, diffusion applied after the oracle."""
    if marked.n_qubits != n_qubits:
        raise ValueError(f"marked set is over {marked.n_qubits} qubits, expected {n_qubits}")
    if form == "hadamard":
        diff = diffusion_matrix_hadamard(n_qubits)
    elif form == "projector":
        diff = diffusion_matrix_projector(n_qubits)
    else:
        raise ValueError(f"unknown factorization {form!r}")
    return diff @ oracle_matrix(marked)


def factorization_gap(n_qubits: int, marked: MarkedSet) -> float:
    """Max elementwise difference between the two Grover matrix factorizations."""
    a = grover_matrix(n_qubits, marked, "hadamard")
    b = grover_matrix(n_qubits, marked, "projector")
    return float(np.max(np.abs(a - b)))


def reference_run(n_qubits: int, marked: MarkedSet, k: int) -> np.ndarray:
    g = grover_matrix(n_qubits, marked)
    e0 = np.zeros(1 << n_qubits, dtype=np.complex128)
    e0[0] = 1.0
    vec = hadamard_matrix(n_qubits) @ e0
    for _ in range(k):
        vec = g @ vec
    return vec


def check_equivalence(n_qubits: int, marked: MarkedSet, k: int) -> float:
    """Max-norm deviation between the fast path and repeated dense steps."""
    _check_small(n_qubits)
    if not 0 <= k <= MAX_CHECK_ITERATIONS:
        raise ValueError(f"k must be in [0, {MAX_CHECK_ITERATIONS}], got {k}")
    fast = run_grover(n_qubits, marked, k).amplitudes
    return float(np.max(np.abs(fast - reference_run(n_qubits, marked, k))))
