"""Dense statevector substrate.

Amplitudes live in a contiguous ``complex128`` array (interleaved real and
imaginary doubles), indexed by the computational basis integer ``xi`` with
qubit ``j`` corresponding to bit ``j`` of the index.
"""
from __future__ import annotations

import numpy as np

MAX_QUBITS = 26
NORM_TOL = 1e-8
UNITARY_TOL = 1e-8

_SQRT2_INV = 1.0 / np.sqrt(2.0)


class SizeError(ValueError):
    """Register size outside the supported range."""


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


class NormError(ArithmeticError):
    """A state drifted away from unit norm."""


class NonUnitaryError(ValueError):
    pass


def check_n_qubits(n_qubits):
    if isinstance(n_qubits, bool) or not isinstance(n_qubits, (int, np.integer)):
        raise SizeError(f"n_qubits must be an integer, got {n_qubits!r}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise SizeError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    return int(n_qubits)


def check_norm(amps: np.ndarray, tol: float = NORM_TOL) -> float:
    if not np.all(np.isfinite(amps)):
        raise NormError("state contains NaN or Inf amplitudes")
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1.0) > tol:
        raise NormError(f"state norm^2 = {norm2!r} deviates from 1 by more than {tol}")
    return norm2


class StateVector:
    """Normalized state of ``n_qubits`` qubits.

    The constructor validates length and norm; it never renormalizes.
    Operations in this package return new instances and leave inputs alone.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, *, copy: bool = True):
        if copy:
            amps = np.array(amplitudes, dtype=np.complex128)
        else:
            amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be one-dimensional")
        size = amps.shape[0]
        if size < 2 or size & (size - 1):
            raise SizeError(f"amplitude count must be a power of two >= 2, got {size}")
        check_n_qubits(size.bit_length() - 1)
        check_norm(amps)
        self.amplitudes = amps

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def _wrap(amps: np.ndarray) -> StateVector:
    # amps is a fresh array owned by the caller; skip the copy
    return StateVector(amps, copy=False)


def zero_state(n_qubits: int) -> StateVector:
    n = check_n_qubits(n_qubits)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return _wrap(amps)


def uniform_state(n_qubits: int) -> StateVector:
    n = check_n_qubits(n_qubits)
    dim = 1 << n
    return _wrap(np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128))


def hadamard_all_inplace(amps: np.ndarray) -> np.ndarray:
    """Apply H on every qubit to ``amps`` in place with butterfly passes.

    One pass per qubit, pairing indices that differ in bit ``j``; O(N log N).
    """
    dim = amps.shape[0]
    stride = 1
    scale = 1.0
    while stride < dim:
        view = amps.reshape(-1, 2, stride)
        lo = view[:, 0, :]
        hi = view[:, 1, :]
        tmp = lo - hi
        lo += hi
        hi[...] = tmp
        stride <<= 1
        scale *= _SQRT2_INV
    amps *= scale
    return amps


def apply_hadamard_all(state: StateVector) -> StateVector:
    return _wrap(hadamard_all_inplace(state.amplitudes.copy()))


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {u.shape}")
    dev = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if dev > tol:
        raise NonUnitaryError(f"matrix is not unitary (max |UU^+ - I| = {dev:.3g})")


def apply_dense_unitary(state: StateVector, u) -> StateVector:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape != (state.dim, state.dim):
        raise DimensionError(f"matrix shape {u.shape} does not match state dimension {state.dim}")
    check_unitary(u)
    return _wrap(u @ state.amplitudes)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def probability(state: StateVector, index: int) -> float:
    if not 0 <= index < state.dim:
        raise IndexError(f"index {index} out of range for dimension {state.dim}")
    return float(abs(state.amplitudes[index]) ** 2)


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Draw one index from a discrete distribution via inverse CDF."""
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    return min(int(np.searchsorted(cdf, u, side="right")), len(probs) - 1)


def random_source(seed: int, *stream: int) -> np.random.Generator:
    """Seeded generator for the substream ``stream`` of ``seed``.

    Substreams are derived by seed splitting, so trial ``i`` gets the same
    draws no matter which worker runs it or in what order.
    """
    if seed < 0 or seed >= 1 << 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=stream)))


def born_sample(state: StateVector, rng: np.random.Generator) -> int:
    return sample_index(state.probabilities(), rng)
