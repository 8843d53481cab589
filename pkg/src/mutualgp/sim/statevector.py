"""Dense N-qubit state vectors.

Site 0 is the leftmost tensor factor, i.e. the most significant bit of the
computational-basis index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import DickeSuperposition, ReducedQubit
from ..errors import IndexOutOfRange, TooLarge

MAX_QUBITS = 14


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 1 << self.n_qubits:
            raise ValueError(f"need 2**{self.n_qubits} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state not normalised (|psi| = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _check_size(n, max_qubits):
    if n > max_qubits:
        raise TooLarge(f"{n} qubits exceeds the statevector cap of {max_qubits}")


def hamming_weights(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return sum((idx >> b) & 1 for b in range(n))


def dicke_state(n: int, k: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    """Equal-weight superposition of all basis strings with ``k`` ones."""
    _check_size(n, max_qubits)
    if not 0 <= k <= n:
        raise IndexOutOfRange(f"k={k} outside [0, {n}]")
    amps = np.where(hamming_weights(n) == k, 1.0 / math.sqrt(math.comb(n, k)), 0.0)
    return StateVector(n, amps.astype(complex))


def superpose(state: DickeSuperposition, max_qubits: int = MAX_QUBITS) -> StateVector:
    """Dense vector of ``sum_k a_k |N,k>``."""
    n = state.n_qubits
    _check_size(n, max_qubits)
    w = hamming_weights(n)
    norms = np.array([math.sqrt(math.comb(n, k)) for k in range(n + 1)])
    amps = (state.amps / norms)[w]
    return StateVector(n, amps)


def random_state(n: int, rng: np.random.Generator, max_qubits: int = MAX_QUBITS) -> StateVector:
    """Haar-random pure state."""
    _check_size(n, max_qubits)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, v / np.linalg.norm(v))


def apply_local(psi: StateVector, ops) -> np.ndarray:
    """Amplitudes of ``(ops[0] (x) ... (x) ops[N-1]) |psi>`` without forming the big matrix."""
    x = psi.tensor()
    for n, op in enumerate(ops):
        x = np.moveaxis(np.tensordot(op, x, axes=([1], [n])), 0, n)
    return x.reshape(-1)


def partial_trace_single(psi: StateVector, site: int) -> ReducedQubit:
    """Reduced density matrix of one qubit (the rest traced out)."""
    n = psi.n_qubits
    if not 0 <= site < n:
        raise IndexOutOfRange(f"site {site} outside [0, {n})")
    x = psi.amplitudes.reshape(1 << site, 2, 1 << (n - site - 1))
    rho = np.einsum("iaj,ibj->ab", x, x.conj())
    rho = rho / np.trace(rho).real
    return ReducedQubit.from_matrix(rho)
