"""Dense statevector simulation of the small gate set used by the encoding circuit.

Bit ordering: bit k of a basis index addresses qubit k, so qubit 0 is the
least-significant bit. Phase gates use the positive-exponent convention
exp(+i*angle*Z) / exp(+i*angle*Z@Z), not the halved RZ convention.

All operations return a fresh state; inputs are never mutated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

MAX_QUBITS = 20  # 2^20 complex128 amplitudes ~ 16 MB per state


@dataclass
class QuantumState:
    """A pure N-qubit state as 2^N complex amplitudes."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ConfigError(
                f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}"
            )
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def zero_state(num_qubits: int) -> QuantumState:
    """|0...0>: amplitude 1 on basis index 0."""
    if not isinstance(num_qubits, (int, np.integer)) or not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigError(f"num_qubits must be an integer in [1, {MAX_QUBITS}], got {num_qubits!r}")
    amp = np.zeros(2**num_qubits, dtype=np.complex128)
    amp[0] = 1.0
    return QuantumState(int(num_qubits), amp)


def _check_qubit(state: QuantumState, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {state.num_qubits} qubits")


def apply_hadamard(state: QuantumState, qubit: int) -> QuantumState:
    """Apply the 2x2 Hadamard on one tensor factor."""
    _check_qubit(state, qubit)
    # View as (high, 2, low) with axis 1 the target qubit.
    low = 2**qubit
    high = 2 ** (state.num_qubits - qubit - 1)
    a = state.amplitudes.reshape(high, 2, low)
    out = np.empty_like(a)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    out[:, 0, :] = (a[:, 0, :] + a[:, 1, :]) * inv_sqrt2
    out[:, 1, :] = (a[:, 0, :] - a[:, 1, :]) * inv_sqrt2
    return QuantumState(state.num_qubits, out.reshape(-1))


def apply_phase_z(state: QuantumState, qubit: int, angle: float) -> QuantumState:
    """Apply exp(+i*angle*Z) on one qubit: e^{+ia} where the bit is 0, e^{-ia} where 1."""
    _check_qubit(state, qubit)
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    low = 2**qubit
    high = 2 ** (state.num_qubits - qubit - 1)
    a = state.amplitudes.reshape(high, 2, low).copy()
    a[:, 0, :] *= np.exp(1j * angle)
    a[:, 1, :] *= np.exp(-1j * angle)
    return QuantumState(state.num_qubits, a.reshape(-1))


def apply_zz_phase(state: QuantumState, qubit_a: int, qubit_b: int, angle: float) -> QuantumState:
    """Apply exp(+i*angle*Z@Z): e^{+ia} where the two bits agree, e^{-ia} where they differ."""
    _check_qubit(state, qubit_a)
    _check_qubit(state, qubit_b)
    if qubit_a == qubit_b:
        raise ValueError(f"qubit indices must differ, both are {qubit_a}")
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    idx = np.arange(2**state.num_qubits)
    differ = ((idx >> qubit_a) ^ (idx >> qubit_b)) & 1
    phase = np.where(differ == 0, np.exp(1j * angle), np.exp(-1j * angle))
    return QuantumState(state.num_qubits, state.amplitudes * phase)


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """<a|b> = sum_k conj(a_k) * b_k."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))
