"""Data-encoding circuit: a second-order phase map preceded by Hadamard layers.

Each repetition applies H on every qubit, then exp(+i*phi_k(x)*Z_k) per qubit,
then exp(+i*phi_jk(x)*Z_j Z_k) per entangled pair. Without the Hadamard layer
the circuit would be diagonal and every pairwise fidelity would equal 1, so the
superposition layer is part of the map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError
from .statevec import (
    MAX_QUBITS,
    QuantumState,
    apply_hadamard,
    apply_phase_z,
    apply_zz_phase,
    zero_state,
)

PhiSingle = Callable[[np.ndarray, int], float]
PhiPair = Callable[[np.ndarray, int, int], float]

ENTANGLEMENTS = ("linear", "full")


def _standard_single(x: np.ndarray, k: int) -> float:
    return float(x[k])


def _standard_pair(x: np.ndarray, j: int, k: int) -> float:
    return float((math.pi - x[j]) * (math.pi - x[k]))


# name -> (single-qubit phase family, pair phase family)
PHI_FAMILIES: dict[str, tuple[PhiSingle, PhiPair]] = {
    "standard-zz": (_standard_single, _standard_pair),
}


def register_phi_family(name: str, phi_single: PhiSingle, phi_pair: PhiPair) -> None:
    """Register a named phase-function family for use in FeatureMapSpec."""
    PHI_FAMILIES[name] = (phi_single, phi_pair)


@dataclass(frozen=True)
class FeatureMapSpec:
    """Immutable description of the encoding circuit for one feature dimension."""

    num_qubits: int
    repetitions: int = 2
    entanglement: str = "linear"
    phi: str = "standard-zz"
    feature_range: tuple[float, float] = (0.0, math.pi)

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ConfigError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.entanglement not in ENTANGLEMENTS:
            raise ConfigError(
                f"entanglement must be one of {ENTANGLEMENTS}, got {self.entanglement!r}"
            )
        if self.phi not in PHI_FAMILIES:
            raise ConfigError(f"unknown phi family {self.phi!r}")
        lo, hi = self.feature_range
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ConfigError(f"feature_range must be finite with lo < hi, got {self.feature_range}")
        object.__setattr__(self, "feature_range", (float(lo), float(hi)))

    @property
    def phi_single(self) -> PhiSingle:
        return PHI_FAMILIES[self.phi][0]

    @property
    def phi_pair(self) -> PhiPair:
        return PHI_FAMILIES[self.phi][1]

    def entanglement_pairs(self) -> list[tuple[int, int]]:
        """Ordered, duplicate-free (j, k) pairs with j < k."""
        n = self.num_qubits
        if self.entanglement == "linear":
            return [(j, j + 1) for j in range(n - 1)]
        return [(j, k) for j in range(n) for k in range(j + 1, n)]

    def to_dict(self) -> dict:
        return {
            "qubits": self.num_qubits,
            "reps": self.repetitions,
            "entanglement": self.entanglement,
            "phi": self.phi,
            "feature_range": list(self.feature_range),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureMapSpec":
        return cls(
            num_qubits=int(d["qubits"]),
            repetitions=int(d["reps"]),
            entanglement=str(d["entanglement"]),
            phi=str(d["phi"]),
            feature_range=tuple(d["feature_range"]),
        )


def default_spec(dimension: int) -> FeatureMapSpec:
    """Two repetitions, linear entanglement, standard-zz phases, [0, pi] inputs."""
    if not 1 <= dimension <= MAX_QUBITS:
        raise ConfigError(f"dimension must be in [1, {MAX_QUBITS}], got {dimension}")
    return FeatureMapSpec(num_qubits=int(dimension))


def _check_vector(spec: FeatureMapSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (spec.num_qubits,):
        raise ValueError(f"feature vector has shape {x.shape}, spec needs ({spec.num_qubits},)")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature vector contains non-finite values")
    return x


def encode(spec: FeatureMapSpec, x: np.ndarray) -> QuantumState:
    """Encode a rescaled feature vector into a statevector. Deterministic."""
    x = _check_vector(spec, x)
    pairs = spec.entanglement_pairs()
    state = zero_state(spec.num_qubits)
    for _ in range(spec.repetitions):
        for q in range(spec.num_qubits):
            state = apply_hadamard(state, q)
        for q in range(spec.num_qubits):
            state = apply_phase_z(state, q, spec.phi_single(x, q))
        for j, k in pairs:
            state = apply_zz_phase(state, j, k, spec.phi_pair(x, j, k))
    return state


def apply_encode_inverse(spec: FeatureMapSpec, x: np.ndarray, state: QuantumState) -> QuantumState:
    """Apply the inverse of the encoding circuit for x to an existing state.

    Used by the shot-based kernel estimator: the all-zeros probability of
    apply_encode_inverse(spec, x, encode(spec, y)) is the fidelity kernel.
    """
    x = _check_vector(spec, x)
    if state.num_qubits != spec.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits, spec needs {spec.num_qubits}"
        )
    pairs = spec.entanglement_pairs()
    for _ in range(spec.repetitions):
        for j, k in reversed(pairs):
            state = apply_zz_phase(state, j, k, -spec.phi_pair(x, j, k))
        for q in reversed(range(spec.num_qubits)):
            state = apply_phase_z(state, q, -spec.phi_single(x, q))
        for q in reversed(range(spec.num_qubits)):
            state = apply_hadamard(state, q)
    return state


def fit_bounds(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension (min, max) over a 2-D data matrix, for use with rescale."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {rows.shape}")
    if not np.all(np.isfinite(rows)):
        raise ValueError("data contains non-finite values")
    return rows.min(axis=0), rows.max(axis=0)


def rescale(
    x_raw: np.ndarray,
    source_bounds: tuple[np.ndarray, np.ndarray],
    spec,
) -> np.ndarray:
    """Affine map of each dimension from [min, max] into the spec's feature range.

    `spec` may be a FeatureMapSpec or a bare (lo, hi) pair. A degenerate
    dimension (min == max) maps to the midpoint of the range. Accepts a
    single vector or a matrix of row vectors.
    """
    mins = np.asarray(source_bounds[0], dtype=np.float64)
    maxs = np.asarray(source_bounds[1], dtype=np.float64)
    if mins.shape != maxs.shape or mins.ndim != 1:
        raise ValueError("bounds must be two 1-D arrays of equal length")
    if not (np.all(np.isfinite(mins)) and np.all(np.isfinite(maxs))):
        raise ValueError("bounds contain non-finite values")
    if np.any(mins > maxs):
        raise ValueError("each dimension needs min <= max")

    x = np.asarray(x_raw, dtype=np.float64)
    squeeze = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != mins.shape[0]:
        raise ValueError(f"data has {x.shape[1]} columns, bounds have {mins.shape[0]}")

    lo, hi = spec.feature_range if isinstance(spec, FeatureMapSpec) else spec
    span = maxs - mins
    degenerate = span == 0
    safe_span = np.where(degenerate, 1.0, span)
    scaled = lo + (x - mins) / safe_span * (hi - lo)
    scaled[:, degenerate] = 0.5 * (lo + hi)
    return scaled[0] if squeeze else scaled
