"""Fidelity kernels over encoded states, exact or shot-sampled, plus the RBF baseline.

The exact quantum kernel is |<psi(x)|psi(y)>|^2. The shot estimator runs the
compute-uncompute circuit (encode y, un-encode x) and returns the frequency of
the all-zeros outcome, sampled from the exact output distribution with a
seeded generator, so a fixed seed reproduces the estimate bit for bit.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .featuremap import FeatureMapSpec, apply_encode_inverse, encode

# Probabilities below this are numerical noise from the gate arithmetic; they
# are zeroed before sampling so that identical inputs estimate exactly 1.
_PROB_FLOOR = 1e-15


@dataclass(frozen=True)
class RbfKernel:
    """exp(-gamma * ||x - y||^2), the classical baseline kernel."""

    gamma: float

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise ConfigError(f"gamma must be positive and finite, got {self.gamma!r}")


@dataclass
class GramMatrix:
    """Symmetric kernel matrix with provenance of how it was produced."""

    values: np.ndarray
    mode: str  # "exact" | "shots"
    kernel_id: str
    shots: int | None = None
    seed: int | None = None

    @property
    def size(self) -> int:
        return self.values.shape[0]


@dataclass
class CrossBlock:
    """Rectangular test-by-train kernel block. No symmetry claim."""

    values: np.ndarray
    mode: str
    kernel_id: str


def kernel_id_of(descriptor) -> str:
    """Stable identifier tying kernel values to the kernel that produced them."""
    if isinstance(descriptor, FeatureMapSpec):
        blob = json.dumps(descriptor.to_dict(), sort_keys=True).encode()
        return "qfm-" + hashlib.sha256(blob).hexdigest()[:12]
    if isinstance(descriptor, RbfKernel):
        return f"rbf-gamma={descriptor.gamma!r}"
    raise TypeError(f"unsupported kernel descriptor {type(descriptor).__name__}")


def quantum_kernel_exact(spec: FeatureMapSpec, x: np.ndarray, y: np.ndarray) -> float:
    """Squared fidelity of the two encoded states; in [0, 1]."""
    from .statevec import inner_product

    return float(abs(inner_product(encode(spec, x), encode(spec, y))) ** 2)


def _zero_outcome_probs(spec: FeatureMapSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    composed = apply_encode_inverse(spec, x, encode(spec, y))
    probs = np.abs(composed.amplitudes) ** 2
    probs[probs < _PROB_FLOOR] = 0.0
    return probs / probs.sum()


def quantum_kernel_shots(
    spec: FeatureMapSpec, x: np.ndarray, y: np.ndarray, shots: int, seed: int
) -> float:
    """Estimate the kernel as the all-zeros frequency over `shots` basis samples."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = _zero_outcome_probs(spec, x, y)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return counts[0] / shots


def rbf_kernel(gamma: float, x: np.ndarray, y: np.ndarray) -> float:
    """exp(-gamma * ||x - y||^2)."""
    if not np.isfinite(gamma) or gamma <= 0:
        raise ConfigError(f"gamma must be positive and finite, got {gamma!r}")
    d = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return float(np.exp(-gamma * np.dot(d, d)))


def default_rbf_gamma(rows: np.ndarray) -> float:
    """1 / (dimension * feature variance), the scale heuristic."""
    rows = np.asarray(rows, dtype=np.float64)
    var = rows.var()
    if var == 0:
        raise ConfigError("cannot derive a gamma from zero-variance data")
    return float(1.0 / (rows.shape[1] * var))


def _encode_rows(spec: FeatureMapSpec, rows: np.ndarray) -> np.ndarray:
    """Stack encoded statevectors as a (m, 2^n) complex matrix."""
    return np.stack([encode(spec, row).amplitudes for row in rows])


def _rbf_block(gamma: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sq = (
        (a**2).sum(axis=1)[:, None]
        + (b**2).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.clip(sq, 0.0, None))


def _pair_seed(seed: int, i: int, j: int) -> int:
    """Order-independent deterministic substream seed for pair (i, j)."""
    return int(np.random.SeedSequence(seed, spawn_key=(i, j)).generate_state(1)[0])


def _check_rows(rows: np.ndarray, what: str) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise ValueError(f"{what} must be a non-empty 2-D matrix, got shape {rows.shape}")
    return rows


def gram(
    descriptor,
    rows: np.ndarray,
    mode: str = "exact",
    shots: int | None = None,
    seed: int | None = None,
    threads: int = 1,
) -> GramMatrix:
    """Pairwise kernel matrix over the data rows.

    Each unordered pair is computed once and mirrored, so the result is
    symmetric bit for bit; the diagonal is set to exactly 1. In shot mode the
    pair (i, j) samples from its own seed substream, making the matrix
    independent of evaluation order and thread count.
    """
    rows = _check_rows(rows, "data")
    m = rows.shape[0]
    kid = kernel_id_of(descriptor)

    if isinstance(descriptor, RbfKernel):
        if mode != "exact":
            raise ConfigError("the RBF kernel has no shot mode")
        values = _rbf_block(descriptor.gamma, rows, rows)
        values = np.triu(values)
        values = values + np.triu(values, 1).T
        np.fill_diagonal(values, 1.0)
        return GramMatrix(values=values, mode="exact", kernel_id=kid)

    spec = descriptor
    if mode == "exact":
        states = _encode_rows(spec, rows)
        values = np.abs(states.conj() @ states.T) ** 2
        values = np.triu(values)
        values = values + np.triu(values, 1).T
        np.fill_diagonal(values, 1.0)
        return GramMatrix(values=values, mode="exact", kernel_id=kid)

    if mode != "shots":
        raise ConfigError(f"mode must be 'exact' or 'shots', got {mode!r}")
    if shots is None or shots < 1:
        raise ValueError(f"shot mode needs shots >= 1, got {shots!r}")
    if seed is None:
        raise ValueError("shot mode needs a seed")

    values = np.ones((m, m))
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]

    def estimate(pair):
        i, j = pair
        return quantum_kernel_shots(spec, rows[i], rows[j], shots, _pair_seed(seed, i, j))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(estimate, pairs))
    else:
        results = [estimate(p) for p in pairs]
    for (i, j), v in zip(pairs, results):
        values[i, j] = v
        values[j, i] = v
    return GramMatrix(values=values, mode="shots", kernel_id=kid, shots=shots, seed=seed)


def gram_cross(
    descriptor,
    train_rows: np.ndarray,
    test_rows: np.ndarray,
    mode: str = "exact",
    shots: int | None = None,
    seed: int | None = None,
    threads: int = 1,
) -> CrossBlock:
    """|test| x |train| kernel block between two row sets."""
    train_rows = _check_rows(train_rows, "train rows")
    test_rows = _check_rows(test_rows, "test rows")
    kid = kernel_id_of(descriptor)

    if isinstance(descriptor, RbfKernel):
        if mode != "exact":
            raise ConfigError("the RBF kernel has no shot mode")
        return CrossBlock(
            values=_rbf_block(descriptor.gamma, test_rows, train_rows),
            mode="exact",
            kernel_id=kid,
        )

    spec = descriptor
    if mode == "exact":
        s_test = _encode_rows(spec, test_rows)
        s_train = _encode_rows(spec, train_rows)
        values = np.abs(s_test.conj() @ s_train.T) ** 2
        return CrossBlock(values=values, mode="exact", kernel_id=kid)

    if mode != "shots":
        raise ConfigError(f"mode must be 'exact' or 'shots', got {mode!r}")
    if shots is None or shots < 1:
        raise ValueError(f"shot mode needs shots >= 1, got {shots!r}")
    if seed is None:
        raise ValueError("shot mode needs a seed")

    n_test, n_train = test_rows.shape[0], train_rows.shape[0]
    cells = [(i, j) for i in range(n_test) for j in range(n_train)]

    def estimate(cell):
        i, j = cell
        return quantum_kernel_shots(
            spec, test_rows[i], train_rows[j], shots, _pair_seed(seed, i, j)
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(estimate, cells))
    else:
        results = [estimate(c) for c in cells]
    values = np.array(results).reshape(n_test, n_train)
    return CrossBlock(values=values, mode="shots", kernel_id=kid)
