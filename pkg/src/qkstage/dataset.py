"""Synthetic dataset generators and the CSV feature-table format.

Two generators: six Gaussian clusters on simplex vertices (stand-in for the
six-stage severity labels), and a binary set labeled by a fixed quantum
kernel decision rule so that quantum-kernel separability is guaranteed by
construction.
"""
from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import featuremap, kernel
from .errors import ConfigError, ParseError

STAGE_NAMES = ("normal", "questionable", "very mild", "mild", "moderate", "severe")


@dataclass
class Dataset:
    features: np.ndarray  # (m, D) float64, finite
    labels: np.ndarray  # (m,) int64 in [0, K)
    class_names: list[str]
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("one label per feature row required")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain non-finite values")
        k = len(self.class_names)
        if k < 2:
            raise ValueError("need at least 2 classes")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= k):
            raise ValueError(f"labels must lie in [0, {k})")

    @property
    def num_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def _simplex_vertices(k: int, dim: int) -> np.ndarray:
    """k unit-norm points in `dim` dims with all pairwise distances equal.

    Needs dim >= k - 1; the vertices span exactly k - 1 dimensions and the
    remaining coordinates are zero.
    """
    centered = np.eye(k) - 1.0 / k
    # Helmert rows: an orthonormal basis of the hyperplane orthogonal to 1
    basis = np.zeros((k - 1, k))
    for i in range(1, k):
        basis[i - 1, :i] = 1.0
        basis[i - 1, i] = -float(i)
        basis[i - 1] /= np.sqrt(i * (i + 1.0))
    coords = centered @ basis.T  # (k, k-1), rows of norm sqrt((k-1)/k)
    coords /= np.sqrt((k - 1.0) / k)
    out = np.zeros((k, dim))
    out[:, : k - 1] = coords
    return out


def generate_gaussian_stages(
    seed: int, per_class: int, dim: int, class_separation: float
) -> Dataset:
    """Six unit-covariance Gaussian clusters with means on a regular simplex
    scaled by `class_separation`. Labels 0..5 in block order."""
    if per_class < 1:
        raise ConfigError(f"per_class must be >= 1, got {per_class}")
    if class_separation < 0:
        raise ConfigError(f"class_separation must be >= 0, got {class_separation}")
    k = len(STAGE_NAMES)
    if dim < k - 1:
        raise ConfigError(
            f"simplex placement of {k} class means needs dim >= {k - 1}, got {dim}"
        )
    rng = np.random.default_rng(seed)
    means = class_separation * _simplex_vertices(k, dim)
    features = rng.standard_normal((k * per_class, dim))
    labels = np.repeat(np.arange(k), per_class)
    features += means[labels]
    return Dataset(
        features=features,
        labels=labels,
        class_names=list(STAGE_NAMES),
        source={
            "kind": "synthetic",
            "generator_id": "gaussian-stages",
            "seed": int(seed),
            "params": {
                "per_class": int(per_class),
                "dim": int(dim),
                "class_separation": float(class_separation),
            },
        },
    )


def generate_quantum_labeled(
    seed: int, count: int, spec: featuremap.FeatureMapSpec, margin: float
) -> Dataset:
    """Binary data labeled by closeness (in quantum-kernel fidelity) to one
    of two fixed anchor points.

    Points are drawn uniformly over the spec's feature range; a point gets
    label 1 when K(x, a_plus) > K(x, a_minus) and is rejected outright when
    the fidelity difference is smaller than `margin`, so the emitted set has
    a margin in the kernel's own feature space. Deterministic per seed.
    """
    if count < 4:
        raise ConfigError(f"count must be >= 4, got {count}")
    if margin <= 0:
        raise ConfigError(f"margin must be positive, got {margin}")
    lo, hi = spec.feature_range
    n = spec.num_qubits
    rng = np.random.default_rng(seed)
    anchors = rng.uniform(lo, hi, size=(2, n))
    anchor_states = kernel._encode_rows(spec, anchors)  # rows: a_minus, a_plus

    budget = max(200 * count, 5000)
    drawn = 0
    kept_x: list[np.ndarray] = []
    kept_y: list[int] = []
    while len(kept_y) < count:
        if drawn >= budget:
            rate = 100.0 * (1.0 - len(kept_y) / max(drawn, 1))
            raise ConfigError(
                f"rejection rate {rate:.1f}% exhausted the sampling budget "
                f"({drawn} draws for {len(kept_y)} keeps); use a smaller margin"
            )
        batch = max(4 * count, 256)
        x = rng.uniform(lo, hi, size=(batch, n))
        drawn += batch
        states = kernel._encode_rows(spec, x)
        fid = np.abs(states @ anchor_states.conj().T) ** 2  # (batch, 2)
        diff = fid[:, 1] - fid[:, 0]
        take = np.abs(diff) >= margin
        for row, d in zip(x[take], diff[take]):
            if len(kept_y) == count:
                break
            kept_x.append(row)
            kept_y.append(1 if d > 0 else 0)

    return Dataset(
        features=np.array(kept_x),
        labels=np.array(kept_y),
        class_names=["minus", "plus"],
        source={
            "kind": "synthetic",
            "generator_id": "quantum-labeled",
            "seed": int(seed),
            "params": {
                "count": int(count),
                "margin": float(margin),
                "spec": spec.to_dict(),
                "anchors": anchors.tolist(),
            },
        },
    )


def write_csv(dataset: Dataset, path) -> None:
    """Header `f0,...,f{D-1},label`, one sample per row, floats written with
    full round-trip precision, LF endings."""
    d = dataset.dim
    header = ",".join([f"f{i}" for i in range(d)] + ["label"])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row, lab in zip(dataset.features, dataset.labels):
            cells = [repr(float(v)) for v in row]
            cells.append(str(int(lab)))
            fh.write(",".join(cells) + "\n")


def read_csv(path, class_names: list[str] | None = None) -> Dataset:
    """Parse a feature-table CSV; errors carry 1-based line numbers.

    When `class_names` is omitted the class count is inferred from the
    largest label (minimum 2).
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty file", line=1)

    fields = lines[0].split(",")
    if fields[-1] != "label":
        raise ParseError("missing label column (header must end in 'label')", line=1)
    dim = len(fields) - 1
    if dim < 1 or fields[:-1] != [f"f{i}" for i in range(dim)]:
        raise ParseError(f"malformed header {lines[0]!r}", line=1)
    if len(lines) == 1:
        raise ParseError("empty dataset", line=1)

    k_declared = len(class_names) if class_names is not None else None
    features = np.empty((len(lines) - 1, dim))
    labels = np.empty(len(lines) - 1, dtype=np.int64)
    for i, line in enumerate(lines[1:]):
        lineno = i + 2
        cells = line.split(",")
        if len(cells) != dim + 1:
            raise ParseError(
                f"expected {dim + 1} columns, found {len(cells)}", line=lineno
            )
        try:
            row = [float(c) for c in cells[:-1]]
        except ValueError:
            raise ParseError(f"non-numeric feature cell in {line!r}", line=lineno)
        if not all(np.isfinite(row)):
            raise ParseError("non-finite feature value", line=lineno)
        try:
            lab = int(cells[-1])
        except ValueError:
            raise ParseError(f"non-integer label {cells[-1]!r}", line=lineno)
        if lab < 0 or (k_declared is not None and lab >= k_declared):
            raise ParseError(f"label {lab} outside 0..{(k_declared or 0) - 1}", line=lineno)
        features[i] = row
        labels[i] = lab

    if class_names is None:
        k = max(2, int(labels.max()) + 1)
        class_names = [f"class {i}" for i in range(k)]
    checksum = hashlib.sha256(raw).hexdigest()
    return Dataset(
        features=features,
        labels=labels,
        class_names=list(class_names),
        source={"kind": "csv", "path": str(path), "checksum": f"sha256:{checksum}"},
    )


def split(dataset: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified train/test split, deterministic per seed.

    Per-class test counts round half-up to the global fraction; a class is
    never emptied on the train side, and a single-sample class goes to train
    with a warning.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for c in range(len(dataset.class_names)):
        idx = np.flatnonzero(dataset.labels == c)
        if idx.size == 0:
            continue
        if idx.size == 1:
            warnings.warn(f"class {c} has a single sample; assigned to train")
            train_idx.append(idx)
            continue
        perm = rng.permutation(idx)
        n_test = int(np.floor(test_fraction * idx.size + 0.5))
        n_test = min(n_test, idx.size - 1)
        test_idx.append(perm[:n_test])
        train_idx.append(perm[n_test:])

    def take(parts, tag):
        sel = np.sort(np.concatenate(parts)) if parts else np.empty(0, dtype=np.int64)
        src = dict(dataset.source)
        src["split"] = {"part": tag, "test_fraction": test_fraction, "seed": int(seed)}
        return Dataset(
            features=dataset.features[sel],
            labels=dataset.labels[sel],
            class_names=list(dataset.class_names),
            source=src,
        )

    return take(train_idx, "train"), take(test_idx, "test")
