"""PCA projection to the encoding dimension, via SVD of the centered data.

SVD is used instead of an eigendecomposition of the covariance for stability
on skinny matrices. Component signs follow a fixed convention (the
largest-magnitude entry of each component is positive, ties to the lowest
index) because the downstream quantum encoding is nonlinear in the sign of
projected features.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class PcaModel:
    input_dim: int
    output_dim: int
    mean: np.ndarray
    components: np.ndarray  # (output_dim, input_dim), orthonormal rows
    explained_variance: np.ndarray  # nonincreasing, sample-variance normalized

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        return cls(
            input_dim=int(d["input_dim"]),
            output_dim=int(d["output_dim"]),
            mean=np.asarray(d["mean"], dtype=np.float64),
            components=np.asarray(d["components"], dtype=np.float64),
            explained_variance=np.asarray(d["explained_variance"], dtype=np.float64),
        )


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Flip each component so its largest-magnitude entry is positive."""
    out = components.copy()
    for row in out:
        pivot = np.argmax(np.abs(row))  # argmax takes the lowest index on ties
        if row[pivot] < 0:
            row *= -1.0
    return out


def fit_pca(rows: np.ndarray, output_dim: int) -> PcaModel:
    """Fit the top-`output_dim` principal directions of the row data."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {rows.shape}")
    m, d_in = rows.shape
    if m < 2:
        raise ConfigError(f"PCA needs at least 2 rows, got {m}")
    if not 1 <= output_dim <= min(m - 1, d_in):
        raise ConfigError(
            f"output_dim must be in [1, min(m-1, D)] = [1, {min(m - 1, d_in)}], got {output_dim}"
        )
    if not np.all(np.isfinite(rows)):
        raise ValueError("data contains non-finite values")

    mean = rows.mean(axis=0)
    centered = rows - mean
    if not centered.any():
        raise ConfigError("all rows are identical: zero variance, nothing to project")

    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    components = _fix_signs(vt[:output_dim])
    explained = singular[:output_dim] ** 2 / (m - 1)
    return PcaModel(
        input_dim=d_in,
        output_dim=int(output_dim),
        mean=mean,
        components=components,
        explained_variance=explained,
    )


def transform(model: PcaModel, x: np.ndarray) -> np.ndarray:
    """Project a vector (or matrix of row vectors) onto the fitted components."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.input_dim:
        raise ValueError(f"input has {x.shape[-1]} columns, model expects {model.input_dim}")
    return (x - model.mean) @ model.components.T
