"""Run configuration: defaults, flat JSON config files, flag overrides.

Precedence is flags > config file > defaults. Every key works without a
config file. `qubits`, `rbf_gamma` and `pca_dim` use 0 as "derive it":
qubits from the encoded dimension, gamma from the data, pca_dim=0 disables
the projection entirely.
"""
from __future__ import annotations

import json
import math

from .errors import ConfigError
from .featuremap import PHI_FAMILIES

DEFAULTS = {
    "qubits": 0,  # 0 = match the encoded feature dimension
    "reps": 2,
    "entanglement": "linear",
    "phi": "standard-zz",
    "feature_range": [0.0, math.pi],
    "pca_dim": 8,  # 0 = no PCA
    "demo_cols": 0,  # trailing columns bypassing PCA
    "kernel": "quantum",
    "mode": "exact",
    "shots": 4096,
    "svm_c": 1.0,
    "svm_tol": 1e-3,
    "svm_max_iter": 10000,
    "rbf_gamma": 0.0,  # 0 = 1 / (dim * variance)
    "test_fraction": 0.25,  # 0 = gen-data emits no split files
    "split_seed": 0,
}

_INT_KEYS = {"qubits", "reps", "pca_dim", "demo_cols", "shots", "svm_max_iter", "split_seed"}
_FLOAT_KEYS = {"svm_c", "svm_tol", "rbf_gamma", "test_fraction"}
_STR_KEYS = {"entanglement", "phi", "kernel", "mode"}


def validate(cfg: dict) -> dict:
    """Type- and range-check a full configuration dict; returns it normalized."""
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = {}
    for key, value in cfg.items():
        if key in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
            if value < 0:
                raise ConfigError(f"{key} must be >= 0, got {value}")
            out[key] = value
        elif key in _FLOAT_KEYS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key} must be a number, got {value!r}")
            out[key] = float(value)
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(f"{key} must be a string, got {value!r}")
            out[key] = value
        elif key == "feature_range":
            try:
                lo, hi = (float(v) for v in value)
            except (TypeError, ValueError):
                raise ConfigError(f"feature_range must be [lo, hi], got {value!r}")
            out[key] = [lo, hi]
        else:  # pragma: no cover - key sets above span DEFAULTS
            raise ConfigError(f"unhandled config key {key}")

    if out["entanglement"] not in ("linear", "full"):
        raise ConfigError(f"entanglement must be 'linear' or 'full', got {out['entanglement']!r}")
    if out["phi"] not in PHI_FAMILIES:
        raise ConfigError(f"unknown phi family {out['phi']!r}")
    if out["kernel"] not in ("quantum", "rbf"):
        raise ConfigError(f"kernel must be 'quantum' or 'rbf', got {out['kernel']!r}")
    if out["mode"] not in ("exact", "shots"):
        raise ConfigError(f"mode must be 'exact' or 'shots', got {out['mode']!r}")
    if out["feature_range"][0] >= out["feature_range"][1]:
        raise ConfigError("feature_range needs lo < hi")
    if out["svm_c"] <= 0:
        raise ConfigError(f"svm_c must be positive, got {out['svm_c']}")
    if out["svm_tol"] <= 0:
        raise ConfigError(f"svm_tol must be positive, got {out['svm_tol']}")
    if out["shots"] < 1:
        raise ConfigError(f"shots must be >= 1, got {out['shots']}")
    if out["rbf_gamma"] < 0:
        raise ConfigError(f"rbf_gamma must be >= 0, got {out['rbf_gamma']}")
    if not 0.0 <= out["test_fraction"] < 1.0:
        raise ConfigError(f"test_fraction must be in [0, 1), got {out['test_fraction']}")
    return out


def load_file(path) -> dict:
    """Read a config file: flat JSON object, keys a subset of DEFAULTS."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return doc


def resolve(file_cfg: dict | None = None, overrides: dict | None = None) -> dict:
    """Merge defaults <- config file <- flag overrides (None values skipped)."""
    merged = dict(DEFAULTS)
    if file_cfg:
        merged.update(file_cfg)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    return validate(merged)
