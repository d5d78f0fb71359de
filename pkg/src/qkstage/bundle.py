"""Fitted-pipeline persistence: a single versioned JSON container.

The bundle holds everything prediction needs: the PCA model, rescale bounds,
the kernel descriptor, the pairwise SVM models, and the transformed training
features for cross-kernel computation. Loading refuses format versions newer
than this code.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .dimred import PcaModel, transform as pca_transform
from .errors import ConfigError
from .featuremap import FeatureMapSpec, rescale
from .kernel import RbfKernel, kernel_id_of
from .svm import BinarySvm, MultiClassSvm

FORMAT_VERSION = 1


@dataclass
class FittedModel:
    class_names: list[str]
    config: dict  # resolved run configuration, for the record
    raw_dim: int  # column count expected of incoming feature tables
    demo_cols: int  # trailing passthrough columns exempt from PCA
    pca: PcaModel | None
    bounds: tuple[np.ndarray, np.ndarray]  # rescale source bounds, fit on train
    feature_range: tuple[float, float]
    descriptor: object  # FeatureMapSpec | RbfKernel
    gram_mode: str  # "exact" | "shots"
    shots: int | None
    kernel_seed: int | None
    jitter: float
    svm: MultiClassSvm
    train_features: np.ndarray  # transformed rows the SVM was fit on


def transform_raw(model: FittedModel, raw: np.ndarray) -> np.ndarray:
    """Raw feature rows -> kernel input rows, exactly as done during fit:
    PCA on the leading columns, demographic passthrough on the trailing
    ones, then affine rescale into the feature range."""
    raw = np.atleast_2d(np.asarray(raw, dtype=np.float64))
    if raw.shape[1] != model.raw_dim:
        raise ConfigError(
            f"feature-dimension mismatch: bundle expects {model.raw_dim} columns, "
            f"data has {raw.shape[1]}"
        )
    head = raw[:, : model.raw_dim - model.demo_cols]
    z = pca_transform(model.pca, head) if model.pca is not None else head
    if model.demo_cols:
        z = np.hstack([z, raw[:, model.raw_dim - model.demo_cols :]])
    return rescale(z, model.bounds, model.feature_range)


def _descriptor_to_dict(descriptor) -> dict:
    if isinstance(descriptor, FeatureMapSpec):
        return {"type": "quantum", "spec": descriptor.to_dict()}
    if isinstance(descriptor, RbfKernel):
        return {"type": "rbf", "gamma": float(descriptor.gamma)}
    raise TypeError(f"unsupported kernel descriptor {type(descriptor).__name__}")


def _descriptor_from_dict(d: dict):
    if d.get("type") == "quantum":
        return FeatureMapSpec.from_dict(d["spec"])
    if d.get("type") == "rbf":
        return RbfKernel(gamma=float(d["gamma"]))
    raise ConfigError(f"unknown kernel type {d.get('type')!r}")


def save(model: FittedModel, path) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "created": datetime.now(timezone.utc).isoformat(),
        "class_names": list(model.class_names),
        "config": model.config,
        "preprocess": {
            "raw_dim": int(model.raw_dim),
            "demo_cols": int(model.demo_cols),
            "pca": model.pca.to_dict() if model.pca is not None else None,
            "rescale_mins": [float(v) for v in model.bounds[0]],
            "rescale_maxs": [float(v) for v in model.bounds[1]],
            "feature_range": [float(model.feature_range[0]), float(model.feature_range[1])],
        },
        "kernel": _descriptor_to_dict(model.descriptor),
        "gram": {
            "mode": model.gram_mode,
            "shots": model.shots,
            "seed": model.kernel_seed,
            "kernel_id": kernel_id_of(model.descriptor),
            "jitter": float(model.jitter),
        },
        "svm": {
            "classes": list(model.svm.classes),
            "C": model.svm.C,
            "tol": model.svm.tol,
            "pairs": [[a, b] for a, b in model.svm.pairs],
            "models": [
                {
                    "dual_coefs": [float(v) for v in bm.dual_coefs],
                    "support_indices": [int(v) for v in bm.support_indices],
                    "bias": float(bm.bias),
                    "n_train": int(bm.n_train),
                }
                for bm in model.svm.models
            ],
        },
        "train_features": [[float(v) for v in row] for row in model.train_features],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load(path) -> FittedModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if not isinstance(version, int) or version < 1:
        raise ConfigError(f"bundle has no valid format_version (got {version!r})")
    if version > FORMAT_VERSION:
        raise ConfigError(
            f"bundle format_version {version} is newer than supported ({FORMAT_VERSION})"
        )

    pre = doc["preprocess"]
    descriptor = _descriptor_from_dict(doc["kernel"])
    gram_info = doc["gram"]
    svm_doc = doc["svm"]
    models = [
        BinarySvm(
            dual_coefs=np.asarray(m["dual_coefs"], dtype=np.float64),
            support_indices=np.asarray(m["support_indices"], dtype=np.int64),
            bias=float(m["bias"]),
            C=float(svm_doc["C"]),
            n_train=int(m["n_train"]),
        )
        for m in svm_doc["models"]
    ]
    svm = MultiClassSvm(
        classes=[int(c) for c in svm_doc["classes"]],
        pairs=[(int(a), int(b)) for a, b in svm_doc["pairs"]],
        models=models,
        kernel_id=gram_info["kernel_id"],
        C=float(svm_doc["C"]),
        tol=float(svm_doc["tol"]),
        jitter=float(gram_info["jitter"]),
    )
    return FittedModel(
        class_names=list(doc["class_names"]),
        config=doc.get("config", {}),
        raw_dim=int(pre["raw_dim"]),
        demo_cols=int(pre["demo_cols"]),
        pca=PcaModel.from_dict(pre["pca"]) if pre["pca"] is not None else None,
        bounds=(
            np.asarray(pre["rescale_mins"], dtype=np.float64),
            np.asarray(pre["rescale_maxs"], dtype=np.float64),
        ),
        feature_range=(float(pre["feature_range"][0]), float(pre["feature_range"][1])),
        descriptor=descriptor,
        gram_mode=gram_info["mode"],
        shots=gram_info["shots"],
        kernel_seed=gram_info["seed"],
        jitter=float(gram_info["jitter"]),
        svm=svm,
        train_features=np.asarray(doc["train_features"], dtype=np.float64),
    )
