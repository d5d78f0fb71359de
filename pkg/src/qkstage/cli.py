"""Command-line pipeline: gen-data, fit, eval, kernel.

Every command is deterministic given its flags and input files; machine
output goes to files, standard output carries a short human summary. On
failure the exit code is nonzero, the message names the pipeline stage, and
partially written outputs are removed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import bundle, config, dataset, dimred, evaluate, figures, kernel, svm
from .errors import ConfigError, ConvergenceError, ParseError
from .featuremap import FeatureMapSpec, fit_bounds, rescale
from .kernel import RbfKernel, default_rbf_gamma

_FAILURES = (ConfigError, ParseError, ConvergenceError, ValueError, OSError)


def _meta_path(csv_path: str) -> str:
    base = csv_path[:-4] if csv_path.endswith(".csv") else csv_path
    return base + ".meta.json"


def _threads(n: int) -> int:
    if n < 0:
        raise ConfigError(f"threads must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def _write_json(path, doc) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _resolve_config(args) -> dict:
    file_cfg = config.load_file(args.config) if args.config else None
    overrides = {}
    for key in config.DEFAULTS:
        value = getattr(args, key, None)
        if key == "feature_range" and value is not None:
            value = list(value)
        overrides[key] = value
    return config.resolve(file_cfg, overrides)


def _sidecar_class_names(csv_path: str) -> list[str] | None:
    meta = _meta_path(csv_path)
    if not os.path.exists(meta):
        return None
    try:
        with open(meta, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"unreadable dataset sidecar {meta}: {exc}")
    names = doc.get("class_names")
    if names is not None and not (
        isinstance(names, list) and all(isinstance(n, str) for n in names)
    ):
        raise ConfigError(f"sidecar {meta} has a malformed class_names entry")
    return names


def _fail(stage: str, exc, outputs: list) -> int:
    for path in outputs:
        try:
            if os.path.exists(path):
                os.remove(path)
        except OSError:
            pass
    print(f"error [{stage}]: {exc}", file=sys.stderr)
    return 1


def _feature_map_from_cfg(cfg: dict, num_qubits: int) -> FeatureMapSpec:
    return FeatureMapSpec(
        num_qubits=num_qubits,
        repetitions=cfg["reps"],
        entanglement=cfg["entanglement"],
        phi=cfg["phi"],
        feature_range=tuple(cfg["feature_range"]),
    )


def _dataset_meta(ds: dataset.Dataset, seed: int, split: dict | None) -> dict:
    return {
        "format": "qkstage-dataset",
        "generator_id": ds.source.get("generator_id"),
        "seed": seed,
        "params": ds.source.get("params", {}),
        "class_names": list(ds.class_names),
        "rows": ds.num_samples,
        "split": split,
    }


def cmd_gen_data(args) -> int:
    stage = "config"
    outputs: list[str] = []
    try:
        cfg = _resolve_config(args)
        stage = "generate"
        if args.generator == "gaussian":
            ds = dataset.generate_gaussian_stages(
                args.seed, args.per_class, args.dim, args.sep
            )
        else:
            qubits = cfg["qubits"] if cfg["qubits"] > 0 else 2
            spec = _feature_map_from_cfg(cfg, qubits)
            ds = dataset.generate_quantum_labeled(args.seed, args.count, spec, args.margin)

        stage = "write"
        outputs.append(args.out)
        dataset.write_csv(ds, args.out)
        outputs.append(_meta_path(args.out))
        _write_json(_meta_path(args.out), _dataset_meta(ds, args.seed, None))
        written = [f"{args.out} ({ds.num_samples} rows)"]

        if cfg["test_fraction"] > 0:
            stage = "split"
            train, test = dataset.split(ds, cfg["test_fraction"], cfg["split_seed"])
            base = args.out[:-4] if args.out.endswith(".csv") else args.out
            for part, d in (("train", train), ("test", test)):
                path = f"{base}.{part}.csv"
                outputs.append(path)
                dataset.write_csv(d, path)
                outputs.append(_meta_path(path))
                split_info = {
                    "part": part,
                    "test_fraction": cfg["test_fraction"],
                    "seed": cfg["split_seed"],
                }
                _write_json(_meta_path(path), _dataset_meta(d, args.seed, split_info))
                written.append(f"{path} ({d.num_samples} rows)")

        print("wrote " + ", ".join(written))
        return 0
    except _FAILURES as exc:
        return _fail(stage, exc, outputs)


def cmd_fit(args) -> int:
    stage = "config"
    outputs: list[str] = []
    try:
        cfg = _resolve_config(args)
        stage = "read-train"
        ds = dataset.read_csv(args.train, class_names=_sidecar_class_names(args.train))
        demo = cfg["demo_cols"]
        if demo >= ds.dim:
            raise ConfigError(f"demo_cols {demo} must be smaller than the data dim {ds.dim}")
        head = ds.features[:, : ds.dim - demo]

        stage = "pca"
        pca = None
        z = head
        if cfg["pca_dim"] > 0:
            pca = dimred.fit_pca(head, cfg["pca_dim"])
            z = dimred.transform(pca, head)
        if demo:
            z = np.hstack([z, ds.features[:, ds.dim - demo :]])
        encoded_dim = z.shape[1]
        if cfg["kernel"] == "quantum" and cfg["qubits"] not in (0, encoded_dim):
            raise ConfigError(
                f"qubits {cfg['qubits']} does not match the encoded dimension "
                f"{encoded_dim} (pca output + demographic columns)"
            )

        stage = "rescale"
        bounds = fit_bounds(z)
        frange = (cfg["feature_range"][0], cfg["feature_range"][1])
        x = rescale(z, bounds, frange)

        stage = "gram"
        if cfg["kernel"] == "quantum":
            descriptor = _feature_map_from_cfg(cfg, encoded_dim)
        else:
            descriptor = RbfKernel(gamma=cfg["rbf_gamma"] or default_rbf_gamma(x))
        shot_mode = cfg["mode"] == "shots"
        g = kernel.gram(
            descriptor,
            x,
            mode=cfg["mode"],
            shots=cfg["shots"] if shot_mode else None,
            seed=args.seed if shot_mode else None,
            threads=_threads(args.threads),
        )

        stage = "svm"
        machine = svm.fit_multiclass(
            g,
            ds.labels,
            C=cfg["svm_c"],
            tol=cfg["svm_tol"],
            max_iter=cfg["svm_max_iter"],
            threads=_threads(args.threads),
        )

        stage = "write-bundle"
        model = bundle.FittedModel(
            class_names=ds.class_names,
            config=cfg,
            raw_dim=ds.dim,
            demo_cols=demo,
            pca=pca,
            bounds=bounds,
            feature_range=frange,
            descriptor=descriptor,
            gram_mode=g.mode,
            shots=g.shots,
            kernel_seed=g.seed,
            jitter=machine.jitter,
            svm=machine,
            train_features=x,
        )
        outputs.append(args.out)
        bundle.save(model, args.out)
        print(
            f"wrote {args.out}: {len(machine.pairs)} pairwise models over "
            f"{len(machine.classes)} classes, kernel {g.kernel_id}"
        )
        return 0
    except _FAILURES as exc:
        return _fail(stage, exc, outputs)


def cmd_eval(args) -> int:
    stage = "load-bundle"
    outputs: list[str] = []
    try:
        model = bundle.load(args.bundle)
        stage = "read-test"
        ds = dataset.read_csv(args.test, class_names=model.class_names)
        stage = "transform"
        x = bundle.transform_raw(model, ds.features)
        stage = "cross-kernel"
        block = kernel.gram_cross(
            model.descriptor,
            model.train_features,
            x,
            mode=model.gram_mode,
            shots=model.shots,
            seed=model.kernel_seed,
            threads=_threads(args.threads),
        )
        stage = "predict"
        predicted, _votes = svm.predict(model.svm, block)

        stage = "report"
        os.makedirs(args.report_dir, exist_ok=True)
        cm = evaluate.confusion(ds.labels, predicted, model.class_names)
        report = evaluate.report_metrics(cm)

        counts_path = os.path.join(args.report_dir, "confusion_counts.csv")
        outputs.append(counts_path)
        with open(counts_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("," + ",".join(cm.class_names) + "\n")
            for name, row in zip(cm.class_names, cm.counts):
                fh.write(name + "," + ",".join(str(int(v)) for v in row) + "\n")

        percent_path = os.path.join(args.report_dir, "confusion_percent.csv")
        outputs.append(percent_path)
        pct = evaluate.row_percent(cm)
        with open(percent_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("," + ",".join(cm.class_names) + "\n")
            for name, row in zip(cm.class_names, pct):
                fh.write(name + "," + ",".join(f"{v:.1f}" for v in row) + "\n")

        predictions_path = os.path.join(args.report_dir, "predictions.csv")
        outputs.append(predictions_path)
        with open(predictions_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("index,true,predicted\n")
            for i, (t, p) in enumerate(zip(ds.labels, predicted)):
                fh.write(f"{i},{int(t)},{int(p)}\n")

        metrics_path = os.path.join(args.report_dir, "metrics.json")
        outputs.append(metrics_path)
        _write_json(metrics_path, report)

        figure_path = os.path.join(args.report_dir, "confusion.png")
        outputs.append(figure_path)
        figures.render_confusion_heatmap(cm, figure_path, title="held-out confusion")

        print(f"held-out accuracy {report['accuracy']:.4f}")
        macro = report["macro_f1"]
        print("macro-F1 " + (f"{macro:.4f}" if macro is not None else "undefined"))
        return 0
    except _FAILURES as exc:
        return _fail(stage, exc, outputs)


def cmd_kernel(args) -> int:
    stage = "config"
    outputs: list[str] = []
    try:
        cfg = _resolve_config(args)
        stage = "read-data"
        ds = dataset.read_csv(args.data)
        rows = ds.features

        stage = "gram"
        if cfg["kernel"] == "quantum":
            if cfg["qubits"] not in (0, ds.dim):
                raise ConfigError(
                    f"qubits {cfg['qubits']} does not match the data dimension {ds.dim}"
                )
            descriptor = _feature_map_from_cfg(cfg, ds.dim)
        else:
            descriptor = RbfKernel(gamma=cfg["rbf_gamma"] or default_rbf_gamma(rows))
        shot_mode = cfg["mode"] == "shots"
        g = kernel.gram(
            descriptor,
            rows,
            mode=cfg["mode"],
            shots=cfg["shots"] if shot_mode else None,
            seed=args.seed if shot_mode else None,
            threads=_threads(args.threads),
        )

        stage = "write"
        outputs.append(args.out)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            for row in g.values:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        with open(args.out, "rb") as fh:
            checksum = hashlib.sha256(fh.read()).hexdigest()
        sidecar = (args.out[:-4] if args.out.endswith(".csv") else args.out) + ".json"
        outputs.append(sidecar)
        _write_json(
            sidecar,
            {
                "mode": g.mode,
                "shots": g.shots,
                "seed": g.seed,
                "kernel_id": g.kernel_id,
                "size": g.size,
                "checksum": f"sha256:{checksum}",
            },
        )
        print(f"wrote {args.out} ({g.size}x{g.size}, {g.mode})")
        return 0
    except _FAILURES as exc:
        return _fail(stage, exc, outputs)


def _add_shared_flags(p) -> None:
    p.add_argument("--config", metavar="PATH", help="flat JSON config file")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--threads", type=int, default=0, help="worker threads, 0 = auto")
    p.add_argument("--qubits", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--entanglement", choices=["linear", "full"], default=None)
    p.add_argument("--phi", default=None)
    p.add_argument(
        "--feature-range", dest="feature_range", type=float, nargs=2,
        metavar=("LO", "HI"), default=None,
    )
    p.add_argument("--pca-dim", dest="pca_dim", type=int, default=None)
    p.add_argument("--demo-cols", dest="demo_cols", type=int, default=None)
    p.add_argument("--kernel", choices=["quantum", "rbf"], default=None)
    p.add_argument("--mode", choices=["exact", "shots"], default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--svm-c", dest="svm_c", type=float, default=None)
    p.add_argument("--svm-tol", dest="svm_tol", type=float, default=None)
    p.add_argument("--svm-max-iter", dest="svm_max_iter", type=int, default=None)
    p.add_argument("--rbf-gamma", dest="rbf_gamma", type=float, default=None)
    p.add_argument("--test-fraction", dest="test_fraction", type=float, default=None)
    p.add_argument("--split-seed", dest="split_seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkstage",
        description="quantum-kernel SVM pipeline: generate data, fit, evaluate, dump kernels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic dataset CSV (plus split files)")
    p.add_argument("--generator", choices=["gaussian", "quantum"], required=True)
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--per-class", dest="per_class", type=int, default=30)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--sep", type=float, default=3.0)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--margin", type=float, default=0.1)
    _add_shared_flags(p)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("fit", help="fit PCA + rescale + kernel + one-vs-one SVM, save a bundle")
    p.add_argument("--train", required=True, metavar="CSV")
    p.add_argument("--out", required=True, metavar="BUNDLE")
    _add_shared_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate a bundle on a test CSV and write reports")
    p.add_argument("--bundle", required=True, metavar="BUNDLE")
    p.add_argument("--test", required=True, metavar="CSV")
    p.add_argument("--report-dir", dest="report_dir", required=True, metavar="DIR")
    _add_shared_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("kernel", help="dump a Gram matrix CSV with a JSON sidecar")
    p.add_argument("--data", required=True, metavar="CSV")
    p.add_argument("--out", required=True, metavar="CSV")
    _add_shared_flags(p)
    p.set_defaults(func=cmd_kernel)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
