"""Command-line front end.

Subcommands::

    qksvm kernel  -i data.csv --model qsvm      # Gram CSV + PGM heatmap
    qksvm run     -i data.csv --model both      # train/evaluate, report.json
    qksvm cv      -i data.csv --folds 10        # k-fold cross-validation
    qksvm predict model.json features.csv       # apply a saved model
    qksvm report  out/report.json               # render a report as a table

Exit codes: 0 success, 2 input/config error, 3 solver non-convergence,
4 internal error. Outputs are staged in a temporary directory and moved
into place only when the command succeeds.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import shutil
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__, _backend, seeding
from .errors import ConfigurationError, DimensionError, LoadError, QksvmError
from .featuremap import FeatureMapConfig
from .kernel import (
    SHOT_PSD_TOLERANCE,
    KernelConfig,
    cross_gram,
    gram_matrix,
    psd_diagnostics,
    psd_project,
    write_csv,
    write_pgm,
)
from .metrics import (
    METRIC_NAMES,
    accuracy_score,
    confusion,
    format_percent,
    kfold_cross_validate,
    metric_set,
)
from .preprocess import (
    FEATURES,
    ID_COLUMN,
    LABEL_COLUMN,
    PipelineConfig,
    ScalerState,
    apply_scalers,
    load_csv,
    read_header,
    run_pipeline,
)
from .svm import decision_values, load_model, predict, save_model, train_dual

REPORT_FORMAT_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_INTERNAL = 0, 2, 3, 4
MODEL_NAMES = {"svm": "SVM", "qsvm": "QSVM"}


class NotConverged(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("QKSVM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"QKSVM_SEED must be an integer, got {raw!r}") from None


def _column_map(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise ConfigurationError(f"--column-map entries look like canonical=actual, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _models(choice: str) -> list[str]:
    return ["qsvm", "svm"] if choice == "both" else [choice]


def run_config(args) -> dict:
    """Every value that affects results, as echoed into reports."""
    return {
        "input": str(args.input),
        "model": args.model,
        "seed": args.seed,
        "gamma": args.gamma,
        "kernel_mode": args.kernel_mode,
        "shots": args.shots,
        "reps": args.reps,
        "convention": args.convention,
        "C": args.C,
        "tol": args.tol,
        "max_passes": args.max_passes,
        "test_ratio": args.test_ratio,
        "fit_on_train_only": args.fit_on_train_only,
        "positive_label": args.positive_label,
        "psd_project": args.psd_project,
        "column_map": _column_map(args.column_map),
        "folds": getattr(args, "folds", None),
        "cv_std": getattr(args, "cv_std", None),
    }


def kernel_config(model: str, args, n_features: int) -> KernelConfig:
    if model == "svm":
        return KernelConfig("rbf", gamma=args.gamma).resolve(n_features)
    fm = FeatureMapConfig(n_features, reps=args.reps, convention=args.convention)
    if args.kernel_mode == "shots":
        return KernelConfig(
            "quantum_shots",
            feature_map=fm,
            shots=args.shots,
            master_seed=seeding.stream_seed(args.seed, seeding.STREAM_SHOTS),
        )
    return KernelConfig("quantum_exact", feature_map=fm)


def _checked_gram(X, cfg: KernelConfig, ids, psd_flag: bool):
    K = gram_matrix(X, cfg, ids)
    diag = psd_diagnostics(K)
    if cfg.kind == "quantum_shots":
        if psd_flag:
            K = psd_project(K)
        elif diag["min_eigenvalue"] < -SHOT_PSD_TOLERANCE:
            # the solver copes with mild indefiniteness; flag it rather than alter K
            warnings.warn(
                f"shot-estimated Gram has eigenvalue {diag['min_eigenvalue']:.3g} below "
                f"-{SHOT_PSD_TOLERANCE}; consider --psd-project or more shots",
                RuntimeWarning,
                stacklevel=2,
            )
        diag["psd_projected"] = bool(psd_flag)
        diag["within_psd_tolerance"] = diag["min_eigenvalue"] >= (
            -SHOT_PSD_TOLERANCE if cfg.kind == "quantum_shots" else -1e-8
        )
    return K, diag


def _pipeline(args, model: str, records):
    cfg = PipelineConfig(
        branch=model,
        seed=args.seed,
        test_ratio=args.test_ratio,
        positive_code=args.positive_label,
        fit_on_train_only=args.fit_on_train_only,
    )
    return run_pipeline(records, cfg)


def _load(args):
    path = Path(args.input)
    if not path.is_file():
        raise LoadError(f"input file not found: {path}")
    records = load_csv(path, _column_map(args.column_map))
    if not records:
        raise LoadError(f"{path}: no data rows")
    return records


@contextlib.contextmanager
def staged_output(output_dir):
    """Yield a scratch directory whose files move into ``output_dir`` on success."""
    out = Path(output_dir)
    parent = out.parent if out.parent != Path("") else Path(".")
    parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".qksvm-stage-", dir=parent))
    try:
        yield stage
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise
    out.mkdir(parents=True, exist_ok=True)
    for src in sorted(stage.rglob("*")):
        if src.is_file():
            dest = out / src.relative_to(stage)
            dest.parent.mkdir(parents=True, exist_ok=True)
            os.replace(src, dest)
    shutil.rmtree(stage, ignore_errors=True)


def _split_block(y_true, y_pred, positive: int) -> dict:
    c = confusion(y_true, y_pred, positive)
    return {"confusion": c.to_dict(), "metrics": metric_set(c).to_dict(), "n": c.total}


def _write_confusion(path: Path, block: dict) -> None:
    c = block["confusion"]
    path.write_text(
        "actual\\predicted,positive,negative\n"
        f"positive,{c['tp']},{c['fn']}\n"
        f"negative,{c['fp']},{c['tn']}\n"
    )


def _cv(args, model: str, full, timings: dict) -> dict:
    n_features = full.X.shape[1]
    kcfg = kernel_config(model, args, n_features)

    def train_fn(ds):
        K, _ = _checked_gram(ds.X, kcfg, ds.ids, args.psd_project)
        m, d = train_dual(K, ds.y, C=args.C, tol=args.tol, max_passes=args.max_passes)
        m.kernel, m.train_vectors = K.provenance, ds.X
        return m

    def score_fn(m, ds):
        return accuracy_score(ds.y, predict(m, cross_gram(ds.X, m.train_vectors, m.kernel)))

    t0 = time.perf_counter()
    report = kfold_cross_validate(
        full, args.folds, train_fn, score_fn,
        seeding.stream_seed(args.seed, seeding.STREAM_CV), args.cv_std,
    )
    timings[f"{model}_cv_seconds"] = time.perf_counter() - t0
    return report.to_dict()


def evaluate_model(args, model: str, records, stage: Path | None, timings: dict) -> dict:
    """Preprocess, build kernels, train and score one model; optionally write artifacts."""
    res = _pipeline(args, model, records)
    n_features = res.train.X.shape[1]
    kcfg = kernel_config(model, args, n_features)

    t0 = time.perf_counter()
    K, psd = _checked_gram(res.train.X, kcfg, res.train.ids, args.psd_project)
    timings[f"{model}_gram_seconds"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    svm_model, diag = train_dual(K, res.train.y, C=args.C, tol=args.tol, max_passes=args.max_passes)
    timings[f"{model}_train_seconds"] = time.perf_counter() - t0
    svm_model.kernel = K.provenance
    svm_model.train_vectors = res.train.X

    positive = 1
    train_pred = predict(svm_model, K.values)
    K_test = cross_gram(res.test.X, res.train.X, K.provenance)
    test_pred = predict(svm_model, K_test)

    out = {
        "kernel": K.provenance.to_dict(),
        "gram": {"size": K.shape[0], **psd},
        "training": diag.to_dict(),
        "n_support": int(svm_model.support_indices.size),
        "bias": svm_model.bias,
        "train": _split_block(res.train.y, train_pred, positive),
        "test": _split_block(res.test.y, test_pred, positive),
        "dataset": {
            "n_oversampled": len(res.full),
            "class_counts": {str(k): v for k, v in res.full.class_counts().items()},
            "n_train": len(res.train),
            "n_test": len(res.test),
            "test_ids": list(res.test.ids),
        },
    }
    if getattr(args, "folds", 0):
        out["cv"] = _cv(args, model, res.full, timings)

    if stage is not None:
        d = stage / model
        d.mkdir(parents=True, exist_ok=True)
        write_csv(K, d / "gram.csv")
        write_pgm(K, d / "gram.pgm")
        _write_confusion(d / "confusion_train.csv", out["train"])
        _write_confusion(d / "confusion_test.csv", out["test"])
        svm_model.metadata = {
            "feature_names": list(FEATURES),
            "scalers": [s.to_dict() for s in res.scalers],
            "positive_label": args.positive_label,
            "column_map": _column_map(args.column_map),
            "train_predictions": {
                rid: int(p) for rid, p in zip(res.train.ids, train_pred) if "~" not in rid
            },
        }
        save_model(svm_model, d / "model.json")
    return out


def render_table(report: dict) -> str:
    header = ["Classifier", "Split", "Accuracy", "Precision", "Sensitivity", "Specificity", "F1-Score"]
    rows = [header]
    for model, block in report["models"].items():
        for split in ("train", "test"):
            m = block[split]["metrics"]
            rows.append([MODEL_NAMES.get(model, model), split.title()]
                        + [format_percent(m[k]) for k in METRIC_NAMES])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    cv_lines = []
    for model, block in report["models"].items():
        cv = block.get("cv")
        if cv:
            cv_lines.append(
                f"{MODEL_NAMES.get(model, model)} {cv['k']}-fold CV accuracy: "
                f"mean {cv['mean']:.4f}, std {cv['std']:.4f} ({cv['std_kind']})"
            )
    return "\n".join(lines + ([""] + cv_lines if cv_lines else [])) + "\n"


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_kernel(args) -> int:
    records = _load(args)
    with staged_output(args.output_dir) as stage:
        for model in _models(args.model):
            res = _pipeline(args, model, records)
            kcfg = kernel_config(model, args, res.train.X.shape[1])
            K, psd = _checked_gram(res.train.X, kcfg, res.train.ids, args.psd_project)
            d = stage / model
            d.mkdir()
            write_csv(K, d / "gram.csv")
            write_pgm(K, d / "gram.pgm")
            _dump_json({"kernel": K.provenance.to_dict(), "size": K.shape[0], **psd},
                       d / "gram_info.json")
            print(f"{model}: {K.shape[0]}x{K.shape[1]} Gram, min eigenvalue "
                  f"{psd['min_eigenvalue']:.3e} -> {Path(args.output_dir) / model / 'gram.csv'}")
    return EXIT_OK


def _report_base(args, records) -> dict:
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "config": run_config(args),
        "environment": {"backend": _backend.NAME, "qksvm_version": __version__},
        "dataset": {"n_records": len(records)},
        "models": {},
        "timings": {},
    }


def _metrics_rows(report: dict) -> list[list]:
    rows = [["model", "split", "tp", "tn", "fp", "fn", *METRIC_NAMES]]
    for model, block in report["models"].items():
        for split in ("train", "test"):
            c, m = block[split]["confusion"], block[split]["metrics"]
            rows.append([model, split, c["tp"], c["tn"], c["fp"], c["fn"],
                         *("" if m[k] is None else repr(m[k]) for k in METRIC_NAMES)])
    return rows


def cmd_run(args) -> int:
    records = _load(args)
    report = _report_base(args, records)
    t_all = time.perf_counter()
    with staged_output(args.output_dir) as stage:
        for model in _models(args.model):
            report["models"][model] = evaluate_model(args, model, records, stage, report["timings"])
        report["timings"]["total_seconds"] = time.perf_counter() - t_all
        _dump_json(report, stage / "report.json")
        with open(stage / "metrics.csv", "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(_metrics_rows(report))
        table = render_table(report)
        (stage / "summary.txt").write_text(table)
    print(table, end="")
    if not all(b["training"]["converged"] for b in report["models"].values()):
        raise NotConverged("SMO hit --max-passes before meeting --tol; see report.json")
    return EXIT_OK


def cmd_cv(args) -> int:
    if args.folds < 2:
        raise ConfigurationError("--folds must be at least 2")
    records = _load(args)
    out = {"format_version": REPORT_FORMAT_VERSION, "config": run_config(args), "models": {},
           "timings": {}}
    for model in _models(args.model):
        res = _pipeline(args, model, records)
        out["models"][model] = _cv(args, model, res.full, out["timings"])
    with staged_output(args.output_dir) as stage:
        _dump_json(out, stage / "cv.json")
    for model, cv in out["models"].items():
        folds = " ".join(f"{s:.4f}" for s in cv["fold_scores"])
        print(f"{MODEL_NAMES[model]}: folds [{folds}] mean {cv['mean']:.4f} std {cv['std']:.4f}")
    return EXIT_OK


def _feature_columns(header, column_map) -> list[str]:
    skip = {column_map.get(ID_COLUMN, ID_COLUMN), column_map.get(LABEL_COLUMN, LABEL_COLUMN)}
    return [h.strip() for h in header if h.strip() and h.strip() not in skip]


def cmd_predict(args) -> int:
    model = load_model(args.model_file)
    meta = model.metadata
    names = meta.get("feature_names", list(FEATURES))
    column_map = meta.get("column_map", {})
    in_path = Path(args.input)
    if not in_path.is_file():
        raise LoadError(f"input file not found: {in_path}")
    header = read_header(in_path)
    present = _feature_columns(header, column_map)
    if len(present) != len(names):
        raise DimensionError(
            f"model expects {len(names)} feature columns, {in_path} has {len(present)}: {present}"
        )
    cols = [header.index(column_map.get(n, n)) if column_map.get(n, n) in header else None
            for n in names]
    missing = [n for n, c in zip(names, cols) if c is None]
    if missing:
        raise LoadError(f"{in_path}: missing feature column(s) {missing}")
    id_col = header.index(column_map.get(ID_COLUMN, ID_COLUMN)) if column_map.get(
        ID_COLUMN, ID_COLUMN) in header else None
    ids, rows = [], []
    with in_path.open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for rownum, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(row[c]) for c in cols])
            except (ValueError, IndexError):
                raise LoadError(f"{in_path}: row {rownum} has an unparseable feature value") from None
            ids.append(row[id_col].strip() if id_col is not None else str(rownum))
    X = np.asarray(rows, dtype=np.float64).reshape(-1, len(names))
    if X.shape[0] == 0:
        print(f"warning: {in_path} has no data rows", file=sys.stderr)
        dv = np.zeros(0)
    else:
        scalers = [ScalerState.from_dict(s) for s in meta.get("scalers", [])]
        Xs = apply_scalers(scalers, X)
        dv = decision_values(model, cross_gram(Xs, model.train_vectors, model.kernel))
    labels = np.where(dv >= 0, 1, -1)
    out = Path(args.output)
    with staged_output(out.parent) as stage:
        with open(stage / out.name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "decision_value", "predicted_label"])
            for rid, v, lab in zip(ids, dv, labels):
                w.writerow([rid, repr(float(v)), int(lab)])
    print(f"wrote {len(ids)} predictions to {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"cannot read report {args.report}: {exc}") from exc
    if "models" not in report:
        raise LoadError(f"{args.report} is not a run report")
    print(render_table(report), end="")
    return EXIT_OK


def _add_data_args(p: argparse.ArgumentParser, default_seed: int) -> None:
    p.add_argument("-i", "--input", required=True, help="prostate-cancer CSV")
    p.add_argument("-o", "--output-dir", default="qksvm-out")
    p.add_argument("--model", choices=("svm", "qsvm", "both"), default="both")
    p.add_argument("--seed", type=int, default=default_seed,
                   help="master seed for oversampling, split, CV and shots (env QKSVM_SEED)")
    p.add_argument("--gamma", type=float, default=None, help="RBF gamma (default 1/n_features)")
    p.add_argument("--kernel-mode", choices=("exact", "shots"), default="exact")
    p.add_argument("--shots", type=int, default=8192)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--convention", choices=("paper", "doubled"), default="paper")
    p.add_argument("-C", "--C", dest="C", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-passes", type=int, default=10000)
    p.add_argument("--test-ratio", type=float, default=0.2)
    p.add_argument("--fit-on-train-only", action="store_true")
    p.add_argument("--positive-label", choices=("M", "B"), default="M",
                   help="diagnosis code mapped to +1")
    p.add_argument("--psd-project", action="store_true",
                   help="clip negative eigenvalues of shot-estimated Gram matrices")
    p.add_argument("--column-map", default=None,
                   help="comma-separated canonical=actual header overrides")


def build_parser(default_seed: int = 0) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qksvm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"qksvm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="write training Gram matrices (CSV + PGM)")
    _add_data_args(p, default_seed)
    p.set_defaults(func=cmd_kernel, folds=0, cv_std="population")

    p = sub.add_parser("run", help="train and evaluate, write report.json")
    _add_data_args(p, default_seed)
    p.add_argument("--folds", type=int, default=10, help="CV folds in the report (0 disables)")
    p.add_argument("--cv-std", choices=("population", "sample"), default="population")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("cv", help="k-fold cross-validation, write cv.json")
    _add_data_args(p, default_seed)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--cv-std", choices=("population", "sample"), default="population")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("predict", help="apply a saved model to a feature CSV")
    p.add_argument("model_file")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="predictions.csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", help="render an existing report.json")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    try:
        seed = _default_seed()
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    parser = build_parser(seed)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (QksvmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
