"""Pipeline CLI: corpus build/split, metric extraction, training, scoring,
and fusion exports, with one master seed feeding named sub-streams.

Exit codes: 0 ok, 1 usage, 2 data error, 3 internal error. All file writes
go through a write-temp-rename helper, and every pipeline run drops a
config snapshot next to its outputs. Reports contain no timestamps so
reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, classifiers, evaluation, fusion, samples
from .corpus import (
    Corpus,
    MethodRecord,
    SplitSpec,
    build_corpus,
    read_records,
    split,
    write_records,
)
from .errors import MalformedRecord, SevkitError
from .java_methods import analyze
from .metrics import MetricsVector, metrics_vector, robust_scale_fit, robust_scale_transform

METRICS_CSV_HEADER = ["id", "lc", "pi", "ma", "nbd", "ml", "d", "mi", "fo", "r", "e"]

# Report rows keep the classic-model table order.
MODEL_ORDER = [
    ("KNN", "knn"),
    ("SVM", "svm"),
    ("Naive Bayes", "naive_bayes"),
    ("Decision Tree", "decision_tree"),
    ("Random Forest", "random_forest"),
    ("Ada Boost", "ada_boost"),
    ("Gradient Boosted Trees", "gradient_boosted_trees"),
    ("MLP", "mlp"),
]


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_json(path: str | Path, payload) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def derive_seed(master: int, stream: str) -> int:
    """Named deterministic sub-seed of the master seed."""
    digest = hashlib.sha256(f"{master}:{stream}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def write_snapshot(out_dir: Path, command: str, config: dict) -> None:
    write_json(out_dir / "config_snapshot.json", {
        "tool": "sevkit",
        "version": __version__,
        "command": command,
        "config": config,
    })


# --- metric extraction -------------------------------------------------

def _format_cell(value) -> str:
    return str(value) if isinstance(value, int) else repr(value)


def extract_metrics(records) -> list[MetricsVector]:
    return [metrics_vector(analyze(rec.source)) for rec in records]


def metrics_csv_text(records, vectors, with_label: bool = False) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = METRICS_CSV_HEADER + (["label"] if with_label else [])
    writer.writerow(header)
    for rec, vec in zip(records, vectors):
        row = [rec.id] + [_format_cell(v) for v in vec.as_list()]
        if with_label:
            row.append(str(rec.severity_class))
        writer.writerow(row)
    return buffer.getvalue()


def read_features_csv(path: str | Path) -> tuple[list[str], np.ndarray, np.ndarray | None]:
    """Returns (ids, features, labels-or-None) from an extract-format CSV."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or header[: len(METRICS_CSV_HEADER)] != METRICS_CSV_HEADER:
            raise MalformedRecord(f"{path}: unexpected CSV header {header}")
        has_label = len(header) > len(METRICS_CSV_HEADER) and header[-1] == "label"
        ids, rows, labels = [], [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                ids.append(row[0])
                rows.append([float(v) for v in row[1:11]])
                if has_label:
                    labels.append(int(row[11]))
            except (ValueError, IndexError) as exc:
                raise MalformedRecord(f"{path} line {line_no}: {exc}") from exc
    features = np.array(rows, dtype=np.float64)
    return ids, features, (np.array(labels) if has_label else None)


# --- prediction bridge --------------------------------------------------

def write_predictions(path: str | Path, ids, proba) -> None:
    lines = []
    for rec_id, row in zip(ids, proba):
        lines.append(json.dumps({"id": rec_id, "proba": [float(p) for p in row]}))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_predictions(path: str | Path) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {}
    for line_no, row in enumerate(fusion.read_jsonl(path), start=1):
        if "id" not in row or "proba" not in row or len(row["proba"]) != 4:
            raise MalformedRecord(f"{path} line {line_no}: need id and 4 probabilities")
        out[str(row["id"])] = [float(p) for p in row["proba"]]
    return out


def score_external(pred_path: str | Path, truth_path: str | Path,
                   hyperparameters: dict | None = None) -> evaluation.EvalReport:
    """Score a predictions JSONL file against a corpus split file."""
    truth = read_records(truth_path)
    preds = read_predictions(pred_path)
    missing = [rec.id for rec in truth if rec.id not in preds]
    if missing:
        raise MalformedRecord(f"predictions missing for ids {missing[:5]}"
                              f"{'...' if len(missing) > 5 else ''}")
    proba = np.array([preds[rec.id] for rec in truth], dtype=np.float64)
    y_true = np.array([rec.severity_class for rec in truth])
    y_pred = np.argmax(proba, axis=1)
    return evaluation.report(y_true, y_pred, proba, hyperparameters=hyperparameters)


# --- pipeline orchestration ---------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    corpus_path: str
    out_dir: str
    models: tuple[str, ...] = tuple(kind for _, kind in MODEL_ORDER)
    scale: bool = True
    ratios: tuple[float, float, float] = (0.70, 0.15, 0.15)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "corpus_path": self.corpus_path,
            "out_dir": self.out_dir,
            "models": list(self.models),
            "scale": self.scale,
            "ratios": list(self.ratios),
        }

    def report_dict(self) -> dict:
        """Config as embedded in reports: no paths, so identical seeds give
        byte-identical report files regardless of where they are written."""
        return {
            "seed": self.seed,
            "models": list(self.models),
            "scale": self.scale,
            "ratios": list(self.ratios),
        }


def _split_corpus(config: PipelineConfig) -> tuple:
    corpus = Corpus(records=tuple(read_records(config.corpus_path)))
    spec = SplitSpec(seed=derive_seed(config.seed, "split"), ratios=config.ratios)
    return split(corpus, spec)


def _scaled_features(result, config: PipelineConfig):
    """Metric matrices for the three splits, scaled with train-split params."""
    vec_train = extract_metrics(result.train)
    vec_valid = extract_metrics(result.valid)
    vec_test = extract_metrics(result.test)
    if config.scale:
        params = robust_scale_fit(vec_train)
        x_train = robust_scale_transform(vec_train, params).rows
        x_valid = robust_scale_transform(vec_valid, params).rows
        x_test = robust_scale_transform(vec_test, params).rows
    else:
        params = None
        x_train = np.array([v.as_list() for v in vec_train])
        x_valid = np.array([v.as_list() for v in vec_valid])
        x_test = np.array([v.as_list() for v in vec_test])
    return (vec_train, vec_valid, vec_test), (x_train, x_valid, x_test), params


def run_rq1(config: PipelineConfig) -> dict:
    """Train every classic model on the train split, score on test, and
    write rq1_report.json plus one detailed report per model."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = _split_corpus(config)
    _, (x_train, _, x_test), _ = _scaled_features(result, config)
    y_train = np.array([rec.severity_class for rec in result.train])
    y_test = np.array([rec.severity_class for rec in result.test])

    rows = []
    for display, kind in MODEL_ORDER:
        if kind not in config.models:
            continue
        spec = classifiers.ClassifierSpec(kind=kind, seed=derive_seed(config.seed, kind))
        model = classifiers.fit(spec, x_train, y_train)
        proba = model.predict_proba(x_test)
        y_pred = model.predict(x_test)
        rep = evaluation.report(y_test, y_pred, proba,
                                hyperparameters=spec.resolved_hyperparameters())
        write_json(out_dir / f"report_{kind}.json", rep.to_dict())
        write_predictions(out_dir / f"predictions_{kind}.jsonl",
                          [rec.id for rec in result.test], proba)
        rows.append({
            "model": display,
            "kind": kind,
            "hyperparameters": spec.resolved_hyperparameters(),
            "seed": spec.seed,
            "precision_weighted": rep.precision_w,
            "recall_weighted": rep.recall_w,
            "f1_weighted": rep.f1_w,
            "f1_per_class": rep.f1_per_class,
            "auc_weighted": rep.auc_w,
            "mcc": rep.mcc,
        })

    report = {
        "tool": "sevkit",
        "version": __version__,
        "config": config.report_dict(),
        "split_report": result.report,
        "models": rows,
    }
    write_json(out_dir / "rq1_report.json", report)
    write_snapshot(out_dir, "rq1", config.to_dict())
    return report


def run_fusion_export(config: PipelineConfig) -> list[Path]:
    """Plain, inline, and cls JSONL exports for all three splits."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = _split_corpus(config)
    vectors, scaled, _ = _scaled_features(result, config)
    written = []
    parts = {"train": 0, "valid": 1, "test": 2}
    split_records = {"train": result.train, "valid": result.valid, "test": result.test}
    for name, idx in parts.items():
        records = split_records[name]
        plain_path = out_dir / f"plain_{name}.jsonl"
        inline_path = out_dir / f"inline_{name}.jsonl"
        cls_path = out_dir / f"cls_{name}.jsonl"
        fusion.export_plain(records, plain_path)
        fusion.export_concat_inline(records, vectors[idx], inline_path)
        fusion.export_concat_cls(records, scaled[idx], cls_path)
        written += [plain_path, inline_path, cls_path]
    write_snapshot(out_dir, "fusion export", config.to_dict())
    return written


# --- argparse wiring -----------------------------------------------------

class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems, not argparse's 2
        raise UsageError(message)


def build_parser() -> Parser:
    parser = Parser(prog="sevkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sevkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus_p = sub.add_parser("corpus", help="corpus building and splitting")
    corpus_sub = corpus_p.add_subparsers(dest="corpus_command", required=True)

    build_p = corpus_sub.add_parser("build", help="ingest, unify labels, dedup")
    build_p.add_argument("--in", dest="input", required=True)
    build_p.add_argument("--out", required=True)

    split_p = corpus_sub.add_parser("split", help="seeded 70/15/15 split")
    split_p.add_argument("--in", dest="input", required=True)
    split_p.add_argument("--seed", type=int, required=True)
    split_p.add_argument("--out-dir", required=True)

    demo_p = corpus_sub.add_parser("demo", help="generate a synthetic raw corpus")
    demo_p.add_argument("--out", required=True)
    demo_p.add_argument("--count", type=int, default=360)
    demo_p.add_argument("--seed", type=int, default=7)

    metrics_p = sub.add_parser("metrics", help="metric extraction")
    metrics_sub = metrics_p.add_subparsers(dest="metrics_command", required=True)
    extract_p = metrics_sub.add_parser("extract", help="corpus JSONL -> metrics CSV")
    extract_p.add_argument("--in", dest="input", required=True)
    extract_p.add_argument("--out", required=True)
    extract_p.add_argument("--with-label", action="store_true",
                           help="append a label column for training")

    train_p = sub.add_parser("train", help="fit one classifier")
    train_p.add_argument("--model", required=True, choices=classifiers.MODEL_KINDS)
    train_p.add_argument("--train", dest="train_csv", required=True,
                         help="metrics CSV (extract format, optionally with label column)")
    train_p.add_argument("--labels", help="corpus JSONL to join labels by id")
    train_p.add_argument("--seed", type=int, default=0)
    train_p.add_argument("--out", required=True)

    predict_p = sub.add_parser("predict", help="emit probability rows")
    predict_p.add_argument("--model", required=True)
    predict_p.add_argument("--features", required=True)
    predict_p.add_argument("--out", required=True)

    eval_p = sub.add_parser("evaluate", help="score predictions against truth")
    eval_p.add_argument("--pred", required=True)
    eval_p.add_argument("--truth", required=True)
    eval_p.add_argument("--out", required=True)
    eval_p.add_argument("--model", help="model JSON whose hyperparameters go in the report")

    fusion_p = sub.add_parser("fusion", help="fusion exports")
    fusion_sub = fusion_p.add_subparsers(dest="fusion_command", required=True)
    export_p = fusion_sub.add_parser("export")
    export_p.add_argument("--mode", choices=["plain", "inline", "cls"], required=True)
    export_p.add_argument("--split", choices=["train", "valid", "test"], required=True)
    export_p.add_argument("--splits-dir", required=True,
                          help="directory holding train/valid/test JSONL from corpus split")
    export_p.add_argument("--out", required=True)

    report_p = sub.add_parser("report", help="report post-processing")
    report_sub = report_p.add_subparsers(dest="report_command", required=True)
    curves_p = report_sub.add_parser("curves", help="dump ROC/PR curve points")
    curves_p.add_argument("--report", required=True)
    curves_p.add_argument("--format", choices=["csv"], default="csv")
    curves_p.add_argument("--out-dir", required=True)

    rq1_p = sub.add_parser("rq1", help="train + evaluate all classic models")
    rq1_p.add_argument("--corpus", required=True)
    rq1_p.add_argument("--seed", type=int, required=True)
    rq1_p.add_argument("--out-dir", required=True)
    rq1_p.add_argument("--no-scale", action="store_true")

    return parser


def _cmd_corpus_build(args) -> int:
    corpus = build_corpus(args.input)
    write_records(corpus.records, args.out)
    out_dir = Path(args.out).parent
    write_snapshot(out_dir, "corpus build",
                   {"input": args.input, "out": args.out,
                    "records": len(corpus), "class_counts": corpus.class_counts()})
    print(f"wrote {len(corpus)} records to {args.out}")
    return 0


def _cmd_corpus_split(args) -> int:
    corpus = Corpus(records=tuple(read_records(args.input)))
    result = split(corpus, SplitSpec(seed=args.seed))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_records(result.train, out_dir / "train.jsonl")
    write_records(result.valid, out_dir / "valid.jsonl")
    write_records(result.test, out_dir / "test.jsonl")
    write_json(out_dir / "split_report.json", result.report)
    write_snapshot(out_dir, "corpus split", {"input": args.input, "seed": args.seed})
    sizes = result.report["sizes"]
    print(f"split {len(corpus)} records into {sizes['train']}/{sizes['valid']}/{sizes['test']}")
    return 0


def _cmd_corpus_demo(args) -> int:
    records = samples.generate_raw_records(args.count, args.seed)
    write_records(records, args.out)
    print(f"wrote {len(records)} synthetic raw records to {args.out}")
    return 0


def _cmd_metrics_extract(args) -> int:
    records = read_records(args.input)
    vectors = extract_metrics(records)
    atomic_write_text(args.out, metrics_csv_text(records, vectors, args.with_label))
    print(f"extracted metrics for {len(records)} methods to {args.out}")
    return 0


def _cmd_train(args) -> int:
    ids, X, labels = read_features_csv(args.train_csv)
    if labels is None:
        if not args.labels:
            raise MalformedRecord(
                "features CSV has no label column; pass --labels <corpus.jsonl>")
        by_id = {rec.id: rec.severity_class for rec in read_records(args.labels)}
        missing = [i for i in ids if i not in by_id]
        if missing:
            raise MalformedRecord(f"labels missing for ids {missing[:5]}")
        labels = np.array([by_id[i] for i in ids])
    spec = classifiers.ClassifierSpec(kind=args.model, seed=args.seed)
    model = classifiers.fit(spec, X, labels)
    classifiers.save_model(model, args.out)
    print(f"trained {args.model} on {len(ids)} rows -> {args.out}")
    return 0


def _cmd_predict(args) -> int:
    model = classifiers.load_model(args.model)
    ids, X, _ = read_features_csv(args.features)
    proba = model.predict_proba(X)
    write_predictions(args.out, ids, proba)
    print(f"wrote {len(ids)} prediction rows to {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    hyper = None
    if args.model:
        hyper = classifiers.load_blob(args.model)["hyperparameters"]
    rep = score_external(args.pred, args.truth, hyperparameters=hyper)
    write_json(args.out, rep.to_dict())
    print(f"f1_weighted={rep.f1_w:.4f} mcc={rep.mcc:.4f} auc_weighted={rep.auc_w:.4f}")
    return 0


def _cmd_fusion_export(args) -> int:
    splits_dir = Path(args.splits_dir)
    records = read_records(splits_dir / f"{args.split}.jsonl")
    if args.mode == "plain":
        fusion.export_plain(records, args.out)
    elif args.mode == "inline":
        fusion.export_concat_inline(records, extract_metrics(records), args.out)
    else:
        vectors = extract_metrics(records)
        if args.split == "train":
            train_vectors = vectors
        else:
            train_vectors = extract_metrics(read_records(splits_dir / "train.jsonl"))
        params = robust_scale_fit(train_vectors)  # scale params come from train only
        scaled = robust_scale_transform(vectors, params).rows
        fusion.export_concat_cls(records, scaled, args.out)
    print(f"wrote {args.mode} export for {args.split} to {args.out}")
    return 0


def _cmd_report_curves(args) -> int:
    with open(args.report, encoding="utf-8") as handle:
        rep = json.load(handle)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for family, columns in (("roc", ("fpr", "tpr")), ("pr", ("recall", "precision"))):
        curves = rep.get(f"{family}_curves", {})
        for class_index, points in curves.items():
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(columns)
            for x, y in points:
                writer.writerow([repr(float(x)), repr(float(y))])
            atomic_write_text(out_dir / f"{family}_class{class_index}.csv",
                              buffer.getvalue())
    print(f"curve CSVs written to {out_dir}")
    return 0


def _cmd_rq1(args) -> int:
    config = PipelineConfig(seed=args.seed, corpus_path=args.corpus,
                            out_dir=args.out_dir, scale=not args.no_scale)
    report = run_rq1(config)
    for row in report["models"]:
        print(f"{row['model']:<24} f1w={row['f1_weighted']:.4f} "
              f"auc={row['auc_weighted']:.4f} mcc={row['mcc']:.4f}")
    return 0


_HANDLERS = {
    ("corpus", "build"): _cmd_corpus_build,
    ("corpus", "split"): _cmd_corpus_split,
    ("corpus", "demo"): _cmd_corpus_demo,
    ("metrics", "extract"): _cmd_metrics_extract,
    ("train", None): _cmd_train,
    ("predict", None): _cmd_predict,
    ("evaluate", None): _cmd_evaluate,
    ("fusion", "export"): _cmd_fusion_export,
    ("report", "curves"): _cmd_report_curves,
    ("rq1", None): _cmd_rq1,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        subcommand = getattr(args, f"{args.command}_command", None)
        handler = _HANDLERS[(args.command, subcommand)]
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SevkitError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
