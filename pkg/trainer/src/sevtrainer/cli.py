"""Trainer CLI: fine-tune on fusion exports, emit bridge predictions."""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from . import TrainerError, __version__
from .data import load_split, vocab_from_train
from .predict import predict_file
from .training import TrainConfig, fine_tune, save_checkpoint


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sevtrainer", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sevtrainer {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    train_p = sub.add_parser("train", help="two-phase fine-tuning")
    train_p.add_argument("--mode", choices=["plain", "concat_inline", "concat_cls"],
                         required=True)
    train_p.add_argument("--data-dir", required=True,
                         help="directory with <mode>_{train,valid,test}.jsonl exports")
    train_p.add_argument("--seed", type=int, default=0)
    train_p.add_argument("--out", required=True, help="checkpoint path")
    train_p.add_argument("--phase1-epochs", type=int)
    train_p.add_argument("--phase2-epochs", type=int)
    train_p.add_argument("--encoder-layers", type=int)
    train_p.add_argument("--batch-size", type=int)

    predict_p = sub.add_parser("predict", help="emit {id, proba} rows")
    predict_p.add_argument("--checkpoint", required=True)
    predict_p.add_argument("--data", required=True, help="fusion JSONL to score")
    predict_p.add_argument("--out", required=True)
    return parser


def _config_from_args(args) -> TrainConfig:
    overrides = {}
    names = {f.name for f in fields(TrainConfig)}
    for key in ("phase1_epochs", "phase2_epochs", "encoder_layers", "batch_size"):
        value = getattr(args, key)
        if value is not None and key in names:
            overrides[key] = value
    return TrainConfig(mode=args.mode, seed=args.seed, **overrides)


def _cmd_train(args) -> int:
    config = _config_from_args(args)
    vocab = vocab_from_train(args.data_dir, config.mode, config.vocab_size)
    train = load_split(args.data_dir, config.mode, "train", vocab)
    valid = load_split(args.data_dir, config.mode, "valid", vocab)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    result = fine_tune(config, train, valid, vocab,
                       log_path=out.parent / "train_log.jsonl")
    save_checkpoint(out, result, config, vocab)
    print(f"best validation F1w {result.best_val_f1w:.4f} -> {out}")
    return 0


def _cmd_predict(args) -> int:
    count = predict_file(args.checkpoint, args.data, args.out)
    print(f"wrote {count} prediction rows to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "train":
            return _cmd_train(args)
        return _cmd_predict(args)
    except TrainerError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
