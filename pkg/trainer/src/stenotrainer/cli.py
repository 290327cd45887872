"""Command-line entry points: ``stenotrainer train`` and ``stenotrainer export``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .charset import CharsetBinding, CharsetError, build_charset
from .config import MODES, TrainConfig
from .data import LineDataset, read_manifest, read_targets
from .model import GatedCNNBGRU
from .training import checkpoint_info, load_checkpoint, train


def _size(value: str) -> tuple[int, int]:
    try:
        w, h = value.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stenotrainer",
        description="Train line recognizers and export their logits.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="train a recognizer on manifest lines")
    p.add_argument("manifest", type=Path)
    p.add_argument("--targets", type=Path,
                   help="TSV of id<TAB>encoded text; defaults to manifest text")
    p.add_argument("--table", type=Path, required=True,
                   help="symbol table export naming the placeholder classes")
    p.add_argument("--image-root", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--mode", choices=MODES, default="scratch")
    p.add_argument("--train-split", default="train")
    p.add_argument("--val-split", default="validation")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--warmup", type=int, default=10)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=_size, default=(1024, 128),
                   metavar="WxH")
    p.add_argument("--init", type=Path,
                   help="checkpoint to start from (for fine-tuning)")

    p = sub.add_parser("export", help="write per-line .logt files")
    p.add_argument("manifest", type=Path)
    p.add_argument("--targets", type=Path)
    p.add_argument("--table", type=Path, required=True)
    p.add_argument("--image-root", type=Path)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--split", default=None,
                   help="restrict to one split (default: all lines)")
    p.add_argument("--size", type=_size, default=(1024, 128), metavar="WxH")
    return parser


def _binding(manifest, targets_path, table, splits, image_root):
    # the class list is a property of the whole corpus, not of the split
    # being processed — otherwise a checkpoint could never score another split
    samples = read_manifest(manifest, splits=splits, image_root=image_root)
    targets = read_targets(targets_path) if targets_path else None
    if targets is None:
        texts = [s.text for s in read_manifest(manifest,
                                               image_root=image_root)]
    else:
        texts = list(targets.values())
    binding = build_charset(texts, table)
    return samples, targets, binding


def _check_classes(checkpoint, binding) -> None:
    saved = checkpoint_info(checkpoint).get("n_classes")
    if saved is not None and saved != binding.n_classes:
        raise CharsetError(
            f"checkpoint {checkpoint} was trained with {saved} classes but "
            f"the targets and table produce {binding.n_classes}")


def _cmd_train(args) -> int:
    config = TrainConfig(mode=args.mode, max_epochs=args.epochs,
                         learning_rate=args.lr, batch_size=args.batch_size,
                         warmup_epochs=args.warmup, patience=args.patience,
                         seed=args.seed, image_width=args.size[0],
                         image_height=args.size[1])
    width, height = args.size
    train_samples, targets, binding = _binding(
        args.manifest, args.targets, args.table,
        (args.train_split, args.val_split), args.image_root)
    by_split = {
        s.line_id: s
        for s in read_manifest(args.manifest, splits=(args.train_split,),
                               image_root=args.image_root)}
    train_part = [s for s in train_samples if s.line_id in by_split]
    val_part = [s for s in train_samples if s.line_id not in by_split]

    train_set = LineDataset(train_part, binding, height, width, targets)
    val_set = (LineDataset(val_part, binding, height, width, targets)
               if val_part else None)

    model = GatedCNNBGRU(binding.n_classes, image_height=height)
    if args.init:
        _check_classes(args.init, binding)
        load_checkpoint(model, args.init)
    result = train(model, train_set, val_set, config, args.out)
    print(f"epochs={result.epochs_run} best_epoch={result.best_epoch} "
          f"best_val_loss={result.best_val_loss:.6f}")
    print(f"checkpoint={result.checkpoint_path}")
    return 0


def _cmd_export(args) -> int:
    from .export import export_logits

    width, height = args.size
    splits = (args.split,) if args.split else None
    samples, targets, binding = _binding(
        args.manifest, args.targets, args.table, splits, args.image_root)
    dataset = LineDataset(samples, binding, height, width, targets)
    _check_classes(args.checkpoint, binding)
    model = GatedCNNBGRU(binding.n_classes, image_height=height)
    load_checkpoint(model, args.checkpoint)
    written = export_logits(model, dataset, binding, args.out)
    print(f"wrote {len(written)} tensor files to {args.out}")
    return 0


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        if args.subcommand == "train":
            return _cmd_train(args)
        return _cmd_export(args)
    except CharsetError as exc:
        print(f"error[Charset]: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error[Invalid]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[IO]: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(run())
