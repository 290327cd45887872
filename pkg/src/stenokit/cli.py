"""The ``stenokit`` command: one entry point wiring the modules together.

Exit codes: 0 success, 1 domain error (printed as ``error[<Code>]: ...``),
2 usage error.  Every run writes a single JSON reproducibility line to
standard error (version, subcommand, config hash, seed) so machine-readable
outputs on stdout and in files stay byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, codec, corpus, ctc, metrics, preproc, synth
from .errors import LengthMismatch, StenokitError

DATA_ROOT_VAR = "STENOKIT_DATA_ROOT"


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 1024x128, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stenokit",
        description="Stenography recognition toolkit: encodings, decoding, "
                    "evaluation, preprocessing, synthesis, corpus analysis.")
    parser.add_argument("--threads", type=int, default=1,
                        help="upper bound on worker threads (default 1)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("encode", help="apply a target-text encoding scheme")
    p.add_argument("--scheme", required=True, choices=codec.SCHEMES)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)

    p = sub.add_parser("decode", help="expand placeholders back to plain text")
    p.add_argument("--scheme", required=True, choices=codec.SCHEMES)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)

    p = sub.add_parser("table", help="export a scheme's symbol table")
    p.add_argument("--scheme", required=True, choices=codec.SCHEMES)
    p.add_argument("--out", dest="outfile", required=True)

    p = sub.add_parser("preprocess", help="preprocess a line image to model input")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--low", type=float, default=2.0, help="low stretch percentile")
    p.add_argument("--high", type=float, default=98.0, help="high stretch percentile")
    p.add_argument("--size", type=_parse_size, default=(1024, 128),
                   metavar="WxH", help="target size (default 1024x128)")
    p.add_argument("--no-resize", action="store_true",
                   help="keep the stretched image at its native size")

    p = sub.add_parser("synth", help="compose synthetic lines from word crops")
    p.add_argument("--manifest", required=True)
    p.add_argument("--images", default=None,
                   help=f"image root (default ${DATA_ROOT_VAR})")
    p.add_argument("--out", dest="outdir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=10,
                   help="usages per word crop (default 10)")

    p = sub.add_parser("decode-logits", help="best-path decode exported logits")
    p.add_argument("--in", dest="infile", required=True,
                   help="a .logt file or a directory of them")
    p.add_argument("--charset", default=None, help="charset sidecar override")
    p.add_argument("--scheme", default=None, choices=codec.SCHEMES,
                   help="also expand placeholders of this scheme")
    p.add_argument("--out", dest="outfile", default=None,
                   help="write TSV here instead of stdout")

    p = sub.add_parser("evaluate", help="character/word error rates")
    p.add_argument("--refs", required=True, help="corpus manifest with references")
    p.add_argument("--hyps", required=True, help="TSV: line_id<TAB>hypothesis")
    p.add_argument("--level", choices=metrics.LEVELS, default="char")
    p.add_argument("--include-missing", action="store_true",
                   help="score lines of type 'missing' too")
    p.add_argument("--out", dest="outfile", default=None,
                   help="machine-readable key=value report")

    p = sub.add_parser("stats", help="line counts per split and type")
    p.add_argument("--manifest", required=True)
    p.add_argument("--include-missing", action="store_true")
    p.add_argument("--out", dest="outfile", default=None,
                   help="machine-readable key=value counts")

    p = sub.add_parser("analyze", help="TF-IDF similarity between works")
    p.add_argument("--manifest", required=True)
    p.add_argument("--by", choices=("work", "notepad"), default="work",
                   help="grouping field (default work)")
    p.add_argument("--stopwords", default=None, help="stop-word file override")
    p.add_argument("--out", dest="outfile", default=None,
                   help="JSON report path")
    return parser


def _repro_header(args: argparse.Namespace) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "subcommand"}
    digest = hashlib.sha256(
        json.dumps(config, sort_keys=True, default=str).encode("utf-8")).hexdigest()
    print(json.dumps({"tool": "stenokit", "version": __version__,
                      "subcommand": args.subcommand,
                      "config_sha256": digest,
                      "seed": getattr(args, "seed", None)}), file=sys.stderr)


def _cmd_encode(args, direction) -> int:
    text = Path(args.infile).read_text(encoding="utf-8")
    out = direction(args.scheme, text)
    Path(args.outfile).write_text(out, encoding="utf-8")
    return 0


def _cmd_table(args) -> int:
    codec.write_symbol_table(codec.build_symbol_table(args.scheme), args.outfile)
    return 0


def _cmd_preprocess(args) -> int:
    cfg = preproc.PreprocessConfig(
        low_percentile=args.low, high_percentile=args.high,
        target_size=None if args.no_resize else args.size)
    img = preproc.load_image(args.infile)
    preproc.save_png(args.outfile, preproc.preprocess(img, cfg))
    return 0


def _resolve_image_root(flag_value) -> Path:
    root = flag_value or os.environ.get(DATA_ROOT_VAR)
    if not root:
        raise StenokitError(
            f"no image root: pass --images or set ${DATA_ROOT_VAR}")
    return Path(root)


def _cmd_synth(args) -> int:
    records = corpus.load_manifest(args.manifest)
    root = _resolve_image_root(args.images)

    def load(line_id):
        rec = by_id[line_id]
        return np.asarray(preproc.value_channel(preproc.load_image(root / rec.image)))

    by_id = {r.line_id: r for r in records}
    pool, rejected = synth.build_word_pool(records, load)
    for line_id in rejected:
        print(f"skipped {line_id}: box/token count mismatch", file=sys.stderr)
    spec = synth.SynthSpec(seed=args.seed, repeats_per_word=args.repeats)
    lines = synth.generate(pool, spec)
    synth.write_lines(lines, args.outdir)
    print(f"wrote {len(lines)} lines to {args.outdir}")
    return 0


def _cmd_decode_logits(args) -> int:
    src = Path(args.infile)
    files = sorted(src.glob("*.logt")) if src.is_dir() else [src]
    if not files:
        raise StenokitError(f"no .logt files under {src}")
    rows = []
    for f in files:
        text = ctc.decode_file(f, args.charset)
        if args.scheme:
            text = codec.decode(args.scheme, text)
        rows.append((f.name.removesuffix(".logt"), text))
    out = "".join(f"{line_id}\t{text}\n" for line_id, text in rows)
    if args.outfile:
        Path(args.outfile).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return 0


def _read_hyps(path) -> dict[str, str]:
    hyps = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not raw:
            continue
        line_id, _, text = raw.partition("\t")
        if line_id in hyps:
            raise StenokitError(f"{path}:{lineno}: duplicate hypothesis for {line_id}")
        hyps[line_id] = text
    return hyps


def _cmd_evaluate(args) -> int:
    records = corpus.select(corpus.load_manifest(args.refs),
                            include_missing=args.include_missing)
    hyps = _read_hyps(args.hyps)
    wanted = [r.line_id for r in records]
    absent = [i for i in wanted if i not in hyps]
    if absent:
        raise LengthMismatch(
            f"{len(absent)} reference line(s) without hypothesis, "
            f"first: {absent[:5]}")
    pairs = [(r.text, hyps[r.line_id]) for r in records]
    report = metrics.evaluate(pairs, level=args.level, ids=wanted, on_empty="exclude")
    scored = [s for s in report.summaries if s.N > 0]
    kv = {
        "level": report.level,
        "lines": len(report.summaries),
        "excluded_empty": len(report.excluded_ids),
        "macro_rate": f"{report.macro_rate:.6f}",
        "micro_rate": f"{report.micro_rate:.6f}",
        "substitutions": sum(s.S for s in scored),
        "deletions": sum(s.D for s in scored),
        "insertions": sum(s.I for s in scored),
        "reference_units": sum(s.N for s in scored),
    }
    for line_type in corpus.LINE_TYPES:
        n = sum(1 for r in records if r.type == line_type)
        if n:
            kv[f"lines.{line_type}"] = n
    label = "CER" if args.level == "char" else "WER"
    print(f"{label} over {kv['lines']} lines "
          f"({kv['excluded_empty']} empty references excluded)")
    if report.excluded_ids:
        print("excluded:", ", ".join(map(str, report.excluded_ids[:10])))
    print(f"macro {label}: {report.macro_rate:.4f}")
    print(f"micro {label}: {report.micro_rate:.4f}")
    if args.outfile:
        _write_kv(args.outfile, kv)
    return 0


def _write_kv(path, kv: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in kv.items():
            fh.write(f"{key}={value}\n")


def _cmd_stats(args) -> int:
    records = corpus.load_manifest(args.manifest)
    table = corpus.split_stats(records, include_missing=args.include_missing)
    print(corpus.format_stats(table))
    if args.outfile:
        kv = {f"{split}.{t}": n for split, row in table.items() for t, n in row.items()}
        for split, row in table.items():
            kv[f"{split}.total"] = sum(row.values())
        _write_kv(args.outfile, kv)
    return 0


def _cmd_analyze(args) -> int:
    records = corpus.select(corpus.load_manifest(args.manifest))
    docs: dict[str, list[str]] = {}
    for rec in records:
        label = getattr(rec, args.by) or "unknown"
        docs.setdefault(label, []).extend(rec.text.split())
    stop = corpus.load_stopwords(args.stopwords)
    labels, sim, tops = corpus.tfidf_cosine(docs, stop)
    width = max(len(lab) for lab in labels) + 2
    print(" " * width + "".join(f"{lab:>{max(len(lab) + 2, 8)}}" for lab in labels))
    for i, label in enumerate(labels):
        cells = "".join(f"{sim[i, j]:>{max(len(labels[j]) + 2, 8)}.3f}"
                        for j in range(len(labels)))
        print(f"{label:<{width}}{cells}")
    for label in labels:
        terms = ", ".join(t for t, _ in tops[label])
        print(f"top terms [{label}]: {terms}")
    if args.outfile:
        payload = {"labels": labels, "similarity": sim.tolist(),
                   "top_terms": {lab: tops[lab] for lab in labels}}
        Path(args.outfile).write_text(json.dumps(payload, ensure_ascii=False, indent=2),
                                      encoding="utf-8")
    return 0


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    _repro_header(args)
    try:
        if args.subcommand == "encode":
            return _cmd_encode(args, codec.encode)
        if args.subcommand == "decode":
            return _cmd_encode(args, codec.decode)
        if args.subcommand == "table":
            return _cmd_table(args)
        if args.subcommand == "preprocess":
            return _cmd_preprocess(args)
        if args.subcommand == "synth":
            return _cmd_synth(args)
        if args.subcommand == "decode-logits":
            return _cmd_decode_logits(args)
        if args.subcommand == "evaluate":
            return _cmd_evaluate(args)
        if args.subcommand == "stats":
            return _cmd_stats(args)
        if args.subcommand == "analyze":
            return _cmd_analyze(args)
        raise AssertionError(f"unhandled subcommand {args.subcommand}")
    except StenokitError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error[Invalid]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[IO]: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(run())
