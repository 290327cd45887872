"""Shared fixtures: a deterministic toy line-image corpus.

Every character gets a fixed synthetic glyph (seeded strokes on a white
cell), so identical text renders identically — exactly the memorizable
signal the smoke and capacity tests need.  Targets and the symbol table
come from the ``stenokit`` command-line tool, which is how the trainer is
meant to consume the toolkit: through files, never imports.
"""

from __future__ import annotations

import json
import random
import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest
import torch
from PIL import Image

from stenotrainer.charset import CharsetBinding, build_charset
from stenotrainer.config import TrainConfig
from stenotrainer.data import (LineDataset, load_line_image, read_manifest,
                               read_targets)
from stenotrainer.model import GatedCNNBGRU
from stenotrainer.training import TrainResult, overfit_single, train

WIDTH = 256
HEIGHT = 128
VOCAB = ["jag", "har", "en", "bok", "om", "det", "var", "hon", "kan", "resa",
         "ut", "ur", "vi", "ser", "nu", "den"]


def glyph(ch: str) -> np.ndarray:
    """A fixed 128x16 stroke pattern per character; space is blank."""
    cell = np.full((HEIGHT, 16), 255, np.uint8)
    if ch == " ":
        return cell
    rng = random.Random(f"glyph:{ch}")
    for _ in range(5):
        x0 = rng.randrange(0, 12)
        y0 = rng.randrange(24, 88)
        w = rng.randrange(2, 6)
        h = rng.randrange(8, 32)
        cell[y0:y0 + h, x0:x0 + w] = 0
    return cell


def line_image(text: str) -> np.ndarray:
    return np.concatenate([glyph(ch) for ch in text], axis=1)


def run_stenokit(*args: str) -> subprocess.CompletedProcess:
    proc = subprocess.run(["stenokit", *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"stenokit {' '.join(args)} failed "
                           f"({proc.returncode}): {proc.stderr}")
    return proc


@dataclass(frozen=True)
class ToyCorpus:
    root: Path
    manifest: Path
    table: Path
    targets_path: Path
    records: tuple[dict, ...]
    encoded: dict          # id -> placeholder-encoded text


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory) -> ToyCorpus:
    root = tmp_path_factory.mktemp("corpus")
    (root / "img").mkdir()
    rng = random.Random(11)
    records = []
    for k in range(40):
        text = " ".join(rng.sample(VOCAB, rng.choice([2, 3])))
        name = f"line-{k:03d}"
        Image.fromarray(line_image(text), mode="L").save(
            root / "img" / f"{name}.png")
        records.append({"id": name, "image": f"img/{name}.png", "text": text,
                        "type": "clean",
                        "split": "train" if k < 32 else "validation"})
    manifest = root / "manifest.jsonl"
    with open(manifest, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")

    raw = root / "raw.txt"
    raw.write_text("".join(rec["text"] + "\n" for rec in records),
                   encoding="utf-8")
    table = root / "table.tsv"
    run_stenokit("table", "--scheme", "shortform", "--out", str(table))
    enc_file = root / "enc.txt"
    run_stenokit("encode", "--scheme", "shortform",
                 "--in", str(raw), "--out", str(enc_file))
    encoded_lines = enc_file.read_text(encoding="utf-8").splitlines()
    assert len(encoded_lines) == len(records)
    encoded = {rec["id"]: enc for rec, enc in zip(records, encoded_lines)}
    targets_path = root / "targets.tsv"
    targets_path.write_text(
        "".join(f"{rec['id']}\t{encoded[rec['id']]}\n" for rec in records),
        encoding="utf-8")
    return ToyCorpus(root, manifest, table, targets_path,
                     tuple(records), encoded)


@pytest.fixture(scope="session")
def binding(toy_corpus) -> CharsetBinding:
    return build_charset(list(toy_corpus.encoded.values()), toy_corpus.table)


@pytest.fixture(scope="session")
def datasets(toy_corpus, binding):
    targets = read_targets(toy_corpus.targets_path)
    train_samples = read_manifest(toy_corpus.manifest, splits=("train",))
    val_samples = read_manifest(toy_corpus.manifest, splits=("validation",))
    train_set = LineDataset(train_samples, binding, HEIGHT, WIDTH, targets)
    val_set = LineDataset(val_samples, binding, HEIGHT, WIDTH, targets)
    return train_set, val_set


@dataclass(frozen=True)
class SmokeRun:
    model: GatedCNNBGRU
    result: TrainResult
    out_dir: Path


@pytest.fixture(scope="session")
def smoke_run(datasets, binding, tmp_path_factory) -> SmokeRun:
    """Two epochs over the 32 training lines with validation."""
    train_set, val_set = datasets
    out_dir = tmp_path_factory.mktemp("smoke")
    config = TrainConfig(max_epochs=2, warmup_epochs=0, patience=0, seed=0)
    torch.manual_seed(0)   # weight init must not depend on test order
    model = GatedCNNBGRU(binding.n_classes, image_height=HEIGHT)
    result = train(model, train_set, val_set, config, out_dir)
    return SmokeRun(model, result, out_dir)


@dataclass(frozen=True)
class OverfitRun:
    model: GatedCNNBGRU
    losses: list
    record: dict           # the memorized line's manifest record
    image: torch.Tensor
    target: torch.Tensor


@pytest.fixture(scope="session")
def overfit_run(toy_corpus, binding) -> OverfitRun:
    """One line hammered until the CTC loss is near zero."""
    rec = toy_corpus.records[0]
    image = load_line_image(toy_corpus.root / rec["image"], HEIGHT, WIDTH)
    target = torch.tensor(binding.encode(toy_corpus.encoded[rec["id"]]),
                          dtype=torch.long)
    torch.manual_seed(1)   # weight init must not depend on test order
    model = GatedCNNBGRU(binding.n_classes, image_height=HEIGHT)
    losses = overfit_single(model, image, target, iterations=200, seed=0,
                            stop_below=0.05)
    return OverfitRun(model, losses, rec, image, target)
