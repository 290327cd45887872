"""Synthetic training lines recombined from segmented word images.

Words are cropped from original lines via their bounding boxes, then every
crop is reused exactly ``repeats_per_word`` times: the whole multiset of
usages is shuffled once and packed greedily into new lines whose character
counts follow the empirical distribution of the source lines.  Each pasted
word gets its own small rotation, scale and vertical shift, and lines are
composed dark-on-light with ``np.minimum``.  No linguistic constraints are
applied — word order is whatever the shuffle produces.

Determinism: the global shuffle and the per-line length draws come from
``default_rng(seed)``; every line additionally derives its own stream from
``default_rng([seed, line_index])`` for augmentation parameters, so
generating lines in parallel cannot change the output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import EmptyPool, MissingBoxes

BACKGROUND = 255


@dataclass(frozen=True, eq=False)
class WordCrop:
    word_id: str
    line_id: str
    token: str
    image: np.ndarray
    box: tuple[int, int, int, int]

    def __post_init__(self):
        if not self.token:
            raise ValueError(f"word {self.word_id} has an empty token")


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    repeats_per_word: int = 10
    rotation_deg: float = 2.0
    scale_range: tuple[float, float] = (0.9, 1.1)
    shift_px: int = 5
    gap_px: tuple[int, int] = (10, 30)
    # empirical character counts of the source lines; targets are drawn
    # from this list with replacement
    target_lengths: tuple[int, ...] = ()

    def __post_init__(self):
        if self.repeats_per_word < 1:
            raise ValueError("repeats_per_word must be >= 1")
        if self.scale_range[0] > self.scale_range[1] or self.gap_px[0] > self.gap_px[1]:
            raise ValueError("ranges must be (low, high) with low <= high")


@dataclass
class SynthLine:
    image: np.ndarray
    text: str
    provenance: dict


def source_line_lengths(pool) -> tuple[int, ...]:
    """Character counts of the original lines, reconstructed from the pool."""
    by_line: dict[str, list[str]] = {}
    for w in pool:
        by_line.setdefault(w.line_id, []).append(w.token)
    return tuple(len(" ".join(tokens)) for tokens in by_line.values())


def build_word_pool(records, images):
    """Crop words out of line images by zipping sorted boxes with tokens.

    ``records`` are manifest entries with .line_id, .text and .boxes;
    ``images`` maps line id -> grayscale array (or is a callable doing so).
    Lines whose box count disagrees with their token count are skipped and
    reported in the second return value — no partial alignment is ever
    attempted.  Lines without any boxes at all are a caller error.
    """
    get = images if callable(images) else images.__getitem__
    pool: list[WordCrop] = []
    rejected: list[str] = []
    missing = [r.line_id for r in records if r.boxes is None]
    if missing:
        raise MissingBoxes(missing)
    for rec in records:
        tokens = rec.text.split()
        boxes = sorted(rec.boxes, key=lambda b: b[0])
        if len(boxes) != len(tokens):
            rejected.append(rec.line_id)
            continue
        img = np.asarray(get(rec.line_id))
        for k, (token, (x, y, w, h)) in enumerate(zip(tokens, boxes)):
            crop = img[y:y + h, x:x + w]
            if crop.size == 0:
                raise ValueError(f"box {k} of line {rec.line_id} is outside the image")
            pool.append(WordCrop(word_id=f"{rec.line_id}:{k}", line_id=rec.line_id,
                                 token=token, image=crop, box=(x, y, w, h)))
    return pool, rejected


def _augment(crop: np.ndarray, rotation: float, scale: float) -> np.ndarray:
    img = Image.fromarray(crop)
    w = max(1, round(img.width * scale))
    h = max(1, round(img.height * scale))
    img = img.resize((w, h), Image.BILINEAR)
    img = img.rotate(rotation, resample=Image.BILINEAR, expand=True,
                     fillcolor=BACKGROUND)
    return np.asarray(img)


def _compose(words, params, shift_px: int) -> np.ndarray:
    margin = 8
    max_h = max(w.shape[0] for w in words)
    height = max_h + 2 * shift_px + margin
    bottom = (height + max_h) // 2
    widths = [w.shape[1] for w in words]
    gaps = [p["gap"] for p in params]
    canvas = np.full((height, margin + sum(widths) + sum(gaps[1:]) + margin),
                     BACKGROUND, dtype=np.uint8)
    x = margin
    for k, (word, p) in enumerate(zip(words, params)):
        if k:
            x += p["gap"]
        h, w = word.shape
        y = min(max(bottom - h + p["shift"], 0), canvas.shape[0] - h)
        region = canvas[y:y + h, x:x + w]
        np.minimum(region, word, out=region)
        x += w
    return canvas


def generate(pool, spec: SynthSpec):
    """Compose synthetic lines until every word has been used exactly
    ``spec.repeats_per_word`` times."""
    if not pool:
        raise EmptyPool("cannot generate lines from an empty word pool")
    targets = spec.target_lengths or source_line_lengths(pool)
    rng = np.random.default_rng(spec.seed)
    usages = np.repeat(np.arange(len(pool)), spec.repeats_per_word)
    rng.shuffle(usages)

    # greedy packing: draw a target character count, then take words off the
    # shuffled queue until the running transliteration reaches it
    groups: list[list[int]] = []
    pos = 0
    while pos < len(usages):
        target = int(targets[rng.integers(len(targets))])
        chars = 0
        group = []
        while pos < len(usages) and (not group or chars < target):
            idx = int(usages[pos])
            group.append(idx)
            chars += len(pool[idx].token) + (1 if chars else 0)
            pos += 1
        groups.append(group)

    lines = []
    for line_index, group in enumerate(groups):
        line_rng = np.random.default_rng([spec.seed, line_index])
        params = []
        for _ in group:
            params.append({
                "rotation": float(line_rng.uniform(-spec.rotation_deg, spec.rotation_deg)),
                "scale": float(line_rng.uniform(*spec.scale_range)),
                "shift": int(line_rng.integers(-spec.shift_px, spec.shift_px + 1)),
                "gap": int(line_rng.integers(spec.gap_px[0], spec.gap_px[1] + 1)),
            })
        words = [_augment(pool[idx].image, p["rotation"], p["scale"])
                 for idx, p in zip(group, params)]
        image = _compose(words, params, spec.shift_px)
        text = " ".join(pool[idx].token for idx in group)
        lines.append(SynthLine(image=image, text=text, provenance={
            "line_index": line_index,
            "seed": spec.seed,
            "word_ids": [pool[idx].word_id for idx in group],
            "params": params,
        }))
    return lines


def usage_counts(lines, pool) -> dict[str, int]:
    counts = {w.word_id: 0 for w in pool}
    for line in lines:
        for wid in line.provenance["word_ids"]:
            counts[wid] += 1
    return counts


def write_lines(lines, outdir, prefix: str = "synth") -> None:
    """PNG per line plus manifest and provenance JSON-lines files."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = []
    provenance = []
    for k, line in enumerate(lines):
        name = f"{prefix}-{k:05d}"
        Image.fromarray(line.image).save(outdir / f"{name}.png", format="PNG")
        manifest.append({"id": name, "image": f"{name}.png", "text": line.text,
                         "type": "clean", "split": "train"})
        provenance.append({"id": name, **line.provenance})
    with open(outdir / "manifest.jsonl", "w", encoding="utf-8") as fh:
        for rec in manifest:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    with open(outdir / "provenance.jsonl", "w", encoding="utf-8") as fh:
        for rec in provenance:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
