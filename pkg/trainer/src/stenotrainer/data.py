"""Dataset plumbing: manifest lines, encoded-target files, image tensors.

The trainer reads three kinds of files produced by the recognition toolkit
and never calls into it:

* a JSON-lines manifest where each line has at least ``id``, ``image``,
  ``text`` and ``split`` fields;
* an optional targets file (TSV, ``id<TAB>encoded text``) holding the
  placeholder-encoded transcription to train against — when absent the
  manifest's own ``text`` is used;
* grayscale PNG line images, black ink on white, which are inverted and
  scaled to [0, 1] so ink is the signal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch.utils.data import Dataset

from .charset import CharsetBinding


@dataclass(frozen=True)
class LineSample:
    line_id: str
    image_path: Path
    text: str


def read_manifest(path: str | Path, splits: tuple[str, ...] | None = None,
                  image_root: str | Path | None = None) -> list[LineSample]:
    path = Path(path)
    root = Path(image_root) if image_root is not None else path.parent
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            for field in ("id", "image", "text"):
                if field not in rec:
                    raise ValueError(f"{path}:{lineno}: missing {field!r}")
            if splits is not None:
                split = str(rec.get("split", "")).split("-")[0]
                if split not in splits:
                    continue
            samples.append(LineSample(str(rec["id"]),
                                      root / str(rec["image"]),
                                      str(rec["text"])))
    return samples


def read_targets(path: str | Path) -> dict[str, str]:
    """Load ``id<TAB>text`` lines; later duplicates win."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.rstrip("\n")
            if not raw:
                continue
            if "\t" not in raw:
                raise ValueError(f"{path}:{lineno}: expected id<TAB>text")
            line_id, text = raw.split("\t", 1)
            out[line_id] = text
    return out


def load_line_image(path: str | Path, height: int, width: int) -> torch.Tensor:
    """Grayscale PNG -> inverted, height-normalized (1, H, W) float tensor.

    The image is scaled to the target height preserving aspect ratio, then
    right-padded (or center-cropped) to the target width with background.
    """
    with Image.open(path) as img:
        gray = img.convert("L")
        w, h = gray.size
        new_w = max(1, round(w * height / h))
        gray = gray.resize((new_w, height), Image.Resampling.BILINEAR)
        arr = np.asarray(gray, dtype=np.float32)
    arr = (255.0 - arr) / 255.0          # ink -> 1, paper -> 0
    canvas = np.zeros((height, width), dtype=np.float32)
    span = min(width, arr.shape[1])
    canvas[:, :span] = arr[:, :span]
    return torch.from_numpy(canvas).unsqueeze(0)


class LineDataset(Dataset):
    """Pairs of (image tensor, target index sequence)."""

    def __init__(self, samples: list[LineSample], binding: CharsetBinding,
                 height: int, width: int,
                 targets: dict[str, str] | None = None):
        if not samples:
            raise ValueError("dataset is empty")
        self.samples = samples
        self.binding = binding
        self.height = height
        self.width = width
        self.targets = targets

    def text_for(self, sample: LineSample) -> str:
        if self.targets is None:
            return sample.text
        try:
            return self.targets[sample.line_id]
        except KeyError:
            raise ValueError(f"no target for line {sample.line_id!r}") from None

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, index: int):
        sample = self.samples[index]
        image = load_line_image(sample.image_path, self.height, self.width)
        target = torch.tensor(self.binding.encode(self.text_for(sample)),
                              dtype=torch.long)
        return image, target, sample.line_id


def collate(batch):
    """Stack images; concatenate targets CTC-style with per-item lengths."""
    images = torch.stack([item[0] for item in batch])
    targets = torch.cat([item[1] for item in batch])
    lengths = torch.tensor([len(item[1]) for item in batch], dtype=torch.long)
    ids = [item[2] for item in batch]
    return images, targets, lengths, ids
