"""Logit export in the recognizer's binary tensor format.

Writes the same on-disk layout the decoding toolkit reads — magic ``LOGT``,
a little-endian ``u16`` version, ``u32`` timestep and class counts, then
row-major float32 — plus the ``charset.txt`` sidecar.  The format is
reimplemented here from its byte layout on purpose: the two packages share
files, not code.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import torch

from .charset import CharsetBinding
from .data import LineDataset
from .model import GatedCNNBGRU

MAGIC = b"LOGT"
VERSION = 1
_HEADER = struct.Struct("<4sHII")


def write_logits_file(logits: np.ndarray, path: str | Path) -> None:
    arr = np.ascontiguousarray(logits, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError("logits must be a 2-D (timesteps, classes) array")
    t, c = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, t, c))
        fh.write(arr.tobytes())


def export_logits(model: GatedCNNBGRU, dataset: LineDataset,
                  binding: CharsetBinding, out_dir: str | Path,
                  batch_size: int = 8) -> list[Path]:
    """Run the model over ``dataset`` and write one ``<id>.logt`` per line.

    Also writes the ``charset.txt`` sidecar so the decoder can map class
    indices back to symbols.  Returns the written tensor paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    binding.write_sidecar(out_dir / "charset.txt")
    written: list[Path] = []
    model.eval()
    with torch.no_grad():
        for start in range(0, len(dataset), batch_size):
            chunk = [dataset[i]
                     for i in range(start, min(start + batch_size,
                                               len(dataset)))]
            images = torch.stack([item[0] for item in chunk])
            logits = model(images).cpu().numpy()
            for (_, _, line_id), mat in zip(chunk, logits):
                path = out_dir / f"{line_id}.logt"
                write_logits_file(mat, path)
                written.append(path)
    return written
