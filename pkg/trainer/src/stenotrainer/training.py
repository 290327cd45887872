"""Training loop: AdamW + CTC loss, warmup epochs, patience early stopping.

Validation loss drives model selection.  During the warmup window the
stopping counter is frozen (no epoch can exhaust patience), matching the
idea that early epochs are too noisy to judge.  Fine-tuning runs disable
warmup entirely via the config.  The best checkpoint is written atomically
(temp file + rename) so a crash never leaves a truncated model behind.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn
from torch.utils.data import DataLoader

from .config import TrainConfig
from .data import LineDataset, collate
from .model import GatedCNNBGRU


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    in_warmup: bool
    is_best: bool


@dataclass(frozen=True)
class TrainResult:
    epochs_run: int
    best_epoch: int
    best_val_loss: float
    history: tuple[EpochStats, ...]
    checkpoint_path: Path


def _ctc_loss_fn():
    return nn.CTCLoss(blank=0, zero_infinity=True)


def _run_epoch(model, loader, loss_fn, optimizer=None):
    training = optimizer is not None
    model.train(training)
    total, count = 0.0, 0
    with torch.set_grad_enabled(training):
        for images, targets, target_lengths, _ids in loader:
            logits = model(images)                       # (B, T, C)
            log_probs = logits.log_softmax(2).permute(1, 0, 2)
            input_lengths = torch.full((images.shape[0],), logits.shape[1],
                                       dtype=torch.long)
            loss = loss_fn(log_probs, targets, input_lengths, target_lengths)
            if training:
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
            total += loss.item() * images.shape[0]
            count += images.shape[0]
    return total / max(count, 1)


def save_checkpoint(model: nn.Module, path: str | Path, *,
                    extra: dict | None = None) -> None:
    """Write state dict via a temp file and atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"state_dict": model.state_dict(), **(extra or {})}
    tmp = path.with_suffix(path.suffix + ".tmp")
    torch.save(payload, tmp)
    os.replace(tmp, path)


def load_checkpoint(model: nn.Module, path: str | Path) -> dict:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    model.load_state_dict(payload["state_dict"])
    return {k: v for k, v in payload.items() if k != "state_dict"}


def checkpoint_info(path: str | Path) -> dict:
    """The extras stored next to a checkpoint's weights (epoch, classes...)."""
    payload = torch.load(path, map_location="cpu", weights_only=True)
    return {k: v for k, v in payload.items() if k != "state_dict"}


def train(model: GatedCNNBGRU, train_set: LineDataset,
          val_set: LineDataset | None, config: TrainConfig,
          out_dir: str | Path, log_name: str = "epochs.jsonl") -> TrainResult:
    """Train ``model``; returns stats and the path of the best checkpoint.

    Without a validation set the training loss stands in for selection and
    stopping, which only makes sense for smoke runs and overfit probes.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = out_dir / "best.pt"
    log_path = out_dir / log_name

    torch.manual_seed(config.seed)
    loader = DataLoader(train_set, batch_size=config.batch_size, shuffle=True,
                        collate_fn=collate,
                        generator=torch.Generator().manual_seed(config.seed))
    val_loader = (DataLoader(val_set, batch_size=config.batch_size,
                             shuffle=False, collate_fn=collate)
                  if val_set is not None else None)

    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    loss_fn = _ctc_loss_fn()

    best_val = math.inf
    best_epoch = 0
    stale = 0
    history: list[EpochStats] = []

    with open(log_path, "w", encoding="utf-8") as log:
        log.write(json.dumps({"config": asdict(config)}) + "\n")
        for epoch in range(1, config.max_epochs + 1):
            train_loss = _run_epoch(model, loader, loss_fn, optimizer)
            val_loss = (_run_epoch(model, val_loader, loss_fn)
                        if val_loader is not None else train_loss)
            in_warmup = epoch <= config.warmup_epochs
            is_best = val_loss < best_val
            if is_best:
                best_val = val_loss
                best_epoch = epoch
                stale = 0
                save_checkpoint(model, checkpoint,
                                extra={"epoch": epoch, "val_loss": val_loss,
                                       "n_classes": model.n_classes})
            elif not in_warmup:
                stale += 1
            stats = EpochStats(epoch, train_loss, val_loss, in_warmup, is_best)
            history.append(stats)
            log.write(json.dumps(asdict(stats)) + "\n")
            log.flush()
            if not in_warmup and stale >= config.patience > 0:
                break

    return TrainResult(len(history), best_epoch, best_val,
                       tuple(history), checkpoint)


def overfit_single(model: GatedCNNBGRU, image: torch.Tensor,
                   target: torch.Tensor, *, iterations: int = 200,
                   learning_rate: float = 0.001, seed: int = 0,
                   stop_below: float | None = None) -> list[float]:
    """Hammer one (image, target) pair; returns the per-iteration losses.

    A healthy architecture memorizes a single line quickly — this is the
    capacity sanity check used by the tests.
    """
    torch.manual_seed(seed)
    optimizer = torch.optim.AdamW(model.parameters(), lr=learning_rate)
    loss_fn = _ctc_loss_fn()
    images = image.unsqueeze(0)
    target_lengths = torch.tensor([len(target)], dtype=torch.long)
    losses = []
    model.train()
    for _ in range(iterations):
        logits = model(images)
        log_probs = logits.log_softmax(2).permute(1, 0, 2)
        input_lengths = torch.tensor([logits.shape[1]], dtype=torch.long)
        loss = loss_fn(log_probs, target, input_lengths, target_lengths)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        losses.append(loss.item())
        if stop_below is not None and losses[-1] < stop_below:
            break
    return losses
