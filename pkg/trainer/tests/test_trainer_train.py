"""Training loop behavior: smoke convergence, capacity, stopping, checkpoints."""

import json

import pytest
import torch

from stenotrainer.config import TrainConfig
from stenotrainer.model import GatedCNNBGRU
from stenotrainer.training import (load_checkpoint, save_checkpoint,
                                    train)


def test_two_epoch_smoke_loss_strictly_decreases(smoke_run):
    history = smoke_run.result.history
    assert len(history) == 2
    assert history[1].train_loss < history[0].train_loss


def test_smoke_validation_tracked(smoke_run):
    assert smoke_run.result.best_epoch >= 1
    best = min(h.val_loss for h in smoke_run.result.history)
    assert smoke_run.result.best_val_loss == best


def test_single_line_overfit_reaches_near_zero(overfit_run):
    assert len(overfit_run.losses) <= 200
    assert overfit_run.losses[-1] < 0.1
    assert overfit_run.losses[0] > 1.0   # started from an untrained model


def test_checkpoint_written_atomically(smoke_run, binding):
    checkpoint = smoke_run.result.checkpoint_path
    assert checkpoint.is_file()
    assert not list(checkpoint.parent.glob("*.tmp"))
    fresh = GatedCNNBGRU(binding.n_classes, image_height=128)
    extra = load_checkpoint(fresh, checkpoint)
    assert extra["epoch"] == smoke_run.result.best_epoch
    assert extra["n_classes"] == binding.n_classes


def test_checkpoint_restores_equivalent_model(smoke_run, binding, datasets):
    train_set, _ = datasets
    image, _, _ = train_set[0]
    fresh = GatedCNNBGRU(binding.n_classes, image_height=128)
    load_checkpoint(fresh, smoke_run.result.checkpoint_path)
    fresh.eval()
    smoke_run.model.eval()
    with torch.no_grad():
        assert torch.equal(fresh(image.unsqueeze(0)),
                           smoke_run.model(image.unsqueeze(0)))


def test_epoch_log_has_config_then_stats(smoke_run):
    lines = (smoke_run.out_dir / "epochs.jsonl").read_text(
        encoding="utf-8").splitlines()
    head = json.loads(lines[0])
    assert head["config"]["max_epochs"] == 2
    rows = [json.loads(line) for line in lines[1:]]
    assert [row["epoch"] for row in rows] == [1, 2]
    assert all(set(row) == {"epoch", "train_loss", "val_loss",
                            "in_warmup", "is_best"} for row in rows)


def _script_epochs(monkeypatch, val_losses):
    """Make each epoch report a fixed train loss and the next scripted
    validation loss, isolating the stopping logic from real optimization."""
    values = iter(val_losses)

    def fake_run_epoch(model, loader, loss_fn, optimizer=None):
        if optimizer is not None:
            return 5.0                     # train-pass loss, irrelevant here
        return next(values)

    monkeypatch.setattr("stenotrainer.training._run_epoch", fake_run_epoch)


def test_patience_stops_stale_training(datasets, binding, tmp_path,
                                       monkeypatch):
    _script_epochs(monkeypatch, [1.0] * 10)   # never improves after epoch 1
    train_set, val_set = datasets
    config = TrainConfig(max_epochs=10, warmup_epochs=0, patience=2, seed=0)
    model = GatedCNNBGRU(binding.n_classes, image_height=128)
    result = train(model, train_set, val_set, config, tmp_path)
    assert result.epochs_run == 3          # best at 1, stale at 2 and 3
    assert result.best_epoch == 1


def test_warmup_epochs_cannot_exhaust_patience(datasets, binding, tmp_path,
                                               monkeypatch):
    _script_epochs(monkeypatch, [1.0] * 10)
    train_set, val_set = datasets
    config = TrainConfig(max_epochs=10, warmup_epochs=3, patience=2, seed=0)
    model = GatedCNNBGRU(binding.n_classes, image_height=128)
    result = train(model, train_set, val_set, config, tmp_path)
    # epochs 2-3 are stale but inside warmup; stopping arms at epoch 4
    assert result.epochs_run == 5
    assert [h.in_warmup for h in result.history] == [True, True, True,
                                                     False, False]


def test_improvement_resets_patience(datasets, binding, tmp_path,
                                     monkeypatch):
    _script_epochs(monkeypatch, [3.0, 3.0, 2.0, 2.5, 2.5, 2.5])
    train_set, val_set = datasets
    config = TrainConfig(max_epochs=6, warmup_epochs=0, patience=2, seed=0)
    model = GatedCNNBGRU(binding.n_classes, image_height=128)
    result = train(model, train_set, val_set, config, tmp_path)
    assert result.best_epoch == 3
    assert result.epochs_run == 5          # stale at 4 and 5
    assert [h.is_best for h in result.history] == [True, False, True,
                                                   False, False]


def test_zero_patience_disables_early_stopping(datasets, binding, tmp_path,
                                               monkeypatch):
    _script_epochs(monkeypatch, [1.0] * 3)
    train_set, val_set = datasets
    config = TrainConfig(max_epochs=3, warmup_epochs=0, patience=0, seed=0)
    model = GatedCNNBGRU(binding.n_classes, image_height=128)
    result = train(model, train_set, val_set, config, tmp_path)
    assert result.epochs_run == 3


def test_finetune_log_has_no_warmup_rows(datasets, binding, tmp_path):
    _, val_set = datasets      # 8 lines: one quick batch-sized epoch
    config = TrainConfig(mode="finetune", max_epochs=2, warmup_epochs=10,
                         patience=0, seed=0)
    model = GatedCNNBGRU(binding.n_classes, image_height=128)
    result = train(model, val_set, None, config, tmp_path)
    assert all(not h.in_warmup for h in result.history)
    rows = [json.loads(line) for line in
            (tmp_path / "epochs.jsonl").read_text(
                encoding="utf-8").splitlines()[1:]]
    assert all(row["in_warmup"] is False for row in rows)


def test_training_without_validation_selects_on_train_loss(datasets, binding,
                                                           tmp_path):
    _, val_set = datasets
    config = TrainConfig(max_epochs=2, warmup_epochs=0, patience=0, seed=0)
    model = GatedCNNBGRU(binding.n_classes, image_height=128)
    result = train(model, val_set, None, config, tmp_path)
    for stats in result.history:
        assert stats.val_loss == stats.train_loss


def test_save_checkpoint_replaces_existing(tmp_path, binding):
    model = GatedCNNBGRU(binding.n_classes, image_height=128)
    path = tmp_path / "best.pt"
    save_checkpoint(model, path, extra={"epoch": 1})
    first = path.stat().st_mtime_ns
    save_checkpoint(model, path, extra={"epoch": 2})
    fresh = GatedCNNBGRU(binding.n_classes, image_height=128)
    extra = load_checkpoint(fresh, path)
    assert extra["epoch"] == 2
    assert path.stat().st_mtime_ns >= first


@pytest.mark.parametrize("bad_epochs", [0, -3])
def test_config_guards_epochs(bad_epochs):
    with pytest.raises(ValueError):
        TrainConfig(max_epochs=bad_epochs)
