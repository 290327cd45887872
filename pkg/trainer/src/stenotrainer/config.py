"""Training hyperparameters, all in one place."""

from __future__ import annotations

from dataclasses import dataclass

MODES = ("scratch", "pretrain-synthetic", "finetune")


@dataclass
class TrainConfig:
    mode: str = "scratch"
    max_epochs: int = 100
    learning_rate: float = 0.001
    batch_size: int = 8
    warmup_epochs: int = 10        # epochs exempt from early stopping
    patience: int = 10             # epochs without val improvement after warm-up
    repetitions: int = 30          # independent runs per fold (experiment grids)
    folds: int = 5
    seed: int = 0
    dropout: float = 0.2
    image_height: int = 128
    image_width: int = 1024

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "finetune":
            # fine-tuning resumes from a converged model; stopping is armed
            # immediately
            self.warmup_epochs = 0
        if self.max_epochs < 1 or self.batch_size < 1 or self.patience < 0:
            raise ValueError("max_epochs/batch_size must be >= 1, patience >= 0")
        if self.image_height % 32 or self.image_width % 8:
            raise ValueError("image height must be divisible by 32, width by 8")
