"""Gated-CNN-BGRU line recognizer.

Five convolutional stages with gated convolutions squeeze a (1, H, W)
grayscale line down to a (H/32, W/8) feature map; the width axis becomes
the CTC time axis (T = W/8), the rest is flattened per timestep and fed to
two bidirectional GRUs.  Batch normalization is used throughout (plain, not
the renormalizing variant).  The forward pass returns raw per-timestep
class scores of shape (batch, T, n_classes); class 0 is the blank.
"""

from __future__ import annotations

import torch
from torch import nn


class GatedConv2d(nn.Module):
    """Convolution whose output is gated by a sibling sigmoid branch."""

    def __init__(self, channels: int):
        super().__init__()
        self.conv = nn.Conv2d(channels, 2 * channels, kernel_size=3, padding=1)

    def forward(self, x):
        a, b = self.conv(x).chunk(2, dim=1)
        return a * torch.sigmoid(b)


def _stage(c_in, c_out, stride=(1, 1), kernel=3, dropout=0.0, gated=True):
    layers = [
        nn.Conv2d(c_in, c_out, kernel_size=kernel, stride=stride,
                  padding=kernel // 2),
        nn.PReLU(c_out),
        nn.BatchNorm2d(c_out),
    ]
    if gated:
        layers.append(GatedConv2d(c_out))
    if dropout:
        layers.append(nn.Dropout2d(dropout))
    return nn.Sequential(*layers)


class GatedCNNBGRU(nn.Module):
    """n_classes includes the blank (so charset size + 1)."""

    # (height, width) strides per stage; product = (32, 8)
    STRIDES = ((2, 2), (1, 1), (4, 2), (1, 1), (4, 2), (1, 1))
    CHANNELS = (16, 32, 40, 48, 56, 64)

    def __init__(self, n_classes: int, image_height: int = 128,
                 dropout: float = 0.2):
        super().__init__()
        if image_height % 32:
            raise ValueError("image height must be divisible by 32")
        if n_classes < 2:
            raise ValueError("need at least blank plus one symbol class")
        stages = []
        c_in = 1
        for k, (c_out, stride) in enumerate(zip(self.CHANNELS, self.STRIDES)):
            stages.append(_stage(c_in, c_out, stride=stride,
                                 dropout=dropout if k >= 2 else 0.0,
                                 gated=k < 5))
            c_in = c_out
        self.backbone = nn.Sequential(*stages)
        feat = self.CHANNELS[-1] * (image_height // 32)
        self.gru1 = nn.GRU(feat, 128, bidirectional=True, batch_first=True)
        self.mid = nn.Linear(256, 256)
        self.gru2 = nn.GRU(256, 128, bidirectional=True, batch_first=True)
        self.head = nn.Linear(256, n_classes)
        self.n_classes = n_classes

    def forward(self, x):
        # x: (B, 1, H, W) in [0, 1]
        f = self.backbone(x)                     # (B, C, H/32, W/8)
        f = f.permute(0, 3, 1, 2)                # (B, T, C, H')
        f = f.flatten(2)                         # (B, T, C*H')
        f, _ = self.gru1(f)
        f = torch.relu(self.mid(f))
        f, _ = self.gru2(f)
        return self.head(f)                      # (B, T, n_classes)

    def timesteps(self, width: int) -> int:
        return width // 8
