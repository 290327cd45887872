"""Architecture contract: (B, W/8, C) logits for any width, trainable end to end."""

import pytest
import torch

from stenotrainer.model import GatedCNNBGRU


@pytest.mark.parametrize("width", [1024, 256, 64])
def test_output_shape_is_timesteps_by_classes(width):
    model = GatedCNNBGRU(n_classes=31, image_height=128)
    x = torch.zeros(2, 1, 128, width)
    y = model(x)
    assert y.shape == (2, width // 8, 31)
    assert model.timesteps(width) == width // 8


def test_class_count_includes_blank(binding):
    model = GatedCNNBGRU(binding.n_classes, image_height=128)
    y = model(torch.zeros(1, 1, 128, 256))
    assert y.shape[-1] == len(binding.symbols) + 1


def test_height_must_be_divisible_by_32():
    with pytest.raises(ValueError):
        GatedCNNBGRU(n_classes=10, image_height=100)


def test_needs_at_least_two_classes():
    with pytest.raises(ValueError):
        GatedCNNBGRU(n_classes=1)


def test_all_parameters_receive_gradients():
    torch.manual_seed(0)
    model = GatedCNNBGRU(n_classes=12, image_height=128)
    model.eval()   # dropout off so no channel is zeroed by chance
    x = torch.rand(2, 1, 128, 128)
    model(x).sum().backward()
    missing = [name for name, p in model.named_parameters()
               if p.grad is None or not p.grad.abs().sum() > 0]
    assert not missing, f"dead parameters: {missing}"


def test_eval_forward_is_deterministic():
    torch.manual_seed(1)
    model = GatedCNNBGRU(n_classes=12, image_height=128)
    model.eval()
    x = torch.rand(1, 1, 128, 256)
    with torch.no_grad():
        a = model(x)
        b = model(x)
    assert torch.equal(a, b)


def test_gating_halves_channels():
    from stenotrainer.model import GatedConv2d
    gate = GatedConv2d(8)
    out = gate(torch.rand(1, 8, 16, 16))
    assert out.shape == (1, 8, 16, 16)
