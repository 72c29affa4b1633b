"""Pretrained vision backbones adapted to a single-logit binary head."""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn
from torchvision.models import resnet34
from torchvision.models.vision_transformer import VisionTransformer

MODEL_NAMES = ("resnet34", "vit_small")
CHANNEL_NORMALIZATIONS = ("none", "imagenet")

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

_MEAN = torch.tensor(IMAGENET_MEAN).view(3, 1, 1)
_STD = torch.tensor(IMAGENET_STD).view(3, 1, 1)


class WeightLoadError(RuntimeError):
    """Pretrained weights could not be obtained."""


def _vit_small() -> VisionTransformer:
    # standard ViT-S/16 shape; torchvision hosts no weights for it
    return VisionTransformer(
        image_size=224, patch_size=16, num_layers=12, num_heads=6,
        hidden_dim=384, mlp_dim=1536, num_classes=1,
    )


def _load_file_weights(model: nn.Module, path: str | Path) -> None:
    """Load every tensor whose name and shape match; ignore the rest."""
    try:
        state = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise WeightLoadError(f"could not read weights file {path}: {exc}") from exc
    own = model.state_dict()
    usable = {k: v for k, v in state.items()
              if k in own and tuple(own[k].shape) == tuple(v.shape)}
    if not usable:
        raise WeightLoadError(f"weights file {path} holds no compatible tensors")
    model.load_state_dict(usable, strict=False)


def build_model(name: str, pretrained: bool = True,
                weights_path: str | Path | None = None) -> nn.Module:
    """A 1-logit binary classifier with every layer trainable.

    pretrained=True takes weights from weights_path when given and from
    the torchvision download otherwise; vit_small has no hosted weights,
    so its pretrained form requires weights_path.
    """
    if name not in MODEL_NAMES:
        raise ValueError(f"model must be one of {MODEL_NAMES}, got {name!r}")
    if name == "resnet34":
        if pretrained and weights_path is None:
            try:
                from torchvision.models import ResNet34_Weights
                model = resnet34(weights=ResNet34_Weights.IMAGENET1K_V1)
            except Exception as exc:
                raise WeightLoadError(
                    f"could not obtain pretrained weights for resnet34: {exc}"
                ) from exc
        else:
            model = resnet34(weights=None)
        model.fc = nn.Linear(model.fc.in_features, 1)
        if pretrained and weights_path is not None:
            _load_file_weights(model, weights_path)
        return model
    model = _vit_small()
    if pretrained:
        if weights_path is None:
            raise WeightLoadError(
                "no hosted pretrained weights for vit_small; pass weights_path"
            )
        _load_file_weights(model, weights_path)
    return model


def normalize_channels(frame: torch.Tensor, mode: str) -> torch.Tensor:
    """Rescale a [0, 1] CHW frame with the chosen per-channel statistics."""
    if mode == "none":
        return frame
    if mode == "imagenet":
        return (frame - _MEAN) / _STD
    raise ValueError(
        f"channel normalization must be one of {CHANNEL_NORMALIZATIONS}, got {mode!r}"
    )
