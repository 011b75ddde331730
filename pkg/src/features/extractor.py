"""A small deterministic convnet standing in for a large pretrained backbone."""

import json
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import torch
from pydantic import BaseModel, Field, model_validator
from torch import nn

from config.logger import get_logger
from keys.rng import make_rng
from .container import read_container, write_container
from .errors import ContainerFormatError, ExtractorSpecError, InputSizeError
from .interface import AbstractFeatureExtractor

logger = get_logger(__name__)

WEIGHTS_KIND = "extractor"


class LayerKind(str, Enum):
    CONV = "conv"
    RELU = "relu"
    AVGPOOL = "avgpool"
    GAP = "gap"


class LayerSpec(BaseModel):
    kind: LayerKind
    out_channels: Optional[int] = Field(default=None, gt=0)
    kernel_size: int = Field(default=3, gt=0)
    stride: int = Field(default=1, gt=0)
    padding: int = Field(default=0, ge=0)


class ExtractorSpec(BaseModel):
    """Layer chain of the extractor; must end with global average pooling."""

    in_channels: int = 3
    layers: List[LayerSpec]

    @model_validator(mode="after")
    def check_chain(self) -> "ExtractorSpec":
        if not self.layers:
            raise ExtractorSpecError("Extractor spec has no layers")
        if self.layers[-1].kind != LayerKind.GAP:
            raise ExtractorSpecError("The last layer must be global average pooling")
        if any(layer.kind == LayerKind.GAP for layer in self.layers[:-1]):
            raise ExtractorSpecError("Global average pooling is only allowed last")
        for i, layer in enumerate(self.layers):
            if layer.kind == LayerKind.CONV and layer.out_channels is None:
                raise ExtractorSpecError(f"Conv layer {i} needs out_channels")
        if not any(layer.kind == LayerKind.CONV for layer in self.layers):
            raise ExtractorSpecError("Extractor spec has no conv layer")
        return self

    @classmethod
    def desk(
        cls, widths: Sequence[int] = (16, 32, 64, 128), kernel_size: int = 3, stride: int = 2
    ) -> "ExtractorSpec":
        """Conv blocks (conv + ReLU) of the given widths, then global pooling."""
        layers: List[LayerSpec] = []
        for width in widths:
            layers.append(
                LayerSpec(
                    kind=LayerKind.CONV,
                    out_channels=width,
                    kernel_size=kernel_size,
                    stride=stride,
                    padding=kernel_size // 2,
                )
            )
            layers.append(LayerSpec(kind=LayerKind.RELU))
        layers.append(LayerSpec(kind=LayerKind.GAP))
        return cls(layers=layers)

    @property
    def raw_dim(self) -> int:
        channels = self.in_channels
        for layer in self.layers:
            if layer.kind == LayerKind.CONV:
                channels = layer.out_channels
        return channels

    @property
    def receptive_field(self) -> int:
        """Side of the input region seen by one unit before global pooling."""
        field, jump = 1, 1
        for layer in self.layers:
            if layer.kind in (LayerKind.CONV, LayerKind.AVGPOOL):
                field += (layer.kernel_size - 1) * jump
                jump *= layer.stride
        return field

    @property
    def min_input_size(self) -> int:
        """Smallest input side that still leaves a 1x1 map before global pooling."""
        side = 1
        for layer in reversed(self.layers):
            if layer.kind in (LayerKind.CONV, LayerKind.AVGPOOL):
                side = max(1, (side - 1) * layer.stride + layer.kernel_size - 2 * layer.padding)
        return side


def build_module(spec: ExtractorSpec) -> nn.Sequential:
    modules: List[nn.Module] = []
    channels = spec.in_channels
    for layer in spec.layers:
        if layer.kind == LayerKind.CONV:
            modules.append(
                nn.Conv2d(
                    channels,
                    layer.out_channels,
                    kernel_size=layer.kernel_size,
                    stride=layer.stride,
                    padding=layer.padding,
                )
            )
            channels = layer.out_channels
        elif layer.kind == LayerKind.RELU:
            modules.append(nn.ReLU())
        elif layer.kind == LayerKind.AVGPOOL:
            modules.append(
                nn.AvgPool2d(layer.kernel_size, stride=layer.stride, padding=layer.padding)
            )
        else:
            modules.append(nn.AdaptiveAvgPool2d(1))
            modules.append(nn.Flatten())
    return nn.Sequential(*modules)


class ConvExtractor(AbstractFeatureExtractor):
    """Convnet extractor evaluated in float64, weights frozen."""

    def __init__(self, spec: ExtractorSpec, module: nn.Sequential, source: str):
        self.spec = spec
        self.source = source
        self.module = module.to(torch.float64).eval()
        for param in self.module.parameters():
            param.requires_grad_(False)

    def get_raw_dimension(self) -> int:
        return self.spec.raw_dim

    def get_min_input_size(self) -> int:
        return self.spec.min_input_size

    def _check_input(self, batch: torch.Tensor) -> None:
        if batch.ndim != 4 or batch.shape[1] != self.spec.in_channels:
            raise InputSizeError(
                f"Expected (N, {self.spec.in_channels}, H, W) input, got {tuple(batch.shape)}"
            )
        h, w = batch.shape[-2:]
        minimum = self.get_min_input_size()
        if h < minimum or w < minimum:
            raise InputSizeError(
                f"Image {h}x{w} is smaller than the extractor minimum {minimum}x{minimum}"
            )

    def forward(self, pixels: torch.Tensor) -> torch.Tensor:
        single = pixels.ndim == 3
        batch = pixels.unsqueeze(0) if single else pixels
        self._check_input(batch)
        out = self.module(batch.to(torch.float64))
        return out[0] if single else out

    def __call__(self, pixels: torch.Tensor) -> torch.Tensor:
        return self.forward(pixels)

    def input_gradient(self, pixels: torch.Tensor, cotangent: torch.Tensor) -> torch.Tensor:
        x = pixels.detach().to(torch.float64).requires_grad_(True)
        with torch.enable_grad():
            out = self.forward(x)
            (grad,) = torch.autograd.grad(out, x, grad_outputs=cotangent.to(out.dtype))
        return grad

    def state_tensors(self) -> dict:
        return {
            name: tensor.detach().to(torch.float32)
            for name, tensor in self.module.state_dict().items()
        }


def build_extractor(spec: ExtractorSpec, seed: int) -> ConvExtractor:
    """Extractor with He-scaled weights drawn from a Philox stream.

    Weights are drawn in float32 so that a saved weights file reproduces
    them exactly.
    """
    rng = make_rng(seed)
    module = build_module(spec)
    with torch.no_grad():
        for layer in module:
            if isinstance(layer, nn.Conv2d):
                fan_in = layer.in_channels * layer.kernel_size[0] * layer.kernel_size[1]
                weight = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=tuple(layer.weight.shape))
                bound = 1.0 / np.sqrt(fan_in)
                bias = rng.uniform(-bound, bound, size=tuple(layer.bias.shape))
                layer.weight.copy_(torch.from_numpy(weight.astype(np.float32)))
                layer.bias.copy_(torch.from_numpy(bias.astype(np.float32)))
    logger.info(
        f"Built seeded extractor (seed={seed}, D_raw={spec.raw_dim}, "
        f"receptive field={spec.receptive_field})"
    )
    return ConvExtractor(spec, module, source=f"seed:{seed}")


def save_weights(extractor: ConvExtractor, path: Union[str, Path]) -> None:
    write_container(
        path,
        extractor.state_tensors(),
        metadata={"kind": WEIGHTS_KIND, "spec": extractor.spec.model_dump_json()},
    )
    logger.info(f"Saved extractor weights to {path}")


def load_weights(path: Union[str, Path]) -> ConvExtractor:
    """Rebuilds an extractor (architecture and weights) from an LMWT file."""
    container = read_container(path)
    if container.metadata.get("kind") != WEIGHTS_KIND:
        raise ContainerFormatError(f"{path} is not an extractor weights file")
    try:
        spec = ExtractorSpec.model_validate(json.loads(container.meta("spec")))
    except (ValueError, TypeError) as e:
        raise ContainerFormatError(f"Invalid extractor spec in {path}: {e}") from e

    module = build_module(spec)
    expected = module.state_dict()
    if set(expected) != set(container.tensors):
        raise ContainerFormatError(
            f"Weights in {path} do not match the stored architecture"
        )
    state = {}
    for name, tensor in expected.items():
        array = container.tensors[name]
        if tuple(array.shape) != tuple(tensor.shape):
            raise ContainerFormatError(
                f"Tensor '{name}' has shape {array.shape}, expected {tuple(tensor.shape)}"
            )
        state[name] = torch.from_numpy(array.astype(np.float32))
    module.load_state_dict(state)
    logger.info(f"Loaded extractor weights from {path}")
    return ConvExtractor(spec, module, source=f"file:{path}")
