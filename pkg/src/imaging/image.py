"""In-memory image representation.

Images are stored planar, as a ``(3, H, W)`` float64 tensor with samples in
[0, 1]. Files carry 8-bit samples; ``v / 255`` maps them in and
``quantize`` maps them back out.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import torch

from .errors import ImagingError, ShapeMismatchError

CHANNELS = 3
# Side of the SSIM window; images smaller than this cannot be marked.
MIN_MARKING_SIZE = 17

# A PixelDelta is a plain tensor shaped like its base image, unbounded sign.
PixelDelta = torch.Tensor


def quantize(pixels: torch.Tensor) -> torch.Tensor:
    """Round [0, 1] samples to the 8-bit grid, returned as integers 0..255.

    Values are clamped first, so round-half-away-from-zero reduces to
    ``floor(255 v + 0.5)``.
    """
    scaled = torch.clamp(pixels.to(torch.float64) * 255.0, 0.0, 255.0)
    return torch.floor(scaled + 0.5)


def dequantize(levels: torch.Tensor) -> torch.Tensor:
    return levels.to(torch.float64) / 255.0


@dataclass(frozen=True)
class Image:
    """An RGB image with samples in [0, 1], immutable after construction."""

    pixels: torch.Tensor

    def __post_init__(self):
        px = torch.as_tensor(self.pixels, dtype=torch.float64).detach().clone()
        if px.ndim != 3 or px.shape[0] != CHANNELS:
            raise ImagingError(
                f"Image tensor must have shape (3, H, W), got {tuple(px.shape)}"
            )
        if px.shape[1] < 1 or px.shape[2] < 1:
            raise ImagingError("Image must have at least one pixel")
        if not torch.isfinite(px).all():
            raise ImagingError("Image contains non-finite samples")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ImagingError("Image samples must lie in [0, 1]")
        px.requires_grad_(False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def clamped(cls, pixels: torch.Tensor) -> "Image":
        """Builds an image after clamping arbitrary samples into [0, 1]."""
        return cls(torch.clamp(pixels.detach().to(torch.float64), 0.0, 1.0))

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Image":
        """Builds an image from an ``H×W``, ``H×W×1`` or ``H×W×3`` array.

        ``uint8`` arrays are scaled by 1/255, float arrays are taken as-is.
        Single-channel input is replicated to three channels.
        """
        arr = np.asarray(array)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, CHANNELS):
            raise ImagingError(f"Unsupported array shape {arr.shape}")
        if arr.shape[2] == 1:
            arr = np.repeat(arr, CHANNELS, axis=2)
        if arr.dtype == np.uint8:
            data = arr.astype(np.float64) / 255.0
        else:
            data = arr.astype(np.float64)
        return cls(torch.from_numpy(np.ascontiguousarray(data.transpose(2, 0, 1))))

    @property
    def height(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[2])

    @property
    def shape(self) -> tuple:
        return tuple(self.pixels.shape)

    def to_array(self) -> np.ndarray:
        """Returns an ``H×W×3`` float64 copy."""
        return self.pixels.permute(1, 2, 0).numpy().copy()

    def to_uint8(self) -> np.ndarray:
        """Returns the ``H×W×3`` 8-bit quantization used when saving."""
        levels = quantize(self.pixels).permute(1, 2, 0).numpy()
        return levels.astype(np.uint8)

    def check_marking_size(self) -> None:
        if self.height < MIN_MARKING_SIZE or self.width < MIN_MARKING_SIZE:
            raise ImagingError(
                f"Image {self.height}x{self.width} is smaller than the "
                f"{MIN_MARKING_SIZE}x{MIN_MARKING_SIZE} minimum for marking"
            )


ImageLike = Union[Image, torch.Tensor]


def as_pixels(img: ImageLike) -> torch.Tensor:
    """Pixel tensor of an Image, or the tensor itself."""
    if isinstance(img, Image):
        return img.pixels
    return img


def check_same_shape(a: ImageLike, b: ImageLike) -> None:
    sa, sb = tuple(as_pixels(a).shape), tuple(as_pixels(b).shape)
    if sa != sb:
        raise ShapeMismatchError(f"Shape mismatch: {sa} vs {sb}")
