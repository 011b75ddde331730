"""Fidelity metrics on the 8-bit scale."""

import math

import torch

from .image import ImageLike, as_pixels, check_same_shape

PEAK = 255.0
# Returned by psnr() for identical inputs.
PSNR_IDENTICAL = math.inf


def pixel_mse(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """Differentiable MSE in squared 8-bit units, mean over all samples."""
    return torch.mean((PEAK * (a - b)) ** 2)


def mse(a: ImageLike, b: ImageLike) -> float:
    """Mean of ``(255 (a - b))^2`` over all ``h·w·3`` samples."""
    check_same_shape(a, b)
    with torch.no_grad():
        return float(pixel_mse(as_pixels(a), as_pixels(b)))


def psnr_from_mse(value: float) -> float:
    if value <= 0.0:
        return PSNR_IDENTICAL
    return 10.0 * math.log10(PEAK**2 / value)


def psnr(a: ImageLike, b: ImageLike) -> float:
    """PSNR in dB with peak 255; ``inf`` when the images are identical."""
    return psnr_from_mse(mse(a, b))
