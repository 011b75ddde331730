"""Projection of a pixel delta onto the admissible set of the original image."""

import math

import torch

from config.logger import get_logger
from imaging import ImageLike, PixelDelta, as_pixels, check_same_shape
from imaging.metrics import PEAK
from .errors import PerceptualError
from .ssim import ssim_heatmap

logger = get_logger(__name__)


def attenuate(delta: PixelDelta, o: ImageLike) -> PixelDelta:
    """Scales ``delta`` pixel-wise by the SSIM heatmap normalized to [0, 1].

    The heatmap compares the current image ``o + delta`` with ``o``.
    """
    orig = as_pixels(o)
    current = torch.clamp(orig + delta, 0.0, 1.0)
    heatmap = ssim_heatmap(current, orig)
    peak = heatmap.max()
    if peak <= 0:
        return torch.zeros_like(delta)
    return delta * (heatmap / peak).unsqueeze(0)


def clip_psnr(delta: PixelDelta, target_psnr: float) -> PixelDelta:
    """Rescales ``delta`` so that its PSNR is at least ``target_psnr`` dB."""
    if not math.isfinite(target_psnr):
        raise PerceptualError(f"target_psnr must be finite, got {target_psnr}")
    current_mse = float(torch.mean((PEAK * delta) ** 2))
    if current_mse == 0.0:
        return delta
    max_mse = PEAK**2 / 10 ** (target_psnr / 10)
    if current_mse <= max_mse:
        return delta
    return delta * math.sqrt(max_mse / current_mse)


def apply_constraints(delta: PixelDelta, o: ImageLike, target_psnr: float) -> PixelDelta:
    """Projects ``delta`` onto the admissible set around ``o``.

    SSIM heatmap attenuation, then a minimum-PSNR rescale, then the
    resulting image ``o + delta`` is clamped to [0, 1]. Returns the delta
    of the clamped image.
    """
    check_same_shape(delta, o)
    orig = as_pixels(o).detach()
    with torch.no_grad():
        d = delta.detach().to(torch.float64)
        if not torch.any(d != 0):
            return torch.zeros_like(d)
        d = attenuate(d, orig)
        d = clip_psnr(d, target_psnr)
        clamped = torch.clamp(orig + d, 0.0, 1.0)
        return clamped - orig
