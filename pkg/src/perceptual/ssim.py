"""Local SSIM heatmap over a sliding uniform window."""

import torch
import torch.nn.functional as F

from imaging import ImageLike, as_pixels, check_same_shape
from .errors import WindowSizeError

WINDOW_SIZE = 17
C1 = 0.01**2
C2 = 0.03**2


def _local_mean(x: torch.Tensor, window: int) -> torch.Tensor:
    # 'valid' sliding mean; x is (N, C, H, W)
    return F.avg_pool2d(x, kernel_size=window, stride=1, padding=0)


def ssim_map(a: torch.Tensor, b: torch.Tensor, window: int = WINDOW_SIZE) -> torch.Tensor:
    """Per-channel SSIM over the valid interior, shape ``(C, H-w+1, W-w+1)``."""
    if a.shape[-2] < window or a.shape[-1] < window:
        raise WindowSizeError(
            f"Image {a.shape[-2]}x{a.shape[-1]} is smaller than the "
            f"{window}x{window} SSIM window"
        )
    x = a.unsqueeze(0)
    y = b.unsqueeze(0)

    mu_x = _local_mean(x, window)
    mu_y = _local_mean(y, window)
    var_x = _local_mean(x * x, window) - mu_x * mu_x
    var_y = _local_mean(y * y, window) - mu_y * mu_y
    cov_xy = _local_mean(x * y, window) - mu_x * mu_y

    num = (2 * mu_x * mu_y + C1) * (2 * cov_xy + C2)
    den = (mu_x * mu_x + mu_y * mu_y + C1) * (var_x + var_y + C2)
    return (num / den).squeeze(0)


def ssim_heatmap(i: ImageLike, o: ImageLike, window: int = WINDOW_SIZE) -> torch.Tensor:
    """Channel-summed local SSIM between ``i`` and ``o``, clamped at zero.

    The valid interior is replicated outward so the map has the full
    ``H×W`` resolution of the inputs.
    """
    check_same_shape(i, o)
    a = as_pixels(i).detach().to(torch.float64)
    b = as_pixels(o).detach().to(torch.float64)

    per_channel = ssim_map(a, b, window)
    summed = per_channel.sum(dim=0, keepdim=True).clamp(min=0.0)

    # Interior is (H-w+1) wide; pad (w-1) split as evenly as possible.
    total = window - 1
    before, after = total // 2, total - total // 2
    full = F.pad(summed.unsqueeze(0), (before, after, before, after), mode="replicate")
    return full[0, 0]
