from .ssim import C1, C2, WINDOW_SIZE, ssim_heatmap, ssim_map
from .constraints import apply_constraints, attenuate, clip_psnr
from .errors import PerceptualError, WindowSizeError

__all__ = [
    "C1",
    "C2",
    "WINDOW_SIZE",
    "ssim_heatmap",
    "ssim_map",
    "apply_constraints",
    "attenuate",
    "clip_psnr",
    "PerceptualError",
    "WindowSizeError",
]
