from .config import MODE_MULTI_BIT, MODE_ZERO_BIT, EmbedConfig, EmbedReport
from .losses import multi_bit_loss, total_loss, watermark_loss, zero_bit_loss
from .detector import (
    Detection,
    decode,
    decode_features,
    detect,
    detect_features,
    projections,
)
from .embedder import PSNR_SLACK, embed, psnr_ok, round_to_grid
from .errors import WatermarkError, EmbedConfigError, KeyMismatchError

__all__ = [
    "MODE_MULTI_BIT",
    "MODE_ZERO_BIT",
    "EmbedConfig",
    "EmbedReport",
    "multi_bit_loss",
    "total_loss",
    "watermark_loss",
    "zero_bit_loss",
    "Detection",
    "decode",
    "decode_features",
    "detect",
    "detect_features",
    "projections",
    "PSNR_SLACK",
    "embed",
    "psnr_ok",
    "round_to_grid",
    "WatermarkError",
    "EmbedConfigError",
    "KeyMismatchError",
]
