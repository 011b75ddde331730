from .image import (
    CHANNELS,
    MIN_MARKING_SIZE,
    Image,
    ImageLike,
    PixelDelta,
    as_pixels,
    check_same_shape,
    dequantize,
    quantize,
)
from .io import load_image, save_grayscale, save_image
from .metrics import PSNR_IDENTICAL, mse, pixel_mse, psnr, psnr_from_mse
from .errors import (
    ImagingError,
    ImageReadError,
    ImageWriteError,
    UnsupportedImageError,
    ShapeMismatchError,
)

__all__ = [
    "CHANNELS",
    "MIN_MARKING_SIZE",
    "Image",
    "ImageLike",
    "PixelDelta",
    "as_pixels",
    "check_same_shape",
    "dequantize",
    "quantize",
    "load_image",
    "save_image",
    "save_grayscale",
    "PSNR_IDENTICAL",
    "mse",
    "pixel_mse",
    "psnr",
    "psnr_from_mse",
    "ImagingError",
    "ImageReadError",
    "ImageWriteError",
    "UnsupportedImageError",
    "ShapeMismatchError",
]
