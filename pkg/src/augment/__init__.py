from .sampling import (
    ALL_KINDS,
    BLUR_SIZES,
    TransformKind,
    TransformSample,
    blur_sigma,
    sample_transform,
)
from .ops import (
    apply_transform,
    crop_window,
    gaussian_blur,
    hflip,
    linear_transform,
    resize,
    resize_to,
    rotate,
    scaled_size,
    transform_vjp,
)
from .errors import AugmentError, DegenerateCropError, InvalidTransformError

__all__ = [
    "ALL_KINDS",
    "BLUR_SIZES",
    "TransformKind",
    "TransformSample",
    "blur_sigma",
    "sample_transform",
    "apply_transform",
    "crop_window",
    "gaussian_blur",
    "hflip",
    "linear_transform",
    "resize",
    "resize_to",
    "rotate",
    "scaled_size",
    "transform_vjp",
    "AugmentError",
    "DegenerateCropError",
    "InvalidTransformError",
]
