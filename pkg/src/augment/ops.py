"""Differentiable application of augmentation transforms.

All kernels are linear in the pixels and operate on ``(N, C, H, W)``
float tensors; the [0, 1] clamp is applied last and is treated as the
identity in the backward pass.
"""

import math
from typing import Tuple, Union

import torch
import torch.nn.functional as F

from imaging import Image, as_pixels
from .errors import DegenerateCropError
from .sampling import TransformKind, TransformSample

TensorOrImage = Union[Image, torch.Tensor]


def rotate(x: torch.Tensor, angle: float) -> torch.Tensor:
    """Rotates about the image center by ``angle`` radians (counterclockwise
    on screen), bilinear, zero padding outside the source."""
    n, _, h, w = x.shape
    cos, sin = math.cos(angle), math.sin(angle)
    # Normalized coordinates stretch with the aspect ratio; undo it so the
    # rotation is rigid in pixel units.
    theta = torch.tensor(
        [[cos, -sin * h / w, 0.0], [sin * w / h, cos, 0.0]],
        dtype=x.dtype,
        device=x.device,
    )
    grid = F.affine_grid(theta.expand(n, 2, 3), list(x.shape), align_corners=False)
    return F.grid_sample(
        x, grid, mode="bilinear", padding_mode="zeros", align_corners=False
    )


def resize_to(x: torch.Tensor, height: int, width: int) -> torch.Tensor:
    if (height, width) == tuple(x.shape[-2:]):
        return x
    return F.interpolate(x, size=(height, width), mode="bilinear", align_corners=False)


def scaled_size(height: int, width: int, scale: float) -> Tuple[int, int]:
    return max(1, int(round(height * scale))), max(1, int(round(width * scale)))


def resize(x: torch.Tensor, scale: float) -> torch.Tensor:
    """Bilinear downscale by ``scale`` and back to the original size."""
    h, w = x.shape[-2:]
    small = resize_to(x, *scaled_size(h, w, scale))
    return resize_to(small, h, w)


def crop_window(
    height: int, width: int, area: float, aspect: float, top: float, left: float
) -> Tuple[int, int, int, int]:
    """Window ``(y0, x0, h, w)`` of ``area * H * W`` pixels with ``w/h = aspect``.

    ``top``/``left`` in [0, 1] place the window within the free room.
    """
    target = area * height * width
    win_h = min(height, int(round(math.sqrt(target / aspect))))
    win_w = min(width, int(round(math.sqrt(target * aspect))))
    if win_h < 1 or win_w < 1:
        raise DegenerateCropError(
            f"Crop of area {area:.4f} on {height}x{width} is below one pixel"
        )
    y0 = int(round(top * (height - win_h)))
    x0 = int(round(left * (width - win_w)))
    return y0, x0, win_h, win_w


def crop_resize(x: torch.Tensor, t: TransformSample) -> torch.Tensor:
    h, w = x.shape[-2:]
    y0, x0, ch, cw = crop_window(h, w, t.crop_scale, t.crop_aspect, t.crop_top, t.crop_left)
    return resize_to(x[..., y0 : y0 + ch, x0 : x0 + cw], h, w)


def gaussian_kernel(size: int, sigma: float, dtype=torch.float64) -> torch.Tensor:
    coords = torch.arange(size, dtype=dtype) - (size // 2)
    kernel = torch.exp(-(coords**2) / (2.0 * sigma**2))
    return kernel / kernel.sum()


def gaussian_blur(x: torch.Tensor, size: int, sigma: float) -> torch.Tensor:
    """Separable Gaussian blur with reflect padding."""
    if size <= 1:
        return x
    c = x.shape[1]
    pad = size // 2
    k = gaussian_kernel(size, sigma, dtype=x.dtype).to(x.device)
    padded = F.pad(x, (pad, pad, pad, pad), mode="reflect")
    out = F.conv2d(padded, k.view(1, 1, size, 1).expand(c, 1, size, 1), groups=c)
    return F.conv2d(out, k.view(1, 1, 1, size).expand(c, 1, 1, size), groups=c)


def hflip(x: torch.Tensor) -> torch.Tensor:
    return torch.flip(x, dims=[-1])


def _linear(x: torch.Tensor, t: TransformSample) -> torch.Tensor:
    if t.kind == TransformKind.ROTATION:
        y = rotate(x, t.angle)
    elif t.kind == TransformKind.BLUR:
        y = gaussian_blur(x, t.blur_size, t.blur_sigma)
    elif t.kind == TransformKind.CROP:
        y = crop_resize(x, t)
    elif t.kind == TransformKind.RESIZE:
        y = resize(x, t.resize_scale)
    else:
        y = x
    if t.hflip:
        y = hflip(y)
    return y


def linear_transform(pixels: torch.Tensor, t: TransformSample) -> torch.Tensor:
    """The transform without the final clamp, on a ``(3, H, W)`` tensor."""
    return _linear(pixels.unsqueeze(0), t).squeeze(0)


def apply_transform(
    img: TensorOrImage, t: TransformSample, straight_through: bool = False
) -> TensorOrImage:
    """Applies ``t`` and clamps to [0, 1].

    With ``straight_through`` the clamp only affects the forward values and
    gradients flow as if it were the identity. An Image input gives an Image
    back; a tensor input gives a tensor.
    """
    pixels = as_pixels(img)
    y = linear_transform(pixels, t)
    if straight_through:
        y = y + (torch.clamp(y, 0.0, 1.0) - y).detach()
    else:
        y = torch.clamp(y, 0.0, 1.0)
    if isinstance(img, Image):
        return Image(y.detach())
    return y


def transform_vjp(
    img: TensorOrImage, t: TransformSample, cotangent: torch.Tensor
) -> torch.Tensor:
    """``J^T cotangent`` for the Jacobian of ``apply_transform`` at ``img``.

    Every kernel is linear, so this is the adjoint resampling/convolution.
    The clamp is excluded.
    """
    pixels = as_pixels(img).detach().to(torch.float64)
    _, vjp = torch.autograd.functional.vjp(
        lambda x: linear_transform(x, t), pixels, cotangent.to(torch.float64)
    )
    return vjp
