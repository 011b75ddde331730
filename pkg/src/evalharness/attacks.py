"""Evaluation-time attacks.

Unlike marking-time augmentations these act on the image as a whole and may
change its size (crop and resize keep the attacked resolution) or be
non-differentiable (JPEG). None of them touch key material.
"""

import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
import torch
from PIL import Image as PILImage

from augment import gaussian_blur, resize_to, rotate, scaled_size
from imaging import Image
from .errors import InvalidAttackError

# ITU-R BT.601 luma weights, used for the mean gray of the contrast attack.
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


class AttackKind(str, Enum):
    IDENTITY = "identity"
    ROTATION = "rotation"
    CROP = "crop"
    RESIZE = "resize"
    BLUR = "blur"
    JPEG = "jpeg"
    BRIGHTNESS = "brightness"
    CONTRAST = "contrast"
    HUE = "hue"


@dataclass(frozen=True)
class AttackSpec:
    """An attack and its parameter.

    Units: rotation in degrees; crop as the kept area fraction p; resize as
    the side scale s; blur as the Gaussian sigma in pixels; jpeg as the
    quality factor Q; brightness and contrast as factors; hue as a fraction
    of a full turn.
    """

    kind: AttackKind
    param: float = 0.0

    def __post_init__(self):
        kind = AttackKind(self.kind)
        object.__setattr__(self, "kind", kind)
        p = float(self.param)
        object.__setattr__(self, "param", p)
        if not math.isfinite(p):
            raise InvalidAttackError(f"{kind.value}: parameter must be finite")
        if kind in (AttackKind.CROP, AttackKind.RESIZE) and not (0.0 < p <= 1.0):
            raise InvalidAttackError(f"{kind.value}: parameter must lie in (0, 1], got {p}")
        if kind == AttackKind.JPEG and not (1 <= p <= 100 and p == int(p)):
            raise InvalidAttackError(f"jpeg: quality must be an integer in [1, 100], got {p}")
        if kind == AttackKind.BLUR and p <= 0.0:
            raise InvalidAttackError(f"blur: sigma must be positive, got {p}")
        if kind in (AttackKind.BRIGHTNESS, AttackKind.CONTRAST) and p < 0.0:
            raise InvalidAttackError(f"{kind.value}: factor must be non-negative, got {p}")
        if kind == AttackKind.HUE and not (-0.5 <= p <= 0.5):
            raise InvalidAttackError(f"hue: shift must lie in [-0.5, 0.5], got {p}")
        if kind == AttackKind.ROTATION and abs(p) > 180.0:
            raise InvalidAttackError(f"rotation: angle must lie in [-180, 180], got {p}")

    @classmethod
    def parse(cls, text: str) -> "AttackSpec":
        """Parses ``kind`` or ``kind:param``, e.g. ``jpeg:50``."""
        name, _, value = text.strip().partition(":")
        try:
            kind = AttackKind(name.strip().lower())
        except ValueError as e:
            raise InvalidAttackError(f"Unknown attack '{name}'") from e
        if not value:
            if kind != AttackKind.IDENTITY:
                raise InvalidAttackError(f"Attack '{name}' needs a parameter")
            return cls(kind)
        try:
            param = float(value)
        except ValueError as e:
            raise InvalidAttackError(f"Invalid parameter in '{text}'") from e
        return cls(kind, param)

    @property
    def label(self) -> str:
        return self.kind.value

    @property
    def param_text(self) -> str:
        if self.kind == AttackKind.IDENTITY:
            return ""
        return f"{self.param:g}"

    def __str__(self) -> str:
        if self.kind == AttackKind.IDENTITY:
            return self.kind.value
        return f"{self.kind.value}:{self.param_text}"


# Attack grid used by ``eval`` when none is given.
DEFAULT_ATTACKS: Tuple[AttackSpec, ...] = (
    AttackSpec(AttackKind.IDENTITY),
    AttackSpec(AttackKind.ROTATION, 25),
    AttackSpec(AttackKind.ROTATION, 90),
    AttackSpec(AttackKind.CROP, 0.5),
    AttackSpec(AttackKind.CROP, 0.1),
    AttackSpec(AttackKind.RESIZE, 0.7),
    AttackSpec(AttackKind.RESIZE, 0.5),
    AttackSpec(AttackKind.BLUR, 2.0),
    AttackSpec(AttackKind.JPEG, 50),
    AttackSpec(AttackKind.BRIGHTNESS, 1.5),
    AttackSpec(AttackKind.BRIGHTNESS, 2.0),
    AttackSpec(AttackKind.CONTRAST, 1.5),
    AttackSpec(AttackKind.CONTRAST, 2.0),
    AttackSpec(AttackKind.HUE, -0.1),
    AttackSpec(AttackKind.HUE, 0.25),
)


def center_crop(pixels: torch.Tensor, area: float) -> torch.Tensor:
    """Centered window keeping ``area`` of the pixels and the aspect ratio."""
    _, h, w = pixels.shape
    side = math.sqrt(area)
    ch, cw = max(1, int(round(h * side))), max(1, int(round(w * side)))
    y0, x0 = (h - ch) // 2, (w - cw) // 2
    return pixels[:, y0 : y0 + ch, x0 : x0 + cw]


def blur_size(sigma: float, height: int, width: int) -> int:
    """Odd kernel covering 3 sigma, capped so reflect padding stays valid."""
    size = 2 * math.ceil(3.0 * sigma) + 1
    cap = 2 * min(height, width) - 1
    return min(size, cap if cap % 2 == 1 else cap - 1)


def jpeg_roundtrip(img: Image, quality: int) -> Image:
    buffer = io.BytesIO()
    PILImage.fromarray(img.to_uint8()).save(buffer, format="JPEG", quality=int(quality))
    buffer.seek(0)
    with PILImage.open(buffer) as decoded:
        return Image.from_array(np.asarray(decoded.convert("RGB")))


def rgb_to_hsv(pixels: torch.Tensor) -> torch.Tensor:
    r, g, b = pixels[0], pixels[1], pixels[2]
    maxc, _ = pixels.max(dim=0)
    minc, _ = pixels.min(dim=0)
    span = maxc - minc
    safe_span = torch.where(span > 0, span, torch.ones_like(span))
    rc, gc, bc = (maxc - r) / safe_span, (maxc - g) / safe_span, (maxc - b) / safe_span
    hue = torch.where(
        maxc == r, bc - gc, torch.where(maxc == g, 2.0 + rc - bc, 4.0 + gc - rc)
    )
    hue = torch.where(span > 0, (hue / 6.0) % 1.0, torch.zeros_like(hue))
    safe_max = torch.where(maxc > 0, maxc, torch.ones_like(maxc))
    sat = torch.where(maxc > 0, span / safe_max, torch.zeros_like(maxc))
    return torch.stack([hue, sat, maxc])


def hsv_to_rgb(hsv: torch.Tensor) -> torch.Tensor:
    h, s, v = hsv[0], hsv[1], hsv[2]
    i = torch.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.long() % 6
    choices = (
        (v, t, p),
        (q, v, p),
        (p, v, t),
        (p, q, v),
        (t, p, v),
        (v, p, q),
    )
    out = torch.zeros_like(hsv)
    for sector, (rr, gg, bb) in enumerate(choices):
        mask = i == sector
        out[0] = torch.where(mask, rr, out[0])
        out[1] = torch.where(mask, gg, out[1])
        out[2] = torch.where(mask, bb, out[2])
    return out


def shift_hue(pixels: torch.Tensor, shift: float) -> torch.Tensor:
    hsv = rgb_to_hsv(pixels)
    hsv[0] = (hsv[0] + shift) % 1.0
    return hsv_to_rgb(hsv)


def adjust_contrast(pixels: torch.Tensor, factor: float) -> torch.Tensor:
    weights = torch.tensor(GRAY_WEIGHTS, dtype=pixels.dtype).view(3, 1, 1)
    mean_gray = (pixels * weights).sum(dim=0).mean()
    return mean_gray + factor * (pixels - mean_gray)


def attack(img: Image, spec: AttackSpec) -> Image:
    """Applies ``spec`` to ``img`` and returns a new image in [0, 1]."""
    kind, p = spec.kind, spec.param
    x = img.pixels
    if kind == AttackKind.IDENTITY:
        return img
    if kind == AttackKind.JPEG:
        return jpeg_roundtrip(img, int(p))
    if kind == AttackKind.ROTATION:
        y = rotate(x.unsqueeze(0), math.radians(p)).squeeze(0)
    elif kind == AttackKind.CROP:
        y = center_crop(x, p)
    elif kind == AttackKind.RESIZE:
        y = resize_to(x.unsqueeze(0), *scaled_size(img.height, img.width, p)).squeeze(0)
    elif kind == AttackKind.BLUR:
        size = blur_size(p, img.height, img.width)
        y = gaussian_blur(x.unsqueeze(0), size, p).squeeze(0)
    elif kind == AttackKind.BRIGHTNESS:
        y = p * x
    elif kind == AttackKind.CONTRAST:
        y = adjust_contrast(x, p)
    elif kind == AttackKind.HUE:
        y = shift_hue(x, p)
    else:
        raise InvalidAttackError(f"Unsupported attack {kind}")
    return Image.clamped(y)
