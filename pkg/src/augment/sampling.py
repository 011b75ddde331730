"""Random transformation parameters for marking-time augmentation."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InvalidTransformError


class TransformKind(str, Enum):
    IDENTITY = "identity"
    ROTATION = "rotation"
    BLUR = "blur"
    CROP = "crop"
    RESIZE = "resize"


ALL_KINDS = tuple(TransformKind)

MIN_SCALE = 0.2
MAX_SCALE = 1.0
MIN_ASPECT = 3.0 / 4.0
MAX_ASPECT = 4.0 / 3.0
BLUR_SIZES = (1, 3, 5, 7, 9, 11, 13, 15)
VON_MISES_KAPPA = 1.0


def blur_sigma(size: int) -> float:
    return 0.15 * size + 0.35


@dataclass(frozen=True)
class TransformSample:
    """One draw from the augmentation distribution.

    Every parameter is drawn on each sample; only the ones belonging to
    ``kind`` are used. ``hflip`` is applied on top of ``kind``. Crop offsets
    are fractions of the free room along each axis.
    """

    kind: TransformKind = TransformKind.IDENTITY
    angle: float = 0.0
    crop_scale: float = 1.0
    crop_aspect: float = 1.0
    crop_top: float = 0.5
    crop_left: float = 0.5
    resize_scale: float = 1.0
    blur_size: int = 1
    hflip: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", TransformKind(self.kind))
        if not (-math.pi / 2 <= self.angle <= math.pi / 2):
            raise InvalidTransformError(f"Rotation angle {self.angle} outside [-pi/2, pi/2]")
        if not (MIN_SCALE <= self.crop_scale <= MAX_SCALE):
            raise InvalidTransformError(f"Crop scale {self.crop_scale} outside [0.2, 1]")
        if not (MIN_ASPECT <= self.crop_aspect <= MAX_ASPECT):
            raise InvalidTransformError(f"Crop aspect {self.crop_aspect} outside [3/4, 4/3]")
        if not (0.0 <= self.crop_top <= 1.0 and 0.0 <= self.crop_left <= 1.0):
            raise InvalidTransformError("Crop offsets must lie in [0, 1]")
        if not (MIN_SCALE <= self.resize_scale <= MAX_SCALE):
            raise InvalidTransformError(f"Resize scale {self.resize_scale} outside [0.2, 1]")
        if self.blur_size not in BLUR_SIZES:
            raise InvalidTransformError(f"Blur kernel size {self.blur_size} must be odd in [1, 15]")

    @property
    def blur_sigma(self) -> float:
        return blur_sigma(self.blur_size)

    def describe(self) -> str:
        params = {
            TransformKind.IDENTITY: "",
            TransformKind.ROTATION: f"angle={math.degrees(self.angle):.1f}deg",
            TransformKind.BLUR: f"b={self.blur_size}",
            TransformKind.CROP: f"p={self.crop_scale:.2f},r={self.crop_aspect:.2f}",
            TransformKind.RESIZE: f"s={self.resize_scale:.2f}",
        }[self.kind]
        flip = ",hflip" if self.hflip else ""
        return f"{self.kind.value}({params}{flip})"


def sample_transform(
    rng: np.random.Generator,
    kinds: Sequence[TransformKind] = ALL_KINDS,
    max_rotation: float = math.pi / 2,
    flips: bool = True,
) -> TransformSample:
    """Draws a transform.

    The kind is uniform over ``kinds``; the rotation angle is Von Mises
    (mu=0, kappa=1) divided by 2; crop and resize scales are uniform in
    [0.2, 1]; the crop aspect ratio is uniform in [3/4, 4/3]; the blur kernel
    size is uniform over the odd numbers 1..15; a horizontal flip is added
    with probability 0.5 when ``flips`` is set. Angles are clipped to
    ``[-max_rotation, max_rotation]``. The same number of draws is consumed
    whatever the options, so a seed gives the same sequence of kinds.
    """
    if not kinds:
        raise InvalidTransformError("At least one transform kind is required")
    kinds = tuple(TransformKind(k) for k in kinds)
    kind = kinds[int(rng.integers(len(kinds)))]
    # numpy draws Von Mises with the Best-Fisher rejection sampler; support is [-pi, pi].
    angle = float(rng.vonmises(0.0, VON_MISES_KAPPA)) / 2.0
    if not (0.0 <= max_rotation <= math.pi / 2):
        raise InvalidTransformError(f"max_rotation must lie in [0, pi/2], got {max_rotation}")
    angle = min(max(angle, -max_rotation), max_rotation)
    return TransformSample(
        kind=kind,
        angle=angle,
        crop_scale=float(rng.uniform(MIN_SCALE, MAX_SCALE)),
        crop_aspect=float(rng.uniform(MIN_ASPECT, MAX_ASPECT)),
        crop_top=float(rng.uniform(0.0, 1.0)),
        crop_left=float(rng.uniform(0.0, 1.0)),
        resize_scale=float(rng.uniform(MIN_SCALE, MAX_SCALE)),
        blur_size=int(BLUR_SIZES[int(rng.integers(len(BLUR_SIZES)))]),
        hflip=bool(rng.random() < 0.5) and flips,
    )
