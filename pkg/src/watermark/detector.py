"""Detection and decoding decisions on extracted features."""

from dataclasses import dataclass

import torch

from features import FeatureSpace
from imaging import ImageLike
from keys import Message, MultiBitKey, ZeroBitKey
from stats import p_value
from .errors import KeyMismatchError
from .losses import zero_bit_loss


@dataclass(frozen=True)
class Detection:
    detected: bool
    score: float
    p_value: float


def detect_features(x: torch.Tensor, key: ZeroBitKey, theta: float) -> Detection:
    """Zero-bit decision for a feature vector.

    ``score = (x.a)^2 - |x|^2 cos^2 theta`` and the mark is detected only when
    the score is strictly positive, so the boundary counts as unmarked.
    """
    x = torch.as_tensor(x, dtype=torch.float64).detach()
    score = -float(zero_bit_loss(x, key, theta))
    if float(torch.linalg.vector_norm(x)) == 0.0:
        p = 1.0
    else:
        p = p_value(x, key.carrier)
    return Detection(detected=score > 0.0, score=score, p_value=p)


def detect(img: ImageLike, key: ZeroBitKey, theta: float, space: FeatureSpace) -> Detection:
    _check_dim(key.d, space)
    return detect_features(space.extract(img), key, theta)


def projections(x: torch.Tensor, key: MultiBitKey) -> torch.Tensor:
    x = torch.as_tensor(x, dtype=torch.float64).detach()
    if x.shape[-1] != key.d:
        raise KeyMismatchError(f"Feature has {x.shape[-1]} dims, key has d={key.d}")
    return key.carriers @ x


def decode_features(x: torch.Tensor, key: MultiBitKey) -> Message:
    """Signs of the projections on the carriers; sign(0) is +1."""
    return Message.from_signs(projections(x, key).tolist())


def decode(img: ImageLike, key: MultiBitKey, space: FeatureSpace) -> Message:
    _check_dim(key.d, space)
    return decode_features(space.extract(img), key)


def _check_dim(d: int, space: FeatureSpace) -> None:
    if d != space.dim:
        raise KeyMismatchError(f"Key has d={d}, feature space has d={space.dim}")
