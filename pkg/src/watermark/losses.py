"""Watermark losses and the total marking objective."""

import math
from typing import Optional, Union

import torch

from augment import TransformSample, apply_transform
from features import FeatureSpace
from imaging import pixel_mse
from keys import Message, MultiBitKey, ZeroBitKey
from .config import EmbedConfig
from .errors import KeyMismatchError


def zero_bit_loss(x: torch.Tensor, key: ZeroBitKey, theta: float) -> torch.Tensor:
    """``-[(x.a)^2 - |x|^2 cos^2 theta]``: negative iff x is inside the dual hypercone."""
    if x.shape[-1] != key.d:
        raise KeyMismatchError(f"Feature has {x.shape[-1]} dims, key has d={key.d}")
    projection = x @ key.carrier
    return -(projection**2 - (x * x).sum(dim=-1) * math.cos(theta) ** 2)


def multi_bit_loss(
    x: torch.Tensor, key: MultiBitKey, message: Message, mu: float
) -> torch.Tensor:
    """Mean hinge ``max(0, mu - (x.a_i) m_i)`` over the k carriers."""
    if message.k != key.k:
        raise KeyMismatchError(f"Message has {message.k} bits, key carries k={key.k}")
    if x.shape[-1] != key.d:
        raise KeyMismatchError(f"Feature has {x.shape[-1]} dims, key has d={key.d}")
    modulated = (x @ key.carriers.T) * message.as_tensor()
    return torch.clamp(mu - modulated, min=0.0).mean(dim=-1)


def watermark_loss(
    x: torch.Tensor,
    key: Union[ZeroBitKey, MultiBitKey],
    cfg: EmbedConfig,
    theta: Optional[float],
) -> torch.Tensor:
    if cfg.is_zero_bit:
        if not isinstance(key, ZeroBitKey):
            raise KeyMismatchError("Zero-bit embedding needs a zero-bit key")
        return zero_bit_loss(x, key, theta)
    if not isinstance(key, MultiBitKey):
        raise KeyMismatchError("Multi-bit embedding needs a multi-bit key")
    return multi_bit_loss(x, key, cfg.message, cfg.margin)


def total_loss(
    img: torch.Tensor,
    orig: torch.Tensor,
    t: TransformSample,
    cfg: EmbedConfig,
    key: Union[ZeroBitKey, MultiBitKey],
    space: FeatureSpace,
    theta: Optional[float] = None,
) -> torch.Tensor:
    """``lambda L_w(phi(Tr(img, t))) + mse(img, orig)``, differentiable in ``img``.

    The MSE is on the 8-bit scale. ``theta`` defaults to the angle of
    ``cfg.target_fpr``.
    """
    if cfg.is_zero_bit and theta is None:
        theta = cfg.theta(space.dim)
    transformed = apply_transform(img, t, straight_through=True)
    x = space.features(transformed)
    return cfg.weight * watermark_loss(x, key, cfg, theta) + pixel_mse(img, orig)
