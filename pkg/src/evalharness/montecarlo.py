"""Empirical false positive rates."""

import math
from dataclasses import dataclass

import numpy as np
import torch

from config.logger import get_logger
from features import FeatureSpace
from keys import ZeroBitKey, make_rng
from watermark import detect_features
from .corpus import noise_image
from .errors import SampleSizeError

logger = get_logger(__name__)

CHUNK = 100_000


def monte_carlo_fpr(d: int, theta: float, n: int, seed: int, chunk: int = CHUNK) -> float:
    """Fraction of ``n`` uniform unit vectors inside the dual hypercone of angle theta.

    The carrier is drawn first from the same stream, then the samples in
    chunks; the result depends only on (d, theta, n, seed, chunk).
    """
    if n < 1:
        raise SampleSizeError(f"n must be >= 1, got {n}")
    if d < 2:
        raise SampleSizeError(f"d must be >= 2, got {d}")
    rng = make_rng(seed)
    a = rng.standard_normal(d)
    a /= np.linalg.norm(a)
    cos2 = math.cos(theta) ** 2
    hits = 0
    remaining = n
    while remaining > 0:
        m = min(chunk, remaining)
        u = rng.standard_normal((m, d))
        proj2 = (u @ a) ** 2
        norm2 = np.einsum("ij,ij->i", u, u)
        hits += int(np.count_nonzero(proj2 > norm2 * cos2))
        remaining -= m
    rate = hits / n
    logger.info(f"Monte-Carlo FPR d={d} theta={theta:.6f} n={n}: {rate:.6g}")
    return rate


@dataclass(frozen=True)
class NoiseSweep:
    n: int
    positives: int

    @property
    def rate(self) -> float:
        return self.positives / self.n


def noise_false_positives(
    space: FeatureSpace,
    key: ZeroBitKey,
    theta: float,
    n: int,
    seed: int,
    size: int = 64,
    batch_size: int = 64,
) -> NoiseSweep:
    """Runs detection on ``n`` unmarked uniform-noise images and counts positives."""
    if n < 1:
        raise SampleSizeError(f"n must be >= 1, got {n}")
    size = max(size, space.min_input_size)
    rng = make_rng(seed)
    positives = 0
    done = 0
    while done < n:
        m = min(batch_size, n - done)
        batch = torch.stack([noise_image(rng, size, size).pixels for _ in range(m)])
        for x in space.extract_batch(batch):
            if detect_features(x, key, theta).detected:
                positives += 1
        done += m
    logger.info(f"Noise sweep: {positives} false positives out of {n}")
    return NoiseSweep(n=n, positives=positives)
