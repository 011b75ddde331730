"""The marking loop: constrain, augment, back-propagate, Adam step."""

import math
from typing import List, Optional, Tuple, Union

import torch

from augment import TransformSample, sample_transform
from config.logger import get_logger
from features import FeatureSpace, InputSizeError
from imaging import Image, dequantize, psnr, quantize
from keys import MultiBitKey, ZeroBitKey, make_rng
from perceptual import apply_constraints
from .config import EmbedConfig, EmbedReport
from .detector import decode_features, detect_features, projections
from .errors import KeyMismatchError
from .losses import total_loss

logger = get_logger(__name__)

ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8
# Allowed PSNR shortfall caused by 8-bit rounding.
PSNR_SLACK = 0.01
# Each requantization attempt shrinks the delta by this many dB.
REQUANTIZE_STEP_DB = 0.05

SecretKey = Union[ZeroBitKey, MultiBitKey]


def _check_inputs(orig: Image, key: SecretKey, cfg: EmbedConfig, space: FeatureSpace) -> None:
    orig.check_marking_size()
    smallest = min(orig.height, orig.width)
    if smallest < space.min_input_size:
        raise InputSizeError(
            f"Image {orig.height}x{orig.width} is smaller than the extractor "
            f"minimum of {space.min_input_size}"
        )
    if key.d != space.dim:
        raise KeyMismatchError(f"Key has d={key.d}, feature space has d={space.dim}")
    if cfg.is_zero_bit and not isinstance(key, ZeroBitKey):
        raise KeyMismatchError("Zero-bit embedding needs a zero-bit key")
    if not cfg.is_zero_bit:
        if not isinstance(key, MultiBitKey):
            raise KeyMismatchError("Multi-bit embedding needs a multi-bit key")
        if cfg.message.k != key.k:
            raise KeyMismatchError(
                f"Message has {cfg.message.k} bits, key carries k={key.k}"
            )


def round_to_grid(
    orig: torch.Tensor, delta: torch.Tensor, target_psnr: float, max_steps: int
) -> Tuple[torch.Tensor, int]:
    """Quantizes ``orig + delta`` to 8 bits, shrinking delta until the PSNR holds.

    Returns the rounded pixels and the number of shrink steps taken.
    """
    shrink = 10 ** (-REQUANTIZE_STEP_DB / 20)
    for step in range(max_steps + 1):
        rounded = dequantize(quantize(orig + delta))
        if psnr(rounded, orig) >= target_psnr - PSNR_SLACK:
            return rounded, step
        delta = delta * shrink
    logger.warning(
        f"PSNR still below {target_psnr} dB after {max_steps} requantization steps"
    )
    return rounded, max_steps


def embed(
    orig: Image,
    key: SecretKey,
    cfg: EmbedConfig,
    space: FeatureSpace,
) -> Tuple[Image, EmbedReport]:
    """Marks ``orig`` and returns the 8-bit output with its report.

    Every iteration re-projects the delta onto the admissible set, samples
    ``cfg.augmentations_per_iter`` transforms, and takes one Adam step on
    the averaged loss. With ``cfg.anchor_identity`` the untransformed image
    joins every batch of transforms. Optimizer state carries over
    projections. The run is deterministic for a given seed, config, key and
    feature space.
    """
    _check_inputs(orig, key, cfg, space)
    theta: Optional[float] = cfg.theta(space.dim)
    rng = make_rng(cfg.seed)
    o = orig.pixels
    image = o.clone().requires_grad_(True)
    optimizer = torch.optim.Adam(
        [image], lr=cfg.learning_rate, betas=ADAM_BETAS, eps=ADAM_EPS
    )
    logger.info(
        f"Embedding {cfg.mode} mark into {orig.height}x{orig.width} image "
        f"(iterations={cfg.iterations}, lambda={cfg.weight}, psnr={cfg.target_psnr})"
    )

    loss_trace: List[float] = []
    for iteration in range(cfg.iterations):
        with torch.no_grad():
            image.copy_(o + apply_constraints(image - o, o, cfg.target_psnr))
        optimizer.zero_grad()
        samples = [
            sample_transform(rng, cfg.augmentations, cfg.max_rotation, cfg.flips)
            for _ in range(cfg.augmentations_per_iter)
        ]
        if cfg.anchor_identity:
            samples.insert(0, TransformSample())
        loss = torch.stack(
            [total_loss(image, o, t, cfg, key, space, theta) for t in samples]
        ).mean()
        loss.backward()
        optimizer.step()
        loss_trace.append(float(loss))
        logger.debug(
            f"iter {iteration}: loss={loss_trace[-1]:.6g} "
            f"psnr={psnr(image.detach(), o):.2f} "
            f"t={', '.join(t.describe() for t in samples)}"
        )

    with torch.no_grad():
        delta = apply_constraints(image.detach() - o, o, cfg.target_psnr)
    rounded, steps = round_to_grid(o, delta, cfg.target_psnr, cfg.max_requantize_steps)
    marked = Image(rounded)
    report = _report(marked, orig, key, cfg, space, theta, loss_trace, steps)
    logger.info(
        f"Embedding done: psnr={report.final_psnr:.3f} dB, in_region={report.in_region}"
    )
    return marked, report


def _report(
    marked: Image,
    orig: Image,
    key: SecretKey,
    cfg: EmbedConfig,
    space: FeatureSpace,
    theta: Optional[float],
    loss_trace: List[float],
    steps: int,
) -> EmbedReport:
    x = space.extract(marked)
    common = dict(
        mode=cfg.mode,
        target_psnr=cfg.target_psnr,
        final_psnr=psnr(marked, orig),
        iterations=cfg.iterations,
        weight=cfg.weight,
        requantize_steps=steps,
        loss_trace=loss_trace,
    )
    if cfg.is_zero_bit:
        detection = detect_features(x, key, theta)
        return EmbedReport(
            in_region=detection.detected,
            theta=theta,
            score=detection.score,
            p_value=detection.p_value,
            **common,
        )
    message = cfg.message
    margins = (projections(x, key) * message.as_tensor()).tolist()
    decoded = decode_features(x, key)
    bit_errors = sum(1 for a, b in zip(decoded.bits, message.bits) if a != b)
    return EmbedReport(
        in_region=bit_errors == 0,
        margins=margins,
        decoded=decoded.to_bitstring(),
        bit_errors=bit_errors,
        **common,
    )


def psnr_ok(report: EmbedReport) -> bool:
    return math.isinf(report.final_psnr) or report.final_psnr >= report.target_psnr - PSNR_SLACK
