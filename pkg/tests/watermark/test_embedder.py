import math

import pytest
import torch
from pydantic import ValidationError

from augment import TransformKind, TransformSample
from features import InputSizeError
from imaging import ImagingError, dequantize, psnr, quantize
from keys import Message, gen_zero_bit_key
from watermark import (
    MODE_MULTI_BIT,
    MODE_ZERO_BIT,
    PSNR_SLACK,
    EmbedConfig,
    EmbedConfigError,
    KeyMismatchError,
    decode,
    embed,
    psnr_ok,
    round_to_grid,
    zero_bit_loss,
)
from watermark import embedder as embedder_module


def test_config_needs_exactly_one_mode():
    with pytest.raises(EmbedConfigError):
        EmbedConfig()
    with pytest.raises(EmbedConfigError):
        EmbedConfig(target_fpr=1e-6, message=Message((1, -1)))


def test_config_bounds():
    with pytest.raises(ValidationError):
        EmbedConfig(target_fpr=1e-6, iterations=0)
    with pytest.raises(ValidationError):
        EmbedConfig(target_fpr=1.5)
    with pytest.raises(EmbedConfigError):
        EmbedConfig(target_fpr=1e-6, target_psnr=math.inf)
    with pytest.raises(EmbedConfigError):
        EmbedConfig(target_fpr=1e-6, augmentations=())


def test_config_modes_and_weights():
    zero = EmbedConfig(target_fpr=1e-6)
    multi = EmbedConfig(message=Message((1, 1)))
    assert zero.mode == MODE_ZERO_BIT and zero.weight == 1.0
    assert multi.mode == MODE_MULTI_BIT and multi.weight == 5e4
    assert multi.theta(64) is None
    assert EmbedConfig.model_validate({"target_fpr": 1e-3, "lambda": 3.0}).weight == 3.0


def test_round_to_grid_keeps_small_delta(random_image):
    orig = random_image().pixels
    delta = torch.zeros_like(orig)
    delta[0, 0, 0] = 1.0 / 255
    rounded, steps = round_to_grid(orig, delta, 40.0, 10)
    assert steps == 0
    assert torch.equal(rounded, dequantize(quantize(orig + delta)))


def test_round_to_grid_shrinks_until_psnr_holds(random_image):
    orig = (0.5 * random_image().pixels + 0.25)
    orig = dequantize(quantize(orig))
    delta = torch.full_like(orig, 6.0 / 255)
    rounded, steps = round_to_grid(orig, delta, 40.0, 500)
    assert steps > 0
    assert psnr(rounded, orig) >= 40.0 - PSNR_SLACK


def test_no_watermark_force_returns_original(small_space, small_zero_key, random_image):
    orig = random_image()
    cfg = EmbedConfig(target_fpr=1e-3, lambda_w=0.0, iterations=1)
    marked, report = embed(orig, small_zero_key, cfg, small_space)
    assert torch.equal(marked.pixels, orig.pixels)
    assert math.isinf(report.final_psnr)
    assert psnr_ok(report)
    assert "Infinity" in report.model_dump_json()


def test_embed_is_deterministic(small_space, small_zero_key, random_image):
    orig = random_image()
    cfg = EmbedConfig(target_fpr=1e-2, iterations=5, seed=3)
    first, report = embed(orig, small_zero_key, cfg, small_space)
    second, _ = embed(orig, small_zero_key, cfg, small_space)
    assert torch.equal(first.pixels, second.pixels)
    assert len(report.loss_trace) == 5
    assert torch.equal(first.pixels, dequantize(quantize(first.pixels)))
    assert psnr_ok(report)
    assert report.theta == pytest.approx(cfg.theta(small_space.dim))


def test_embed_multi_bit_report(small_space, small_multi_key, random_image):
    orig = random_image()
    message = Message((1, -1, -1, 1))
    cfg = EmbedConfig(message=message, iterations=5, target_psnr=36.0)
    marked, report = embed(orig, small_multi_key, cfg, small_space)
    assert report.mode == MODE_MULTI_BIT
    assert len(report.margins) == 4 and len(report.decoded) == 4
    assert report.decoded == decode(marked, small_multi_key, small_space).to_bitstring()
    assert report.in_region == (report.bit_errors == 0)
    assert psnr(marked, orig) >= 36.0 - PSNR_SLACK


def test_embed_input_checks(
    small_space, unpadded_space, small_zero_key, small_multi_key, random_image
):
    zero_cfg = EmbedConfig(target_fpr=1e-3, iterations=1)
    with pytest.raises(ImagingError):
        embed(random_image(16, 40), small_zero_key, zero_cfg, small_space)
    with pytest.raises(InputSizeError):
        embed(random_image(20, 40), small_zero_key, zero_cfg, unpadded_space)
    with pytest.raises(KeyMismatchError):
        embed(random_image(), small_multi_key, zero_cfg, small_space)
    with pytest.raises(KeyMismatchError):
        embed(random_image(), gen_zero_bit_key(0, small_space.dim + 2), zero_cfg, small_space)
    multi_cfg = EmbedConfig(message=Message((1, -1)), iterations=1)
    with pytest.raises(KeyMismatchError):
        embed(random_image(), small_multi_key, multi_cfg, small_space)
    with pytest.raises(KeyMismatchError):
        embed(random_image(), small_zero_key, multi_cfg, small_space)


@pytest.mark.parametrize("anchor", [True, False])
def test_identity_anchor_joins_every_batch(
    mocker, small_space, small_zero_key, random_image, anchor
):
    spy = mocker.spy(embedder_module, "total_loss")
    cfg = EmbedConfig(
        target_fpr=1e-3, iterations=3, augmentations_per_iter=2, anchor_identity=anchor
    )
    embed(random_image(), small_zero_key, cfg, small_space)
    per_iter = 3 if anchor else 2
    assert spy.call_count == 3 * per_iter
    transforms = [call.args[2] for call in spy.call_args_list]
    if anchor:
        assert all(t == TransformSample() for t in transforms[::per_iter])
    else:
        assert TransformSample() not in transforms


def test_identity_objective_improves(small_space, small_zero_key, random_image):
    orig = random_image()
    cfg = EmbedConfig(
        target_fpr=1e-3,
        target_psnr=36.0,
        lambda_w=100.0,
        iterations=30,
        augmentations=(TransformKind.IDENTITY,),
        flips=False,
    )
    theta = cfg.theta(small_space.dim)
    marked, _ = embed(orig, small_zero_key, cfg, small_space)
    before = zero_bit_loss(small_space.extract(orig), small_zero_key, theta)
    after = zero_bit_loss(small_space.extract(marked), small_zero_key, theta)
    assert float(after) <= float(before)
