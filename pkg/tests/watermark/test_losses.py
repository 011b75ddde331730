import math

import pytest
import torch

from augment import TransformKind, TransformSample, sample_transform
from imaging import mse
from keys import Message, ZeroBitKey, gen_multi_bit_key, make_rng
from watermark import (
    EmbedConfig,
    KeyMismatchError,
    multi_bit_loss,
    total_loss,
    zero_bit_loss,
)

THETA = 0.9


def _basis(d, i):
    e = torch.zeros(d, dtype=torch.float64)
    e[i] = 1.0
    return e


def test_zero_bit_loss_on_carrier():
    key = ZeroBitKey(_basis(8, 0))
    assert float(zero_bit_loss(key.carrier, key, THETA)) == pytest.approx(-math.sin(THETA) ** 2)


def test_zero_bit_loss_orthogonal():
    key = ZeroBitKey(_basis(8, 0))
    x = 3.0 * _basis(8, 2)
    assert float(zero_bit_loss(x, key, THETA)) == pytest.approx(9.0 * math.cos(THETA) ** 2)


def test_zero_bit_loss_on_boundary():
    key = ZeroBitKey(_basis(8, 0))
    x = math.cos(THETA) * _basis(8, 0) + math.sin(THETA) * _basis(8, 5)
    assert abs(float(zero_bit_loss(x, key, THETA))) < 1e-12


def test_zero_bit_loss_is_sign_symmetric(rng):
    key = ZeroBitKey(_basis(8, 1))
    x = torch.from_numpy(rng.normal(size=8))
    assert float(zero_bit_loss(x, key, THETA)) == pytest.approx(float(zero_bit_loss(-x, key, THETA)))


def test_multi_bit_loss_cases():
    key = gen_multi_bit_key(seed=0, k=4, d=8)
    message = Message((1, -1, -1, 1))
    mu = 2.0
    satisfied = mu * (message.as_tensor() @ key.carriers)
    assert float(multi_bit_loss(satisfied, key, message, mu)) == pytest.approx(0.0, abs=1e-12)

    v = 0.7
    one_short = satisfied - v * message.bits[0] * key.carriers[0]
    assert float(multi_bit_loss(one_short, key, message, mu)) == pytest.approx(v / 4)

    zero = torch.zeros(8, dtype=torch.float64)
    assert float(multi_bit_loss(zero, key, message, mu)) == pytest.approx(mu)


def test_multi_bit_loss_checks_message_length():
    key = gen_multi_bit_key(seed=0, k=4, d=8)
    with pytest.raises(KeyMismatchError):
        multi_bit_loss(torch.zeros(8, dtype=torch.float64), key, Message((1, 1)), 1.0)


def test_total_loss_without_weight_is_mse(small_space, small_zero_key, random_image):
    orig = random_image()
    img = torch.clamp(orig.pixels + 3.0 / 255, 0.0, 1.0)
    cfg = EmbedConfig(target_fpr=1e-3, lambda_w=0.0)
    value = total_loss(img, orig.pixels, TransformSample(), cfg, small_zero_key, small_space)
    assert float(value) == pytest.approx(mse(img, orig))


def test_total_loss_inside_region_is_negative(small_space, random_image):
    orig = random_image()
    x = small_space.extract(orig)
    key = ZeroBitKey(x / torch.linalg.vector_norm(x))
    cfg = EmbedConfig(target_fpr=1e-3, lambda_w=2.0)
    theta = cfg.theta(small_space.dim)
    value = total_loss(orig.pixels, orig.pixels, TransformSample(), cfg, key, small_space)
    assert float(value) == pytest.approx(2.0 * float(zero_bit_loss(x, key, theta)))
    assert float(value) < 0


GRADIENT_CASES = [
    (mode, kind, seed)
    for mode in ("zero-bit", "multi-bit")
    for kind in TransformKind
    for seed in (0, 1, 2)
]


@pytest.mark.parametrize("mode,kind,seed", GRADIENT_CASES)
def test_total_loss_gradient_matches_finite_differences(
    small_space, small_zero_key, small_multi_key, mode, kind, seed
):
    rng = make_rng(seed)
    orig = torch.from_numpy(rng.integers(0, 256, size=(3, 24, 24)) / 255.0)
    # Keep pixels away from the clamp so finite differences see the same function.
    img = (0.9 * orig + 0.05).requires_grad_(True)
    if mode == "zero-bit":
        cfg, key = EmbedConfig(target_fpr=1e-3, lambda_w=1.0), small_zero_key
    else:
        cfg = EmbedConfig(message=Message((1, -1, -1, 1)), lambda_w=1.0)
        key = small_multi_key
    t = sample_transform(rng, (kind,))
    total_loss(img, orig, t, cfg, key, small_space).backward()
    grad = img.grad

    h = 1e-5
    base = img.detach()
    for _ in range(5):
        c, i, j = int(rng.integers(3)), int(rng.integers(24)), int(rng.integers(24))
        plus, minus = base.clone(), base.clone()
        plus[c, i, j] += h
        minus[c, i, j] -= h
        with torch.no_grad():
            fd = (
                float(total_loss(plus, orig, t, cfg, key, small_space))
                - float(total_loss(minus, orig, t, cfg, key, small_space))
            ) / (2 * h)
        assert fd == pytest.approx(float(grad[c, i, j]), rel=1e-4, abs=1e-8)


def test_total_loss_rejects_wrong_key_type(small_space, small_multi_key, random_image):
    orig = random_image().pixels
    cfg = EmbedConfig(target_fpr=1e-3)
    with pytest.raises(KeyMismatchError):
        total_loss(orig, orig, TransformSample(), cfg, small_multi_key, small_space)
