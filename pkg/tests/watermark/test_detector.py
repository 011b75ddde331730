import math

import pytest
import torch

from keys import Message, ZeroBitKey, gen_multi_bit_key, gen_zero_bit_key
from watermark import (
    KeyMismatchError,
    decode,
    decode_features,
    detect,
    detect_features,
    projections,
    zero_bit_loss,
)


def test_detection_agrees_with_loss_sign(rng):
    key = gen_zero_bit_key(seed=1, d=16)
    theta = 1.2
    for _ in range(200):
        x = torch.from_numpy(rng.normal(size=16))
        if rng.random() < 0.5:
            x = x + 4.0 * key.carrier
        detection = detect_features(x, key, theta)
        assert detection.detected == (float(zero_bit_loss(x, key, theta)) < 0)
        assert detection.score == pytest.approx(-float(zero_bit_loss(x, key, theta)))


def test_boundary_is_not_detected():
    carrier = torch.tensor([1.0, 0.0], dtype=torch.float64)
    key = ZeroBitKey(carrier)
    on_boundary = torch.tensor([1.0, 1.0], dtype=torch.float64)
    assert not detect_features(on_boundary, key, math.pi / 4).detected


def test_zero_vector():
    key = gen_zero_bit_key(seed=1, d=16)
    detection = detect_features(torch.zeros(16, dtype=torch.float64), key, 1.0)
    assert not detection.detected
    assert detection.score == 0.0 and detection.p_value == 1.0


def test_p_value_small_on_carrier():
    key = gen_zero_bit_key(seed=2, d=16)
    detection = detect_features(2.0 * key.carrier, key, 1.0)
    assert detection.detected
    assert detection.p_value < 1e-12


def test_decode_exact_and_negated():
    key = gen_multi_bit_key(seed=3, k=6, d=16)
    message = Message((1, -1, 1, 1, -1, -1))
    x = message.as_tensor() @ key.carriers
    assert decode_features(x, key) == message
    flipped = decode_features(-x, key)
    assert all(a == -b for a, b in zip(flipped.bits, message.bits))
    assert torch.allclose(projections(x, key), message.as_tensor(), atol=1e-12)


@pytest.mark.parametrize("scale", [1e-6, 0.5, 3.0, 1e6])
def test_decode_ignores_positive_scaling(rng, scale):
    key = gen_multi_bit_key(seed=4, k=10, d=16)
    for _ in range(50):
        x = torch.from_numpy(rng.normal(size=16))
        assert decode_features(scale * x, key) == decode_features(x, key)


def test_detect_on_images(small_space, small_zero_key, random_image):
    img = random_image()
    detection = detect(img, small_zero_key, 1.0, small_space)
    assert detection == detect_features(small_space.extract(img), small_zero_key, 1.0)


def test_decode_on_images(small_space, small_multi_key, random_image):
    img = random_image()
    decoded = decode(img, small_multi_key, small_space)
    assert decoded.k == small_multi_key.k


def test_key_dimension_must_match_space(small_space, random_image):
    img = random_image()
    with pytest.raises(KeyMismatchError):
        detect(img, gen_zero_bit_key(seed=0, d=small_space.dim + 1), 1.0, small_space)
    with pytest.raises(KeyMismatchError):
        decode(img, gen_multi_bit_key(seed=0, k=2, d=small_space.dim + 1), small_space)
