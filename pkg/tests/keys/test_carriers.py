import numpy as np
import pytest
import torch

from keys import (
    KeyDimensionError,
    Message,
    MessageFormatError,
    MultiBitKey,
    ZeroBitKey,
    gen_multi_bit_key,
    gen_zero_bit_key,
    make_rng,
    spawn_rngs,
)


def test_zero_bit_key_is_unit_and_seeded():
    key = gen_zero_bit_key(seed=5, d=64)
    assert abs(float(torch.linalg.vector_norm(key.carrier)) - 1.0) < 1e-12
    assert torch.equal(key.carrier, gen_zero_bit_key(seed=5, d=64).carrier)
    assert key.d == 64 and key.seed == 5


def test_independent_keys_are_nearly_orthogonal():
    d = 64
    dots = [
        float(gen_zero_bit_key(2 * i, d).carrier @ gen_zero_bit_key(2 * i + 1, d).carrier)
        for i in range(1000)
    ]
    # Each dot has standard deviation 1/sqrt(d); the mean of 1000 has 1/sqrt(1000 d).
    assert abs(np.mean(dots)) < 3.0 / np.sqrt(1000 * d)
    assert np.std(dots) == pytest.approx(1.0 / np.sqrt(d), rel=0.15)


def test_multi_bit_key_is_orthonormal():
    key = gen_multi_bit_key(seed=1, k=30, d=64)
    gram = key.carriers @ key.carriers.T
    assert torch.allclose(gram, torch.eye(30, dtype=torch.float64), atol=1e-10)
    assert key.k == 30 and key.d == 64


def test_square_multi_bit_key_has_unit_determinant():
    key = gen_multi_bit_key(seed=2, k=16, d=16)
    assert abs(abs(float(torch.linalg.det(key.carriers))) - 1.0) < 1e-8


def test_invalid_dimensions():
    with pytest.raises(KeyDimensionError):
        gen_multi_bit_key(seed=0, k=9, d=8)
    with pytest.raises(KeyDimensionError):
        gen_multi_bit_key(seed=0, k=0, d=8)
    with pytest.raises(KeyDimensionError):
        gen_zero_bit_key(seed=0, d=1)
    with pytest.raises(KeyDimensionError):
        ZeroBitKey(torch.ones(4, dtype=torch.float64))
    with pytest.raises(KeyDimensionError):
        MultiBitKey(torch.ones(2, 4, dtype=torch.float64))


def test_message_parse_bits_and_hex():
    assert Message.parse("0101", 4).bits == (-1, 1, -1, 1)
    assert Message.parse("0x5", 4).bits == (-1, 1, -1, 1)
    assert Message.parse("0x1", 6).to_bitstring() == "000001"
    assert Message.parse("1111_0000", 8).to_hex() == "0xf0"


@pytest.mark.parametrize(
    "text,k",
    [("012", 3), ("0101", 5), ("0x1f", 4), ("0x", 4), ("0xzz", 8), ("", 3), ("01", 0)],
)
def test_message_parse_errors(text, k):
    with pytest.raises(MessageFormatError):
        Message.parse(text, k)


def test_message_from_signs_maps_zero_to_one():
    assert Message.from_signs([0.0, -0.2, 3.0]).bits == (1, -1, 1)


def test_message_rejects_other_values():
    with pytest.raises(MessageFormatError):
        Message((1, 0, -1))
    with pytest.raises(MessageFormatError):
        Message(())


def test_random_message_is_reproducible():
    assert Message.random(30, make_rng(9)) == Message.random(30, make_rng(9))
    assert Message.random(30, make_rng(9)).k == 30


def test_spawned_streams_are_independent_and_reproducible():
    a, b = spawn_rngs(3, 2)
    assert not np.array_equal(a.random(8), b.random(8))
    assert np.array_equal(spawn_rngs(3, 2)[0].random(8), spawn_rngs(3, 2)[0].random(8))
