import math

import pytest
import torch

from imaging import psnr
from perceptual import PerceptualError, apply_constraints, attenuate, clip_psnr


@pytest.fixture
def base(random_image):
    return random_image(32, 32).pixels


def test_zero_delta_stays_zero(base):
    out = apply_constraints(torch.zeros_like(base), base, 40.0)
    assert torch.count_nonzero(out) == 0


def test_attenuation_never_amplifies(base, rng):
    delta = torch.from_numpy(rng.normal(0.0, 0.02, base.shape))
    out = attenuate(delta, base)
    assert torch.all(out.abs() <= delta.abs() + 1e-15)
    assert torch.all(torch.sign(out) * torch.sign(delta) >= 0)


@pytest.mark.parametrize("target", [32.0, 40.0, 52.0])
def test_output_meets_psnr_and_range(base, rng, target):
    delta = torch.from_numpy(rng.normal(0.0, 0.1, base.shape))
    out = apply_constraints(delta, base, target)
    marked = base + out
    assert float(marked.min()) >= 0.0 and float(marked.max()) <= 1.0
    assert psnr(marked, base) >= target - 1e-9


def test_clip_psnr_is_idempotent(rng):
    delta = torch.from_numpy(rng.normal(0.0, 0.1, (3, 16, 16)))
    once = clip_psnr(delta, 40.0)
    assert torch.allclose(clip_psnr(once, 40.0), once, rtol=1e-12, atol=0)


def test_clip_psnr_leaves_small_delta(rng):
    delta = torch.from_numpy(rng.normal(0.0, 1e-4, (3, 16, 16)))
    assert torch.equal(clip_psnr(delta, 40.0), delta)


def test_clip_psnr_rejects_infinite_target():
    with pytest.raises(PerceptualError):
        clip_psnr(torch.ones(3, 4, 4), math.inf)


def test_constraints_do_not_track_gradients(base):
    delta = torch.full_like(base, 0.01).requires_grad_(True)
    assert not apply_constraints(delta, base, 40.0).requires_grad


def test_thirty_db_delta_is_rescaled_to_target(base, rng):
    orig = 0.5 * base + 0.25
    delta = torch.from_numpy(rng.normal(0.0, 1.0, orig.shape))
    # Exactly 30 dB before projection.
    delta = delta * (10 ** (-30 / 20) / float(torch.sqrt(torch.mean(delta**2))))
    assert psnr(orig + delta, orig) == pytest.approx(30.0, abs=1e-9)

    assert psnr(orig + clip_psnr(delta, 40.0), orig) == pytest.approx(40.0, abs=1e-6)
    out = apply_constraints(delta, orig, 40.0)
    assert psnr(orig + out, orig) == pytest.approx(40.0, abs=1e-6)
