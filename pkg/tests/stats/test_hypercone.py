import math

import numpy as np
import pytest
import torch

from keys import make_rng
from stats import (
    DomainError,
    HyperconeParams,
    StatsError,
    angle_of_fpr,
    fpr_of_angle,
    fpr_of_cosine,
    p_value,
)


def test_right_angle_accepts_everything():
    assert fpr_of_angle(math.pi / 2, 64) == 1.0
    assert fpr_of_angle(0.0, 64) == 0.0


def test_two_dimensions_is_linear_in_angle():
    for theta in np.linspace(0.0, math.pi / 2, 50):
        assert fpr_of_angle(float(theta), 2) == pytest.approx(2 * theta / math.pi, abs=1e-10)


def test_monotone_in_angle():
    rates = [fpr_of_angle(float(t), 64) for t in np.linspace(0.1, 1.5, 30)]
    assert all(a < b for a, b in zip(rates, rates[1:]))


@pytest.mark.parametrize("d", [8, 64, 512])
def test_matches_monte_carlo_on_the_sphere(d):
    # Threshold two standard deviations of a coordinate out, so hits are common.
    theta = math.acos(2.0 / math.sqrt(d))
    n = 200_000
    rng = make_rng(d)
    a = rng.standard_normal(d)
    a /= np.linalg.norm(a)
    hits = 0
    for _ in range(n // 20_000):
        u = rng.standard_normal((20_000, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        hits += int((np.abs(u @ a) > math.cos(theta)).sum())
    p = fpr_of_angle(theta, d)
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(hits / n - p) <= 4 * sigma + 1.0 / n


@pytest.mark.parametrize("d", [2, 8, 64, 512])
def test_angle_roundtrip(d):
    for theta in (0.4, 0.8, 1.2, 1.5):
        rate = fpr_of_angle(theta, d)
        if rate <= 0.0:
            continue
        assert angle_of_fpr(rate, d) == pytest.approx(theta, abs=1e-10)


def test_angle_of_fpr_known_values():
    assert angle_of_fpr(0.5, 2) == pytest.approx(math.pi / 4, abs=1e-12)
    assert angle_of_fpr(1 - 1e-12, 64) == pytest.approx(math.pi / 2, abs=1e-3)
    small = angle_of_fpr(1e-12, 64)
    assert fpr_of_angle(small, 64) == pytest.approx(1e-12, rel=1e-6)


def test_angle_of_fpr_rejects_bounds():
    for fpr in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            angle_of_fpr(fpr, 64)
    with pytest.raises(DomainError):
        angle_of_fpr(0.1, 1)


def test_p_value_extremes():
    a = torch.zeros(8, dtype=torch.float64)
    a[0] = 1.0
    parallel = torch.zeros(8, dtype=torch.float64)
    parallel[0] = -3.0
    orthogonal = torch.zeros(8, dtype=torch.float64)
    orthogonal[1] = 2.0
    assert p_value(parallel, a) == 0.0
    assert p_value(orthogonal, a) == 1.0
    with pytest.raises(DomainError):
        p_value(torch.zeros(8, dtype=torch.float64), a)


def test_p_value_matches_cosine_rate(rng):
    x = torch.from_numpy(rng.normal(size=16))
    a = torch.from_numpy(rng.normal(size=16))
    a = a / torch.linalg.vector_norm(a)
    cosine = float(x @ a) / float(torch.linalg.vector_norm(x))
    assert p_value(x, a) == pytest.approx(fpr_of_cosine(cosine, 16), rel=1e-12)
    assert p_value(x, a) == pytest.approx(fpr_of_angle(math.acos(abs(cosine)), 16), rel=1e-9)


def test_params_stay_consistent():
    params = HyperconeParams.from_fpr(1e-6, 64)
    assert fpr_of_angle(params.theta, 64) == pytest.approx(params.fpr, abs=1e-12)
    assert params.cos2 == pytest.approx(math.cos(params.theta) ** 2)
    assert HyperconeParams.from_angle(1.0, 64).fpr == fpr_of_angle(1.0, 64)
    with pytest.raises(StatsError):
        HyperconeParams(d=64, theta=1.0, fpr=0.5)
    with pytest.raises(DomainError):
        HyperconeParams.from_angle(math.pi / 2, 64)
