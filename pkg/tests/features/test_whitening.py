import numpy as np
import pytest
import torch

from features import (
    ContainerFormatError,
    DimensionMismatchError,
    WhiteningError,
    WhiteningTransform,
    fit_whitening,
    load_whitening,
    save_whitening,
    write_container,
)


def _correlated(rng, n, raw_dim):
    mixing = rng.normal(size=(raw_dim, raw_dim))
    return rng.normal(size=(n, raw_dim)) @ mixing.T + rng.normal(size=raw_dim) * 5


def test_fitted_samples_are_white(rng):
    d = 8
    samples = _correlated(rng, 50 * d, 12)
    whitening = fit_whitening(samples, d)
    out = whitening.apply(torch.from_numpy(samples)).numpy()
    assert np.abs(out.mean(axis=0)).max() < 1e-8
    cov = np.cov(out, rowvar=False)
    assert np.linalg.norm(cov - np.eye(d)) < 1e-6
    assert whitening.dim == d and whitening.raw_dim == 12


def test_white_input_gives_near_identity(rng):
    samples = rng.normal(size=(20000, 6))
    whitening = fit_whitening(samples, 6)
    w = whitening.matrix.numpy()
    assert np.allclose(w @ w.T, np.eye(6), atol=0.15)


def test_eigenvector_signs_are_canonical(rng):
    samples = _correlated(rng, 400, 10)
    w = fit_whitening(samples, 5).matrix.numpy()
    for row in w:
        assert row[np.argmax(np.abs(row))] > 0


def test_insufficient_samples(rng):
    with pytest.raises(WhiteningError, match="insufficient samples"):
        fit_whitening(rng.normal(size=(8, 8)), 8)


def test_rank_deficient_without_floor(rng):
    base = rng.normal(size=(100, 3))
    samples = np.hstack([base, base @ rng.normal(size=(3, 3))])
    with pytest.raises(WhiteningError, match="rank-deficient"):
        fit_whitening(samples, 6, eps=0.0)
    floored = fit_whitening(samples, 6, eps=1e-3)
    assert torch.isfinite(floored.matrix).all()


def test_invalid_dimension(rng):
    with pytest.raises(WhiteningError):
        fit_whitening(rng.normal(size=(50, 4)), 5)
    with pytest.raises(WhiteningError):
        fit_whitening(rng.normal(size=(50, 4)), 0)


def test_apply_rejects_wrong_width(rng):
    whitening = fit_whitening(rng.normal(size=(50, 4)), 2)
    with pytest.raises(DimensionMismatchError):
        whitening.apply(torch.zeros(5, dtype=torch.float64))


def test_inconsistent_parameters():
    with pytest.raises(DimensionMismatchError):
        WhiteningTransform(mean=torch.zeros(3), matrix=torch.zeros(2, 4))


def test_save_and_load(tmp_path, rng):
    whitening = fit_whitening(rng.normal(size=(50, 4)), 3)
    path = tmp_path / "whiten.lmwt"
    save_whitening(whitening, path)
    loaded = load_whitening(path)
    assert torch.equal(loaded.mean, whitening.mean)
    assert torch.equal(loaded.matrix, whitening.matrix)


def test_load_rejects_other_kinds(tmp_path):
    path = tmp_path / "other.lmwt"
    write_container(path, {"mean": np.zeros(2)}, metadata={"kind": "weights"})
    with pytest.raises(ContainerFormatError):
        load_whitening(path)
