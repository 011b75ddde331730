import pytest
import torch

from evalharness import (
    MANIFEST_NAME,
    EmptyCorpusError,
    ManifestError,
    load_corpus,
    noise_image,
    read_manifest,
    synthetic_corpus,
    write_corpus,
    write_manifest,
)
from imaging import dequantize, quantize
from keys import make_rng


def test_synthetic_corpus_is_seeded_and_on_grid():
    first = synthetic_corpus(3, 48, seed=1)
    second = synthetic_corpus(3, 48, seed=1)
    for a, b in zip(first, second):
        assert torch.equal(a.pixels, b.pixels)
        assert torch.equal(a.pixels, dequantize(quantize(a.pixels)))
    assert not torch.equal(first[0].pixels, first[1].pixels)
    assert (first[0].height, first[0].width) == (48, 48)


def test_image_depends_only_on_index():
    assert torch.equal(synthetic_corpus(2, 32, seed=4)[1].pixels, synthetic_corpus(5, 32, seed=4)[1].pixels)


def test_noise_image_range():
    img = noise_image(make_rng(0), 20, 30)
    assert (img.height, img.width) == (20, 30)
    assert float(img.pixels.min()) >= 0.0 and float(img.pixels.max()) <= 1.0


def test_write_and_load_corpus(tmp_path):
    manifest = write_corpus(tmp_path / "corpus", n=3, size=32, seed=2)
    assert manifest.name == MANIFEST_NAME
    assert manifest.read_text().splitlines() == ["img_0000.png", "img_0001.png", "img_0002.png"]
    loaded = load_corpus(manifest)
    for a, b in zip(loaded, synthetic_corpus(3, 32, seed=2)):
        assert torch.equal(a.pixels, b.pixels)


def test_manifest_comments_and_absolute_paths(tmp_path):
    other = tmp_path / "elsewhere" / "x.png"
    manifest = tmp_path / "m" / "list.txt"
    write_manifest([other], manifest)
    manifest.write_text("# corpus\n\n" + manifest.read_text())
    assert read_manifest(manifest) == [other.resolve()]


def test_manifest_errors(tmp_path):
    with pytest.raises(ManifestError):
        read_manifest(tmp_path / "missing.txt")
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n\n")
    with pytest.raises(EmptyCorpusError):
        read_manifest(empty)
    with pytest.raises(EmptyCorpusError):
        write_corpus(tmp_path / "none", n=0, size=32, seed=0)
