import pytest
import torch

from evalharness import synthetic_corpus
from features import (
    ExtractorSpec,
    FeatureSpace,
    LayerKind,
    LayerSpec,
    build_extractor,
    fit_whitening,
)
from imaging import Image
from keys import gen_multi_bit_key, gen_zero_bit_key, make_rng

# Four stride-2 convs without padding need at least 31x31 input.
UNPADDED = ExtractorSpec(
    layers=[
        LayerSpec(kind=LayerKind.CONV, out_channels=4, kernel_size=3, stride=2),
        LayerSpec(kind=LayerKind.RELU),
        LayerSpec(kind=LayerKind.CONV, out_channels=8, kernel_size=3, stride=2),
        LayerSpec(kind=LayerKind.RELU),
        LayerSpec(kind=LayerKind.CONV, out_channels=8, kernel_size=3, stride=2),
        LayerSpec(kind=LayerKind.RELU),
        LayerSpec(kind=LayerKind.CONV, out_channels=16, kernel_size=3, stride=2),
        LayerSpec(kind=LayerKind.GAP),
    ]
)


def _space(spec: ExtractorSpec, d: int, n: int, size: int, seed: int = 0) -> FeatureSpace:
    extractor = build_extractor(spec, seed=seed)
    images = synthetic_corpus(n, size, seed=seed + 100)
    with torch.no_grad():
        raw = extractor.forward(torch.stack([img.pixels for img in images]))
    return FeatureSpace(extractor, fit_whitening(raw, d))


@pytest.fixture(scope="session")
def small_space() -> FeatureSpace:
    """Narrow extractor (D_raw=16) whitened to d=8; quick enough for unit tests."""
    return _space(ExtractorSpec.desk((4, 8, 8, 16)), d=8, n=48, size=40)


@pytest.fixture(scope="session")
def unpadded_space() -> FeatureSpace:
    """Extractor with a 31x31 minimum input, whitened to d=8."""
    return _space(UNPADDED, d=8, n=48, size=40)


@pytest.fixture(scope="session")
def desk_space() -> FeatureSpace:
    """The default desk extractor (D_raw=128) whitened to d=64 on 128x128 images."""
    return _space(ExtractorSpec.desk(), d=64, n=160, size=128)


@pytest.fixture(scope="session")
def desk_corpus():
    """The 32-image 128x128 corpus the end-to-end runs mark."""
    return synthetic_corpus(32, 128, seed=42)


@pytest.fixture(scope="session")
def small_zero_key(small_space):
    return gen_zero_bit_key(seed=7, d=small_space.dim)


@pytest.fixture(scope="session")
def small_multi_key(small_space):
    return gen_multi_bit_key(seed=7, k=4, d=small_space.dim)


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def random_image(rng):
    """A 40x40 image on the 8-bit grid."""

    def make(height: int = 40, width: int = 40) -> Image:
        levels = rng.integers(0, 256, size=(3, height, width))
        return Image(torch.from_numpy(levels / 255.0))

    return make
