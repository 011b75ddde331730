from .interface import AbstractFeatureExtractor
from .extractor import (
    ConvExtractor,
    ExtractorSpec,
    LayerKind,
    LayerSpec,
    build_extractor,
    load_weights,
    save_weights,
)
from .whitening import WhiteningTransform, fit_whitening, load_whitening, save_whitening
from .space import FeatureSpace
from .factory import create_extractor
from .container import Container, read_container, write_container
from .errors import (
    FeatureError,
    ExtractorSpecError,
    InputSizeError,
    WhiteningError,
    DimensionMismatchError,
    ContainerFormatError,
)

__all__ = [
    "AbstractFeatureExtractor",
    "ConvExtractor",
    "ExtractorSpec",
    "LayerKind",
    "LayerSpec",
    "build_extractor",
    "load_weights",
    "save_weights",
    "WhiteningTransform",
    "fit_whitening",
    "load_whitening",
    "save_whitening",
    "FeatureSpace",
    "create_extractor",
    "Container",
    "read_container",
    "write_container",
    "FeatureError",
    "ExtractorSpecError",
    "InputSizeError",
    "WhiteningError",
    "DimensionMismatchError",
    "ContainerFormatError",
]
