class FeatureError(Exception):
    """Base class for feature extraction errors."""

    pass


class ExtractorSpecError(FeatureError):
    """Invalid extractor layer chain."""

    pass


class InputSizeError(FeatureError, ValueError):
    """Image smaller than the extractor's minimum input size."""

    pass


class WhiteningError(FeatureError, ValueError):
    """Whitening cannot be fitted (too few samples, degenerate spectrum)."""

    pass


class DimensionMismatchError(FeatureError, ValueError):
    """Feature, whitening, weights or key dimensions disagree."""

    pass


class ContainerFormatError(FeatureError):
    """LMWT file is missing, truncated, or malformed."""

    pass
