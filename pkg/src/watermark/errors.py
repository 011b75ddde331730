class WatermarkError(Exception):
    """Base class for embedding, detection and decoding errors."""

    pass


class EmbedConfigError(WatermarkError):
    """Inconsistent embedding configuration."""

    pass


class KeyMismatchError(WatermarkError, ValueError):
    """Key, message and feature space dimensions disagree."""

    pass
