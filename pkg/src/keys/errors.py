class KeyMaterialError(Exception):
    """Base class for secret key errors."""

    pass


class KeyDimensionError(KeyMaterialError, ValueError):
    """Invalid key dimensions (d < 2, k > d, message length mismatch)."""

    pass


class KeyFileError(KeyMaterialError):
    """Key file is corrupt or of the wrong kind."""

    pass


class MessageFormatError(KeyMaterialError, ValueError):
    """A message string cannot be parsed."""

    pass
