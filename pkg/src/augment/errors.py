class AugmentError(Exception):
    """Base class for augmentation errors."""

    pass


class InvalidTransformError(AugmentError, ValueError):
    """Transform parameters outside their documented ranges."""

    pass


class DegenerateCropError(AugmentError, ValueError):
    """The crop window would be smaller than one pixel."""

    pass
