class ImagingError(Exception):
    """Base class for image representation and I/O errors."""

    pass


class ImageReadError(ImagingError):
    """Error while reading an image file (missing, unreadable, bad format)."""

    pass


class ImageWriteError(ImagingError):
    """Error while writing an image file."""

    pass


class UnsupportedImageError(ImageReadError):
    """The file is a valid image but not one this toolkit handles."""

    pass


class ShapeMismatchError(ImagingError, ValueError):
    """Two images (or an image and a delta) do not have the same shape."""

    pass
