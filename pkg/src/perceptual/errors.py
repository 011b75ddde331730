class PerceptualError(Exception):
    """Base class for perceptual constraint errors."""

    pass


class WindowSizeError(PerceptualError, ValueError):
    """The image is smaller than the SSIM window."""

    pass
