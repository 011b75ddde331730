"""Lossless image file I/O (8-bit PNG and binary PPM)."""

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from config.logger import get_logger
from .errors import ImageReadError, ImageWriteError, UnsupportedImageError
from .image import Image

logger = get_logger(__name__)

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
PPM_SIGNATURE = b"P6"

# Suffix -> PIL format name used by save_image.
SAVE_FORMATS = {".png": "PNG", ".ppm": "PPM"}

PathLike = Union[str, Path]


def _sniff_format(path: Path) -> str:
    with path.open("rb") as fh:
        header = fh.read(26)
    if header.startswith(PNG_SIGNATURE):
        # IHDR: width(4) height(4) bit depth(1) at offset 24.
        if len(header) < 25:
            raise ImageReadError(f"Truncated PNG header: {path}")
        bit_depth = header[24]
        if bit_depth != 8 and not (header[25] in (0, 3) and bit_depth < 8):
            raise UnsupportedImageError(f"unsupported bit depth {bit_depth}: {path}")
        return "PNG"
    if header.startswith(PPM_SIGNATURE):
        return "PPM"
    raise UnsupportedImageError(f"Unsupported image format (PNG or P6 PPM): {path}")


def load_image(path: PathLike) -> Image:
    """Reads a PNG or binary PPM file into an Image.

    Samples are mapped to [0, 1] by ``v / 255``. Grayscale and palette images
    are expanded to RGB; anything else that is not 3-channel is rejected.
    """
    path = Path(path)
    if not path.is_file():
        raise ImageReadError(f"Image file not found: {path}")

    try:
        fmt = _sniff_format(path)
        with PILImage.open(path) as pil:
            pil.load()
            mode = pil.mode
            if mode in ("I", "I;16", "I;16B", "F"):
                raise UnsupportedImageError(f"unsupported bit depth ({mode}): {path}")
            if mode in ("L", "P", "1"):
                pil = pil.convert("RGB")
            elif mode != "RGB":
                raise UnsupportedImageError(
                    f"Expected a 3-channel image, got mode {mode}: {path}"
                )
            array = np.asarray(pil, dtype=np.uint8)
    except (UnsupportedImageError, ImageReadError):
        raise
    except (OSError, UnidentifiedImageError) as e:
        logger.error(f"Failed to read image {path}: {e}")
        raise ImageReadError(f"Could not read image {path}: {e}") from e

    logger.debug(f"Loaded {fmt} image {path} ({array.shape[0]}x{array.shape[1]})")
    return Image.from_array(array)


def _format_for(path: Path) -> str:
    fmt = SAVE_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise ImageWriteError(
            f"Cannot infer format from extension '{path.suffix}' "
            f"(expected one of {sorted(SAVE_FORMATS)})"
        )
    return fmt


def save_image(img: Image, path: PathLike) -> None:
    """Writes an Image, quantizing samples with ``round(255 v)`` clamped to [0, 255].

    The format (PNG or PPM) is chosen by the file extension.
    """
    path = Path(path)
    fmt = _format_for(path)
    try:
        PILImage.fromarray(img.to_uint8()).save(path, format=fmt)
    except OSError as e:
        logger.error(f"Failed to write image {path}: {e}")
        raise ImageWriteError(f"Could not write image {path}: {e}") from e
    logger.debug(f"Saved {fmt} image {path}")


def save_grayscale(values: np.ndarray, path: PathLike) -> None:
    """Writes a 2-D map scaled to its own max as an 8-bit grayscale image."""
    path = Path(path)
    fmt = _format_for(path)
    arr = np.asarray(values, dtype=np.float64)
    peak = float(arr.max()) if arr.size else 0.0
    scaled = arr / peak if peak > 0 else np.zeros_like(arr)
    levels = np.floor(np.clip(scaled * 255.0, 0.0, 255.0) + 0.5).astype(np.uint8)
    try:
        if fmt == "PPM":
            PILImage.fromarray(levels).convert("RGB").save(path, format=fmt)
        else:
            PILImage.fromarray(levels).save(path, format=fmt)
    except OSError as e:
        logger.error(f"Failed to write map {path}: {e}")
        raise ImageWriteError(f"Could not write map {path}: {e}") from e
