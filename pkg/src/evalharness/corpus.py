"""Synthetic image corpora and newline-separated manifests."""

import math
import os
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import torch

from augment import gaussian_blur
from config.logger import get_logger
from imaging import Image, dequantize, load_image, quantize, save_image
from keys import spawn_rngs
from .errors import EmptyCorpusError, ManifestError

logger = get_logger(__name__)

PathLike = Union[str, os.PathLike]

MANIFEST_NAME = "manifest.txt"


def _on_grid(pixels: torch.Tensor) -> Image:
    return Image(dequantize(quantize(pixels)))


def synthetic_image(rng: np.random.Generator, height: int, width: int) -> Image:
    """A textured image: colour gradient, smoothed noise, rectangles and stripes.

    Samples are on the 8-bit grid so that saving and reloading is lossless.
    """
    ys = torch.linspace(0.0, 1.0, height, dtype=torch.float64).view(height, 1)
    xs = torch.linspace(0.0, 1.0, width, dtype=torch.float64).view(1, width)

    direction = rng.uniform(0.0, 2.0 * math.pi)
    ramp = (math.cos(direction) * xs + math.sin(direction) * ys + 1.0) / 2.0
    c0 = torch.from_numpy(rng.uniform(0.1, 0.9, 3)).view(3, 1, 1)
    c1 = torch.from_numpy(rng.uniform(0.1, 0.9, 3)).view(3, 1, 1)
    img = c0 + (c1 - c0) * ramp

    noise = torch.from_numpy(rng.standard_normal((3, height, width)))
    sigma = float(rng.uniform(1.0, 3.0))
    size = min(2 * math.ceil(3 * sigma) + 1, 2 * min(height, width) - 1)
    img = img + 0.15 * gaussian_blur(noise.unsqueeze(0), size, sigma).squeeze(0)

    for _ in range(int(rng.integers(1, 5))):
        h = int(rng.integers(max(1, height // 8), max(2, height // 2)))
        w = int(rng.integers(max(1, width // 8), max(2, width // 2)))
        y0 = int(rng.integers(0, height - h + 1))
        x0 = int(rng.integers(0, width - w + 1))
        colour = torch.from_numpy(rng.uniform(0.0, 1.0, 3)).view(3, 1, 1)
        alpha = float(rng.uniform(0.3, 0.8))
        patch = img[:, y0 : y0 + h, x0 : x0 + w]
        img[:, y0 : y0 + h, x0 : x0 + w] = (1 - alpha) * patch + alpha * colour

    freq = float(rng.uniform(2.0, 12.0))
    angle = rng.uniform(0.0, math.pi)
    phase = math.cos(angle) * xs + math.sin(angle) * ys
    img = img + 0.08 * torch.sin(2.0 * math.pi * freq * phase)

    return _on_grid(torch.clamp(img, 0.0, 1.0))


def noise_image(rng: np.random.Generator, height: int, width: int) -> Image:
    """Uniform white noise on the 8-bit grid."""
    return _on_grid(torch.from_numpy(rng.uniform(0.0, 1.0, (3, height, width))))


def synthetic_corpus(n: int, size: int, seed: int) -> List[Image]:
    """``n`` square synthetic images; image i depends only on (seed, i)."""
    return [synthetic_image(rng, size, size) for rng in spawn_rngs(seed, n)]


def write_manifest(paths: Sequence[PathLike], manifest: PathLike) -> Path:
    """Writes one path per line, relative to the manifest's directory when possible."""
    manifest = Path(manifest)
    manifest.parent.mkdir(parents=True, exist_ok=True)
    base = manifest.parent.resolve()
    lines = []
    for p in paths:
        resolved = Path(p).resolve()
        try:
            lines.append(str(resolved.relative_to(base)))
        except ValueError:
            lines.append(str(resolved))
    manifest.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    return manifest


def read_manifest(manifest: PathLike) -> List[Path]:
    """Image paths listed in ``manifest``; blank lines and '#' comments skipped."""
    manifest = Path(manifest)
    try:
        text = manifest.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read manifest {manifest}: {e}")
        raise ManifestError(f"Cannot read manifest {manifest}: {e}") from e
    paths = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        p = Path(line)
        paths.append(p if p.is_absolute() else manifest.parent / p)
    if not paths:
        raise EmptyCorpusError(f"Manifest {manifest} lists no images")
    return paths


def load_corpus(manifest: PathLike) -> List[Image]:
    return [load_image(p) for p in read_manifest(manifest)]


def write_corpus(out_dir: PathLike, n: int, size: int, seed: int) -> Path:
    """Saves a synthetic corpus as PNGs plus ``manifest.txt``; returns the manifest."""
    if n < 1:
        raise EmptyCorpusError("Corpus size must be at least 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, img in enumerate(synthetic_corpus(n, size, seed)):
        path = out / f"img_{i:04d}.png"
        save_image(img, path)
        paths.append(path)
    logger.info(f"Wrote {n} synthetic {size}x{size} images to {out}")
    return write_manifest(paths, out / MANIFEST_NAME)
