"""PCA-whitening of raw extractor features."""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import torch

from config.logger import get_logger
from .container import read_container, write_container
from .errors import ContainerFormatError, DimensionMismatchError, WhiteningError

logger = get_logger(__name__)

WHITENING_KIND = "whitening"
DEFAULT_EPS = 1e-6


@dataclass(frozen=True)
class WhiteningTransform:
    """Affine map ``x -> W (x - mean)`` to d centered, unit-covariance dims."""

    mean: torch.Tensor  # (D_raw,)
    matrix: torch.Tensor  # (d, D_raw)

    def __post_init__(self):
        mean = torch.as_tensor(self.mean, dtype=torch.float64).detach().clone()
        matrix = torch.as_tensor(self.matrix, dtype=torch.float64).detach().clone()
        if mean.ndim != 1 or matrix.ndim != 2 or matrix.shape[1] != mean.shape[0]:
            raise DimensionMismatchError(
                f"Whitening mean {tuple(mean.shape)} and matrix "
                f"{tuple(matrix.shape)} are inconsistent"
            )
        if not torch.isfinite(matrix).all() or not torch.isfinite(mean).all():
            raise WhiteningError("Whitening parameters must be finite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def raw_dim(self) -> int:
        return int(self.matrix.shape[1])

    def apply(self, raw: torch.Tensor) -> torch.Tensor:
        """Whitens a ``(D_raw,)`` vector or ``(N, D_raw)`` rows."""
        if raw.shape[-1] != self.raw_dim:
            raise DimensionMismatchError(
                f"Raw feature has {raw.shape[-1]} dims, whitening expects {self.raw_dim}"
            )
        return (raw - self.mean) @ self.matrix.T


def fit_whitening(samples, d: int, eps: float = DEFAULT_EPS) -> WhiteningTransform:
    """Fits PCA-whitening on raw feature rows.

    Keeps the top-``d`` eigenpairs of the sample covariance (``n - 1``
    normalization), floors eigenvalues at ``eps`` and returns
    ``W = diag(lambda)^(-1/2) U^T``. Eigenvector signs are fixed so that each
    one's largest-magnitude component is positive.
    """
    x = torch.as_tensor(np.asarray(samples), dtype=torch.float64)
    if x.ndim != 2:
        raise WhiteningError(f"Samples must be a 2-D array, got shape {tuple(x.shape)}")
    n, raw_dim = x.shape
    if d < 1 or d > raw_dim:
        raise WhiteningError(f"Whitened dimension {d} must be in [1, {raw_dim}]")
    if n < d + 1:
        raise WhiteningError(f"insufficient samples: {n} given, at least {d + 1} needed")
    if eps < 0:
        raise WhiteningError(f"eps must be non-negative, got {eps}")

    mean = x.mean(dim=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = torch.linalg.eigh(cov)
    # eigh sorts ascending; keep the top-d, largest first.
    eigvals = eigvals.flip(0)[:d]
    eigvecs = eigvecs.flip(1)[:, :d]

    scale = float(eigvals[0]) if d > 0 else 0.0
    degenerate = eigvals <= max(scale, 1.0) * 1e-12
    if eps == 0 and bool(degenerate.any()):
        raise WhiteningError(
            f"rank-deficient covariance: {int(degenerate.sum())} of the top {d} "
            "eigenvalues vanish and eps=0"
        )
    floored = torch.clamp(eigvals, min=eps) if eps > 0 else eigvals
    if int((eigvals < eps).sum()):
        logger.warning(f"{int((eigvals < eps).sum())} eigenvalues floored at eps={eps}")

    pivots = eigvecs.abs().argmax(dim=0)
    signs = torch.sign(eigvecs[pivots, torch.arange(d)])
    eigvecs = eigvecs * signs

    matrix = eigvecs.T / torch.sqrt(floored).unsqueeze(1)
    logger.info(
        f"Fitted whitening on {n} samples: D_raw={raw_dim} -> d={d}, "
        f"eigenvalue range [{float(eigvals[-1]):.3e}, {float(eigvals[0]):.3e}]"
    )
    return WhiteningTransform(mean=mean, matrix=matrix)


def save_whitening(whitening: WhiteningTransform, path: Union[str, Path]) -> None:
    write_container(
        path,
        {"mean": whitening.mean, "W": whitening.matrix},
        metadata={"kind": WHITENING_KIND},
    )
    logger.info(f"Saved whitening ({whitening.raw_dim} -> {whitening.dim}) to {path}")


def load_whitening(path: Union[str, Path]) -> WhiteningTransform:
    container = read_container(path)
    if container.metadata.get("kind") != WHITENING_KIND:
        raise ContainerFormatError(f"{path} is not a whitening file")
    return WhiteningTransform(
        mean=torch.from_numpy(container.tensor("mean").astype(np.float64)),
        matrix=torch.from_numpy(container.tensor("W").astype(np.float64)),
    )
