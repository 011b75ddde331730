"""The marking space: extractor followed by whitening."""

from dataclasses import dataclass

import torch

from imaging import ImageLike, as_pixels
from .errors import DimensionMismatchError
from .interface import AbstractFeatureExtractor
from .whitening import WhiteningTransform


@dataclass(frozen=True)
class FeatureSpace:
    """``extract = W (forward - mean)``; immutable and shareable across threads."""

    extractor: AbstractFeatureExtractor
    whitening: WhiteningTransform

    def __post_init__(self):
        if self.extractor.get_raw_dimension() != self.whitening.raw_dim:
            raise DimensionMismatchError(
                f"Extractor outputs {self.extractor.get_raw_dimension()} dims, "
                f"whitening expects {self.whitening.raw_dim}"
            )

    @property
    def dim(self) -> int:
        return self.whitening.dim

    @property
    def min_input_size(self) -> int:
        return self.extractor.get_min_input_size()

    def features(self, pixels: torch.Tensor) -> torch.Tensor:
        """Differentiable extraction for a ``(3, H, W)`` tensor or a batch."""
        return self.whitening.apply(self.extractor.forward(pixels))

    def extract(self, img: ImageLike) -> torch.Tensor:
        with torch.no_grad():
            return self.features(as_pixels(img).to(torch.float64))

    def extract_batch(self, batch: torch.Tensor) -> torch.Tensor:
        with torch.no_grad():
            return self.features(batch.to(torch.float64))

    def extract_gradient(self, img: ImageLike, cotangent: torch.Tensor) -> torch.Tensor:
        """Gradient of ``<extract(img), cotangent>`` w.r.t. the pixels."""
        x = as_pixels(img).detach().to(torch.float64).requires_grad_(True)
        with torch.enable_grad():
            out = self.features(x)
            (grad,) = torch.autograd.grad(out, x, grad_outputs=cotangent.to(out.dtype))
        return grad
