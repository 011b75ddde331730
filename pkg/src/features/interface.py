import abc

import torch


class AbstractFeatureExtractor(abc.ABC):
    """Abstract interface for differentiable image feature extractors."""

    @abc.abstractmethod
    def forward(self, pixels: torch.Tensor) -> torch.Tensor:
        """
        Computes raw features.

        Args:
            pixels: A ``(3, H, W)`` image or a ``(N, 3, H, W)`` batch.

        Returns:
            A ``(D_raw,)`` vector, or ``(N, D_raw)`` for a batch. The result
            keeps the autograd graph when ``pixels`` requires grad.
        """
        raise NotImplementedError

    @abc.abstractmethod
    def input_gradient(self, pixels: torch.Tensor, cotangent: torch.Tensor) -> torch.Tensor:
        """
        Gradient of ``<forward(pixels), cotangent>`` w.r.t. the pixels.
        """
        raise NotImplementedError

    @abc.abstractmethod
    def get_raw_dimension(self) -> int:
        """
        Returns the dimension D_raw of the raw features.
        """
        raise NotImplementedError

    @abc.abstractmethod
    def get_min_input_size(self) -> int:
        """
        Returns the smallest accepted image side.
        """
        raise NotImplementedError
