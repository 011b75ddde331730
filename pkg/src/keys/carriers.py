"""Secret carriers and messages."""

import re
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import torch

from config.logger import get_logger
from .errors import KeyDimensionError, MessageFormatError
from .rng import make_rng

logger = get_logger(__name__)

UNIT_NORM_TOL = 1e-12
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class ZeroBitKey:
    """Unit carrier ``a`` in R^d."""

    carrier: torch.Tensor
    seed: int = -1

    def __post_init__(self):
        a = torch.as_tensor(self.carrier, dtype=torch.float64).detach().clone()
        if a.ndim != 1 or a.shape[0] < 2:
            raise KeyDimensionError(f"Zero-bit carrier must be a vector with d >= 2, got {tuple(a.shape)}")
        if abs(float(torch.linalg.vector_norm(a)) - 1.0) > UNIT_NORM_TOL:
            raise KeyDimensionError("Zero-bit carrier must have unit norm")
        object.__setattr__(self, "carrier", a)

    @property
    def d(self) -> int:
        return int(self.carrier.shape[0])


@dataclass(frozen=True)
class MultiBitKey:
    """Orthonormal carriers ``a_1..a_k`` stored as the rows of a k×d matrix."""

    carriers: torch.Tensor
    seed: int = -1

    def __post_init__(self):
        a = torch.as_tensor(self.carriers, dtype=torch.float64).detach().clone()
        if a.ndim != 2:
            raise KeyDimensionError(f"Carriers must be a k×d matrix, got {tuple(a.shape)}")
        k, d = a.shape
        if k < 1 or k > d:
            raise KeyDimensionError(f"Need 1 <= k <= d, got k={k}, d={d}")
        gram = a @ a.T
        if float((gram - torch.eye(k, dtype=torch.float64)).abs().max()) > ORTHO_TOL:
            raise KeyDimensionError("Carriers are not orthonormal")
        object.__setattr__(self, "carriers", a)

    @property
    def k(self) -> int:
        return int(self.carriers.shape[0])

    @property
    def d(self) -> int:
        return int(self.carriers.shape[1])


@dataclass(frozen=True)
class Message:
    """Bits as ±1 values."""

    bits: Tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits or any(b not in (-1, 1) for b in bits):
            raise MessageFormatError("Message bits must be a non-empty sequence of ±1")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def k(self) -> int:
        return len(self.bits)

    def as_tensor(self) -> torch.Tensor:
        return torch.tensor(self.bits, dtype=torch.float64)

    @classmethod
    def from_signs(cls, values: Sequence[float]) -> "Message":
        """sign(v) with sign(0) := +1."""
        return cls(tuple(1 if float(v) >= 0 else -1 for v in values))

    @classmethod
    def random(cls, k: int, rng: np.random.Generator) -> "Message":
        return cls(tuple(int(v) for v in rng.choice([-1, 1], size=k)))

    @classmethod
    def parse(cls, text: str, k: int) -> "Message":
        """Parses a bit string (``0101...``, exactly k chars) or a hex string.

        Hex must carry a ``0x`` prefix and its value must fit in k bits; it is
        expanded MSB-first to k bits. Bit b maps to 2b - 1.
        """
        text = text.strip()
        if k < 1:
            raise MessageFormatError(f"k must be positive, got {k}")
        if text.lower().startswith("0x"):
            digits = text[2:].replace("_", "")
            if not digits or not re.fullmatch(r"[0-9a-fA-F]+", digits):
                raise MessageFormatError(f"Invalid hex message '{text}'")
            value = int(digits, 16)
            if value >= 1 << k:
                raise MessageFormatError(f"Hex message '{text}' does not fit in {k} bits")
            bitstring = format(value, f"0{k}b")
        else:
            bitstring = text.replace("_", "")
            if not re.fullmatch(r"[01]+", bitstring):
                raise MessageFormatError(f"Message '{text}' is neither a bit string nor 0x-hex")
            if len(bitstring) != k:
                raise MessageFormatError(
                    f"Message has {len(bitstring)} bits, key carries k={k}"
                )
        return cls(tuple(2 * int(ch) - 1 for ch in bitstring))

    def to_bitstring(self) -> str:
        return "".join("1" if b > 0 else "0" for b in self.bits)

    def to_hex(self) -> str:
        return hex(int(self.to_bitstring(), 2))


def gen_zero_bit_key(seed: int, d: int) -> ZeroBitKey:
    """Uniform direction on the unit sphere: a normalized white Gaussian vector."""
    if d < 2:
        raise KeyDimensionError(f"d must be >= 2, got {d}")
    g = make_rng(seed).standard_normal(d)
    a = g / np.linalg.norm(g)
    logger.debug(f"Generated zero-bit key (seed={seed}, d={d})")
    return ZeroBitKey(torch.from_numpy(a), seed=seed)


def _orthonormalize(g: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on the rows with one reorthogonalization pass per row."""
    q = g.copy()
    for i in range(q.shape[0]):
        for _ in range(2):
            basis = q[:i]
            q[i] -= basis.T @ (basis @ q[i])
        q[i] /= np.linalg.norm(q[i])
    return q


def gen_multi_bit_key(seed: int, k: int, d: int) -> MultiBitKey:
    if d < 2:
        raise KeyDimensionError(f"d must be >= 2, got {d}")
    if not (1 <= k <= d):
        raise KeyDimensionError(f"Need 1 <= k <= d, got k={k}, d={d}")
    g = make_rng(seed).standard_normal((k, d))
    carriers = _orthonormalize(g)
    logger.debug(f"Generated multi-bit key (seed={seed}, k={k}, d={d})")
    return MultiBitKey(torch.from_numpy(carriers), seed=seed)
