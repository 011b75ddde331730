"""Embedding configuration and report models."""

import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from augment import ALL_KINDS, TransformKind
from config.settings import settings
from keys import Message
from stats import angle_of_fpr
from .errors import EmbedConfigError

MODE_ZERO_BIT = "zero-bit"
MODE_MULTI_BIT = "multi-bit"


class EmbedConfig(BaseModel):
    """Hyperparameters of one embedding run.

    Exactly one of ``target_fpr`` (zero-bit) or ``message`` (multi-bit) is
    set. ``lambda_w`` defaults per mode from settings when left unset.
    """

    model_config = ConfigDict(
        frozen=True, arbitrary_types_allowed=True, populate_by_name=True
    )

    target_psnr: float = Field(default_factory=lambda: settings.marking.target_psnr, gt=0)
    target_fpr: Optional[float] = Field(default=None, gt=0, lt=1)
    message: Optional[Message] = None
    lambda_w: Optional[float] = Field(default=None, alias="lambda", ge=0)
    margin: float = Field(default_factory=lambda: settings.marking.margin, ge=0)
    iterations: int = Field(default_factory=lambda: settings.marking.iterations, ge=1)
    learning_rate: float = Field(default_factory=lambda: settings.marking.learning_rate, gt=0)
    augmentations_per_iter: int = Field(
        default_factory=lambda: settings.marking.augmentations_per_iter, ge=1
    )
    anchor_identity: bool = Field(default_factory=lambda: settings.marking.anchor_identity)
    augmentations: Tuple[TransformKind, ...] = ALL_KINDS
    max_rotation: float = Field(default=math.pi / 2, ge=0, le=math.pi / 2)
    flips: bool = True
    seed: int = Field(default_factory=lambda: settings.marking.seed)
    max_requantize_steps: int = Field(
        default_factory=lambda: settings.marking.max_requantize_steps, ge=0
    )

    @model_validator(mode="after")
    def check_mode(self) -> "EmbedConfig":
        if (self.target_fpr is None) == (self.message is None):
            raise EmbedConfigError("Set exactly one of target_fpr (zero-bit) or message (multi-bit)")
        if not math.isfinite(self.target_psnr):
            raise EmbedConfigError("target_psnr must be finite")
        if not self.augmentations:
            raise EmbedConfigError("At least one augmentation kind is required")
        return self

    @property
    def mode(self) -> str:
        return MODE_ZERO_BIT if self.message is None else MODE_MULTI_BIT

    @property
    def is_zero_bit(self) -> bool:
        return self.message is None

    @property
    def weight(self) -> float:
        if self.lambda_w is not None:
            return self.lambda_w
        if self.is_zero_bit:
            return settings.marking.lambda_zero_bit
        return settings.marking.lambda_multi_bit

    def theta(self, d: int) -> Optional[float]:
        """Hypercone half-angle for the target FPR (zero-bit only)."""
        if self.target_fpr is None:
            return None
        return angle_of_fpr(self.target_fpr, d)


class EmbedReport(BaseModel):
    """Outcome of one embedding, measured on the rounded 8-bit output."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    mode: str
    target_psnr: float
    final_psnr: float
    in_region: bool
    # zero-bit
    theta: Optional[float] = None
    score: Optional[float] = None
    p_value: Optional[float] = None
    # multi-bit
    margins: Optional[List[float]] = None
    decoded: Optional[str] = None
    bit_errors: Optional[int] = None

    iterations: int
    weight: float
    requantize_steps: int = 0
    loss_trace: List[float] = Field(default_factory=list)
