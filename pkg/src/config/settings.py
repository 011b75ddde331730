"""Application settings and configuration.

This module contains all the configuration settings for the application
using pydantic-settings.
It reads configuration from environment variables and .env files.
"""

from typing import Optional, Tuple

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class CoreSettings(BaseSettings):
    """Application settings."""

    log_level: str = Field(default="INFO")
    log_dir: str = Field(default="logs", description="Directory for app.log")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


class ExtractorSettings(BaseSettings):
    """Feature extractor and whitening configuration."""

    widths: Tuple[int, ...] = Field(
        default=(16, 32, 64, 128),
        description="Output channels of the conv blocks; the last one is D_raw",
    )
    kernel_size: int = Field(default=3)
    stride: int = Field(default=2)
    seed: int = Field(default=0, description="Seed for generated weights")
    # When set, weights are read from this LMWT file instead of being seeded.
    weights_path: Optional[str] = Field(default=None)
    whitened_dim: int = Field(default=64, description="Dimension d of F")
    whitening_eps: float = Field(default=1e-6, description="Eigenvalue floor")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="extractor_",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator("weights_path", mode="before")
    @classmethod
    def empty_str_to_none(cls, v):
        if v == "":
            return None
        return v


class MarkingSettings(BaseSettings):
    """Default hyperparameters of the embedding loop."""

    target_psnr: float = Field(default=40.0)
    target_fpr: float = Field(default=1e-6)
    lambda_zero_bit: float = Field(default=1.0)
    lambda_multi_bit: float = Field(default=5e4)
    margin: float = Field(default=5.0)
    iterations: int = Field(default=100)
    learning_rate: float = Field(default=0.01)
    augmentations_per_iter: int = Field(default=1)
    # The untransformed image joins every batch of sampled transforms.
    anchor_identity: bool = Field(default=True)
    seed: int = Field(default=0)
    max_requantize_steps: int = Field(
        default=50, description="Shrink attempts when rounding breaks the PSNR"
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="marking_",
        env_file_encoding="utf-8",
        extra="ignore",
    )


class EvalSettings(BaseSettings):
    """Settings for evaluation runs."""

    jobs: int = Field(default=1, description="Worker threads for corpus loops")
    noise_images: int = Field(
        default=10_000, description="Unmarked noise images for the FP sweep"
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="eval_",
        env_file_encoding="utf-8",
        extra="ignore",
    )


class Settings(BaseModel):
    """Application settings."""

    core: CoreSettings = CoreSettings()
    extractor: ExtractorSettings = ExtractorSettings()
    marking: MarkingSettings = MarkingSettings()
    evaluation: EvalSettings = EvalSettings()


settings = Settings()
