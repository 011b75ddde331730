"""Resolved per-run configuration: settings defaults < --config file < flags."""

from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field

from config.logger import get_logger
from config.settings import settings
from .errors import ConfigFileError

logger = get_logger(__name__)


class RunConfig(BaseModel):
    """Everything a command needs besides its positional arguments."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)

    command: str
    key: Optional[str] = None
    weights: Optional[str] = None
    whitening: Optional[str] = None
    psnr: float = Field(default_factory=lambda: settings.marking.target_psnr, gt=0)
    fpr: Optional[float] = Field(default=None, gt=0, lt=1)
    message: Optional[str] = None
    iters: int = Field(default_factory=lambda: settings.marking.iterations, ge=1)
    lr: float = Field(default_factory=lambda: settings.marking.learning_rate, gt=0)
    lambda_w: Optional[float] = Field(default=None, alias="lambda", ge=0)
    margin: float = Field(default_factory=lambda: settings.marking.margin, ge=0)
    seed: int = Field(default_factory=lambda: settings.marking.seed)
    jobs: int = Field(default_factory=lambda: settings.evaluation.jobs, ge=1)
    augment: Optional[str] = None
    out: Optional[str] = None
    report: Optional[str] = None


def load_config_file(path: str) -> Dict[str, str]:
    """Reads a flat ``key=value`` file; '#' comments and blank lines are skipped.

    Keys are lower-cased and dashes mapped to underscores, so ``max-iters``
    and ``MAX_ITERS`` name the same setting.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigFileError(f"Config file not found: {path}")
    try:
        values = dotenv_values(p)
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigFileError(f"Cannot read config file {path}: {e}") from e
    return {
        k.strip().lower().replace("-", "_"): v
        for k, v in values.items()
        if v is not None
    }


def resolve_run_config(
    command: str, config_path: Optional[str] = None, **flags: Any
) -> RunConfig:
    """Layers the config file under the explicitly given flags.

    Flags left at ``None`` do not override. ``lambda`` is passed under its
    own name since it is a Python keyword.
    """
    data: Dict[str, Any] = {}
    if config_path:
        data.update(load_config_file(config_path))
    data.update({k: v for k, v in flags.items() if v is not None})
    if "lambda_w" in data:
        data["lambda"] = data.pop("lambda_w")
    data["command"] = command
    run = RunConfig.model_validate(data)
    logger.info(f"Resolved config: {run.model_dump_json(by_alias=True)}")
    return run
