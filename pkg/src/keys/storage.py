"""Key files in the LMWT container."""

from pathlib import Path
from typing import Union

import numpy as np
import torch

from config.logger import get_logger
from features.container import read_container, write_container
from features.errors import ContainerFormatError
from .carriers import MultiBitKey, ZeroBitKey
from .errors import KeyFileError, KeyMaterialError

logger = get_logger(__name__)

SecretKey = Union[ZeroBitKey, MultiBitKey]

KIND_ZERO = "zero"
KIND_MULTI = "multi"


def save_key(key: SecretKey, path: Union[str, Path]) -> None:
    """Writes ``carriers`` (k×d, float64) with metadata ``kind`` and ``seed``."""
    if isinstance(key, ZeroBitKey):
        kind, carriers = KIND_ZERO, key.carrier.unsqueeze(0)
    else:
        kind, carriers = KIND_MULTI, key.carriers
    write_container(
        path, {"carriers": carriers}, metadata={"kind": kind, "seed": str(key.seed)}
    )
    logger.info(f"Saved {kind}-bit key (d={key.d}) to {path}")


def load_key(path: Union[str, Path]) -> SecretKey:
    try:
        container = read_container(path)
        kind = container.meta("kind")
        carriers = container.tensor("carriers")
        seed = int(container.metadata.get("seed", "-1"))
    except ContainerFormatError as e:
        logger.error(f"Corrupt key file {path}: {e}")
        raise KeyFileError(f"Corrupt key file {path}: {e}") from e
    except ValueError as e:
        raise KeyFileError(f"Corrupt key metadata in {path}: {e}") from e

    if carriers.ndim != 2 or carriers.dtype != np.float64:
        raise KeyFileError(f"Key file {path} must hold a float64 k×d 'carriers' tensor")
    tensor = torch.from_numpy(carriers)
    try:
        if kind == KIND_ZERO:
            if carriers.shape[0] != 1:
                raise KeyFileError(f"Zero-bit key file {path} holds {carriers.shape[0]} carriers")
            return ZeroBitKey(tensor[0], seed=seed)
        if kind == KIND_MULTI:
            return MultiBitKey(tensor, seed=seed)
    except KeyFileError:
        raise
    except KeyMaterialError as e:
        raise KeyFileError(f"Invalid key material in {path}: {e}") from e
    raise KeyFileError(f"Unknown key kind '{kind}' in {path}")
