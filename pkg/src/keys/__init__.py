from .rng import make_rng, spawn_rngs
from .carriers import (
    Message,
    MultiBitKey,
    ZeroBitKey,
    gen_multi_bit_key,
    gen_zero_bit_key,
)
from .storage import SecretKey, load_key, save_key
from .errors import KeyMaterialError, KeyDimensionError, KeyFileError, MessageFormatError

__all__ = [
    "make_rng",
    "spawn_rngs",
    "Message",
    "MultiBitKey",
    "ZeroBitKey",
    "gen_multi_bit_key",
    "gen_zero_bit_key",
    "SecretKey",
    "load_key",
    "save_key",
    "KeyMaterialError",
    "KeyDimensionError",
    "KeyFileError",
    "MessageFormatError",
]
