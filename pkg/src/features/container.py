"""The LMWT tensor container shared by weights, whitening and key files.

Layout, all integers little-endian::

    b"LMWT"  u32 version  u32 tensor_count
    per tensor:  u32 name_len, name (UTF-8), u8 dtype (0=f32, 1=f64),
                 u32 rank, rank x u64 dims, payload (little-endian floats)
    u32 metadata_count
    per entry:   u32 key_len, key (UTF-8), u32 value_len, value (UTF-8)
"""

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

import numpy as np
import torch

from config.logger import get_logger
from .errors import ContainerFormatError

logger = get_logger(__name__)

MAGIC = b"LMWT"
VERSION = 1

_DTYPE_CODES = {np.dtype("<f4"): 0, np.dtype("<f8"): 1}
_CODE_DTYPES = {code: dtype for dtype, code in _DTYPE_CODES.items()}

ArrayLike = Union[np.ndarray, torch.Tensor]


@dataclass
class Container:
    tensors: Dict[str, np.ndarray] = field(default_factory=dict)
    metadata: Dict[str, str] = field(default_factory=dict)

    def tensor(self, name: str) -> np.ndarray:
        if name not in self.tensors:
            raise ContainerFormatError(f"Missing tensor '{name}'")
        return self.tensors[name]

    def meta(self, key: str) -> str:
        if key not in self.metadata:
            raise ContainerFormatError(f"Missing metadata '{key}'")
        return self.metadata[key]


def _to_numpy(value: ArrayLike) -> np.ndarray:
    if isinstance(value, torch.Tensor):
        value = value.detach().cpu().numpy()
    arr = np.asarray(value)
    if arr.dtype == np.float32:
        return arr.astype("<f4", copy=False)
    if arr.dtype == np.float64:
        return arr.astype("<f8", copy=False)
    raise ContainerFormatError(f"Unsupported tensor dtype {arr.dtype}")


def _pack_str(value: str) -> bytes:
    raw = value.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


def encode_container(
    tensors: Mapping[str, ArrayLike], metadata: Optional[Mapping[str, str]] = None
) -> bytes:
    metadata = metadata or {}
    parts = [MAGIC, struct.pack("<II", VERSION, len(tensors))]
    for name, value in tensors.items():
        arr = _to_numpy(value)
        parts.append(_pack_str(name))
        parts.append(struct.pack("<BI", _DTYPE_CODES[arr.dtype], arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        parts.append(np.ascontiguousarray(arr).tobytes())
    parts.append(struct.pack("<I", len(metadata)))
    for key, value in metadata.items():
        parts.append(_pack_str(key))
        parts.append(_pack_str(str(value)))
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, size: int) -> memoryview:
        if self.pos + size > len(self.data):
            raise ContainerFormatError("Truncated LMWT data")
        chunk = self.data[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def string(self) -> str:
        (length,) = self.unpack("<I")
        try:
            return bytes(self.take(length)).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ContainerFormatError(f"Invalid UTF-8 in LMWT data: {e}") from e


def decode_container(data: bytes) -> Container:
    reader = _Reader(data)
    if bytes(reader.take(len(MAGIC))) != MAGIC:
        raise ContainerFormatError("Bad magic: not an LMWT file")
    version, count = reader.unpack("<II")
    if version != VERSION:
        raise ContainerFormatError(f"Unsupported LMWT version {version}")

    container = Container()
    for _ in range(count):
        name = reader.string()
        code, rank = reader.unpack("<BI")
        if code not in _CODE_DTYPES:
            raise ContainerFormatError(f"Unknown dtype code {code} for '{name}'")
        dims = reader.unpack(f"<{rank}Q") if rank else ()
        dtype = _CODE_DTYPES[code]
        size = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
        payload = reader.take(size)
        container.tensors[name] = np.frombuffer(payload, dtype=dtype).reshape(dims).copy()

    (meta_count,) = reader.unpack("<I")
    for _ in range(meta_count):
        key = reader.string()
        container.metadata[key] = reader.string()

    if reader.pos != len(reader.data):
        raise ContainerFormatError("Trailing bytes after LMWT data")
    return container


def write_container(
    path: Union[str, Path],
    tensors: Mapping[str, ArrayLike],
    metadata: Optional[Mapping[str, str]] = None,
) -> None:
    path = Path(path)
    payload = encode_container(tensors, metadata)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        logger.error(f"Failed to write LMWT file {path}: {e}")
        raise ContainerFormatError(f"Could not write {path}: {e}") from e
    logger.debug(f"Wrote LMWT file {path} ({len(tensors)} tensors, {len(payload)} bytes)")


def read_container(path: Union[str, Path]) -> Container:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        logger.error(f"Failed to read LMWT file {path}: {e}")
        raise ContainerFormatError(f"Could not read {path}: {e}") from e
    return decode_container(data)
