"""Binary checkpoints for ChannelNet models.

Layout (little-endian throughout)::

    b"CHNET"  uint16 version
    uint32 config length, config as UTF-8 JSON (sorted keys)
    uint32 parameter count
    per parameter, in declaration order:
        uint16 path length, UTF-8 path, uint8 ndim, uint32 dims..., float64 data (row-major)

A JSON metadata sidecar (``<checkpoint>.json``) records the config, seed, scenario and
epoch count for humans and tooling; loading never depends on it.
"""

from __future__ import annotations

import json
import logging
import os
import struct
import tempfile
from pathlib import Path

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from channelnet.exceptions import CheckpointError, ConfigurationError
from channelnet.network import ChannelNetConfig, ChannelNetModel

logger = logging.getLogger(__name__)

MAGIC = b"CHNET"
FORMAT_VERSION = 1


def encode_model(model: ChannelNetModel) -> bytes:
    config = json.dumps(model.config.as_dict(), sort_keys=True, separators=(",", ":"))
    config_bytes = config.encode()
    params = model.parameters()
    chunks = [
        MAGIC,
        struct.pack("<H", FORMAT_VERSION),
        struct.pack("<I", len(config_bytes)),
        config_bytes,
        struct.pack("<I", len(params)),
    ]
    for path, value in params.items():
        path_bytes = path.encode()
        chunks.append(struct.pack("<H", len(path_bytes)))
        chunks.append(path_bytes)
        chunks.append(struct.pack(f"<B{value.ndim}I", value.ndim, *value.shape))
        chunks.append(np.ascontiguousarray(value, dtype="<f8").tobytes(order="C"))
    return b"".join(chunks)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.offset = 0

    def take(self, size, what):
        end = self.offset + size
        if end > len(self.data):
            raise CheckpointError(f"checkpoint truncated while reading {what}")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt, what):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode_model(data: bytes) -> ChannelNetModel:
    reader = _Reader(data)
    if reader.take(len(MAGIC), "magic") != MAGIC:
        raise CheckpointError("not a ChannelNet checkpoint (bad magic)")
    (version,) = reader.unpack("<H", "version")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format version {version}")
    (config_length,) = reader.unpack("<I", "config length")
    try:
        config = ChannelNetConfig.from_dict(
            json.loads(reader.take(config_length, "config").decode())
        )
    except (ValueError, TypeError, ConfigurationError) as exc:
        raise CheckpointError(f"invalid config block: {exc}") from exc

    model = ChannelNetModel(config, initialize=False)
    expected = model.parameters()
    (count,) = reader.unpack("<I", "parameter count")
    if count != len(expected):
        raise CheckpointError(
            f"checkpoint holds {count} arrays, config needs {len(expected)}"
        )
    for path, target in expected.items():
        (path_length,) = reader.unpack("<H", "path length")
        stored_path = reader.take(path_length, "path").decode()
        if stored_path != path:
            raise CheckpointError(f"expected parameter {path!r}, found {stored_path!r}")
        (ndim,) = reader.unpack("<B", f"{path} rank")
        shape = reader.unpack(f"<{ndim}I", f"{path} shape")
        if shape != target.shape:
            raise CheckpointError(f"{path} has shape {shape}, config needs {target.shape}")
        raw = reader.take(8 * target.size, f"{path} data")
        target[...] = np.frombuffer(raw, dtype="<f8").reshape(shape)
    if reader.offset != len(data):
        raise CheckpointError("trailing bytes after the last parameter")
    return model


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def save_model(model: ChannelNetModel, path, metadata=None):
    """Write the checkpoint atomically, plus its metadata sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, encode_model(model))
    sidecar = {
        "format_version": FORMAT_VERSION,
        "config": model.config.as_dict(),
        "seed": model.seed,
        **(metadata or {}),
    }
    _atomic_write(
        sidecar_path(path),
        json.dumps(sidecar, cls=DjangoJSONEncoder, indent=2, sort_keys=True).encode(),
    )
    logger.info(f"Saved checkpoint {path}")
    return path


def load_model(path) -> ChannelNetModel:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    model = decode_model(data)
    sidecar = sidecar_path(path)
    if sidecar.exists():
        try:
            model.seed = json.loads(sidecar.read_text()).get("seed", model.seed)
        except ValueError:
            logger.warning(f"Ignoring unreadable metadata sidecar {sidecar}")
    return model


def load_metadata(path):
    return json.loads(sidecar_path(path).read_text())


def _atomic_write(path, data):
    handle, temporary = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(handle, "wb") as stream:
            stream.write(data)
        os.replace(temporary, path)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
