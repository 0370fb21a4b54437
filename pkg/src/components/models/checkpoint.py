"""
Checkpoint files shared by every architecture.

Layout, all integers little-endian:

    bytes 0-7     magic b"DOLFINCK"
    bytes 8-11    uint32 length H of the header
    next H bytes  UTF-8 JSON header (sorted keys)
    remainder     one float32 block per parameter, in the order of header["parameters"]

The header holds the architecture, the dimensions needed to rebuild the model, the
dataset name, category labels, the vocabulary hash and the run configuration, plus
`parameters`: a list of {"name", "shape"} entries. Files whose payload size does not
match the declared shapes are rejected.
"""
import json
import logging
from pathlib import Path
import struct
from typing import Any, Dict, Tuple

import numpy as np

from src.components.models.base import TextClassifier
from src.core.errors import CheckpointError

logger = logging.getLogger(__name__)

MAGIC = b"DOLFINCK"
FORMAT_VERSION = 1
_BLOCK_DTYPE = np.dtype("<f4")


def save_checkpoint(path: Path, model: TextClassifier, header: Dict[str, Any]) -> None:
    params = model.parameters()
    header = dict(header)
    header["format_version"] = FORMAT_VERSION
    header["architecture"] = model.architecture
    header["parameters"] = [{"name": name, "shape": list(p.shape)} for name, p in params.items()]
    payload = json.dumps(header, sort_keys=True).encode("utf-8")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(payload)))
        f.write(payload)
        for p in params.values():
            f.write(np.ascontiguousarray(p.data, dtype=_BLOCK_DTYPE).tobytes())
    logger.info(f"Saved checkpoint with {len(params)} parameter blocks to {path}")


def read_checkpoint(path: Path) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError("checkpoint not found", path=path)
    raw = path.read_bytes()
    if len(raw) < len(MAGIC) + 4 or raw[: len(MAGIC)] != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)", path=path)
    (header_length,) = struct.unpack("<I", raw[len(MAGIC): len(MAGIC) + 4])
    start = len(MAGIC) + 4
    try:
        header = json.loads(raw[start: start + header_length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt header: {e}", path=path) from e
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported format version {header.get('format_version')}", path=path)

    offset = start + header_length
    arrays: Dict[str, np.ndarray] = {}
    try:
        entries = [(entry["name"], tuple(entry["shape"])) for entry in header["parameters"]]
    except (KeyError, TypeError) as e:
        raise CheckpointError("header has no valid parameter list", path=path) from e
    expected = offset + sum(int(np.prod(shape)) for _, shape in entries) * _BLOCK_DTYPE.itemsize
    if expected != len(raw):
        raise CheckpointError(f"payload is {len(raw)} bytes, header declares {expected}", path=path)
    for name, shape in entries:
        count = int(np.prod(shape))
        block = np.frombuffer(raw, dtype=_BLOCK_DTYPE, count=count, offset=offset)
        arrays[name] = block.reshape(shape).astype(np.float32)
        offset += count * _BLOCK_DTYPE.itemsize
    return header, arrays


def load_parameters(model: TextClassifier, arrays: Dict[str, np.ndarray]) -> None:
    params = model.parameters()
    if list(params) != list(arrays):
        raise CheckpointError(
            f"checkpoint parameters {list(arrays)} do not match {model.architecture} parameters {list(params)}"
        )
    for name, p in params.items():
        if arrays[name].shape != p.shape:
            raise CheckpointError(f"parameter {name}: checkpoint shape {arrays[name].shape}, model shape {p.shape}")
        p.data = arrays[name].astype(p.dtype)
        p.grad = None
