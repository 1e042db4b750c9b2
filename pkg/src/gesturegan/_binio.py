"""Header-plus-payload container shared by corpus and model files.

Layout: 8-byte magic, little-endian uint64 header length, UTF-8 JSON
header, then the little-endian float64 payload. The header records the
payload length so truncation is detected on read.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .exceptions import RecordingFormatError

MAGIC = b"GGANBIN1"
_LEN = struct.Struct("<Q")


def write_blob(path, header: dict, payload) -> None:
    payload = np.ascontiguousarray(payload, dtype="<f8").ravel()
    header = dict(header, payload_len=int(payload.size))
    raw = json.dumps(header, sort_keys=True).encode("utf-8")
    with Path(path).open("wb") as fh:
        fh.write(MAGIC)
        fh.write(_LEN.pack(len(raw)))
        fh.write(raw)
        fh.write(payload.tobytes())


def read_blob(path) -> tuple[dict, np.ndarray]:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise RecordingFormatError(f"{path}: not a gesturegan binary file")
    (n,) = _LEN.unpack_from(data, 8)
    start = 8 + _LEN.size
    try:
        header = json.loads(data[start : start + n].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise RecordingFormatError(f"{path}: corrupt header") from None
    body = data[start + n :]
    expected = header.get("payload_len")
    if expected is None or len(body) != 8 * expected:
        raise RecordingFormatError(f"{path}: payload is {len(body)} bytes, header says {expected} floats")
    return header, np.frombuffer(body, dtype="<f8").astype(np.float64)
