"""Independent reader for HI2F frame-stream files.

Little-endian throughout: a 32-byte header (magic "HI2F", version u32,
channels u32, height u32, width u32, dtype u8, 11 reserved bytes),
then zero or more frames of timestep u64, label u8, and
channels*height*width float32 values in channel-major order. Only the
3x224x224 float32 geometry is accepted. Everything read is validated;
a truncated tail is reported with the index of the broken frame and
the last complete one.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterator

import numpy as np

MAGIC = b"HI2F"
VERSION = 1
SHAPE = (3, 224, 224)
DTYPE_F32 = 1

_HEADER = struct.Struct("<4sIIIIB11x")
_PREFIX = struct.Struct("<QB")
_PAYLOAD_BYTES = 4 * SHAPE[0] * SHAPE[1] * SHAPE[2]
HEADER_BYTES = _HEADER.size
FRAME_BYTES = _PREFIX.size + _PAYLOAD_BYTES


class FrameFormatError(ValueError):
    """The file is not a well-formed HI2F stream."""


def _check_header(raw: bytes) -> None:
    if len(raw) != HEADER_BYTES:
        raise FrameFormatError(f"file ends inside the {HEADER_BYTES}-byte header")
    magic, version, channels, height, width, dtype = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise FrameFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FrameFormatError(f"unsupported version {version}")
    if (channels, height, width) != SHAPE or dtype != DTYPE_F32:
        raise FrameFormatError(
            f"unsupported geometry channels={channels} height={height} "
            f"width={width} dtype={dtype}"
        )


def read_header(path: str | Path) -> None:
    """Validate the header of an HI2F file; raises FrameFormatError."""
    with open(path, "rb") as f:
        _check_header(f.read(HEADER_BYTES))


def _truncated(index: int) -> FrameFormatError:
    if index == 0:
        return FrameFormatError("truncated frame 0; no complete frames")
    return FrameFormatError(
        f"truncated frame {index}; last complete frame is {index - 1}"
    )


def stream_frames(path: str | Path) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield (timestep, label, frame) in file order as float32 (3, 224, 224)."""
    with open(path, "rb") as f:
        _check_header(f.read(HEADER_BYTES))
        index = 0
        while True:
            prefix = f.read(_PREFIX.size)
            if not prefix:
                return
            if len(prefix) < _PREFIX.size:
                raise _truncated(index)
            timestep, label = _PREFIX.unpack(prefix)
            if label not in (0, 1):
                raise FrameFormatError(
                    f"frame {index}: label byte {label} is not 0 or 1"
                )
            payload = f.read(_PAYLOAD_BYTES)
            if len(payload) < _PAYLOAD_BYTES:
                raise _truncated(index)
            frame = np.frombuffer(payload, dtype="<f4").reshape(SHAPE)
            yield timestep, label, frame
            index += 1


def count_frames(path: str | Path) -> int:
    """Frame count implied by the file size; validates header and framing."""
    read_header(path)
    body = Path(path).stat().st_size - HEADER_BYTES
    if body % FRAME_BYTES:
        raise FrameFormatError(
            f"trailing {body % FRAME_BYTES} bytes do not frame evenly"
        )
    return body // FRAME_BYTES
