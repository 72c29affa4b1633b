"""Reader and writer for the HI2F frame-stream wire format.

Little-endian layout:

    header (32 bytes): magic "HI2F", version u32 = 1, channels u32 = 3,
        height u32 = 224, width u32 = 224, dtype u8 = 1 (32-bit float),
        11 reserved zero bytes
    per frame: timestep u64, label u8, then 150528 float32 values
        channel-major, row-major within channel

No compression, no framing beyond fixed sizes; readers must validate
magic and version and reject truncated tails.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO, Iterator

import numpy as np

MAGIC = b"HI2F"
VERSION = 1
CHANNELS = 3
HEIGHT = 224
WIDTH = 224
DTYPE_F32 = 1

HEADER = struct.Struct("<4sIIIIB11x")
FRAME_PREFIX = struct.Struct("<QB")
FRAME_VALUES = CHANNELS * HEIGHT * WIDTH
FRAME_PAYLOAD_BYTES = 4 * FRAME_VALUES
FRAME_BYTES = FRAME_PREFIX.size + FRAME_PAYLOAD_BYTES


class FrameFormatError(ValueError):
    """The byte stream is not a valid HI2F file."""


def pack_header() -> bytes:
    return HEADER.pack(MAGIC, VERSION, CHANNELS, HEIGHT, WIDTH, DTYPE_F32)


class FrameWriter:
    """Streaming HI2F writer; the header goes out on open."""

    def __init__(self, path: str | Path):
        self._f: BinaryIO = open(path, "wb")
        self._f.write(pack_header())
        self.count = 0

    def write(self, timestep: int, label: int, frame: np.ndarray) -> None:
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        x = np.asarray(frame)
        if x.shape != (CHANNELS, HEIGHT, WIDTH):
            raise ValueError(f"frame shape {x.shape} is not {(CHANNELS, HEIGHT, WIDTH)}")
        self._f.write(FRAME_PREFIX.pack(timestep, label))
        self._f.write(np.ascontiguousarray(x, dtype="<f4").tobytes())
        self.count += 1

    def close(self) -> None:
        if not self._f.closed:
            self._f.close()

    def __enter__(self) -> "FrameWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_frames(path: str | Path) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield (timestep, label, frame) triples, validating structure throughout."""
    with open(path, "rb") as f:
        raw = f.read(HEADER.size)
        if len(raw) != HEADER.size:
            raise FrameFormatError(f"file shorter than the {HEADER.size}-byte header")
        magic, version, channels, height, width, dtype = HEADER.unpack(raw)
        if magic != MAGIC:
            raise FrameFormatError(f"bad magic {magic!r}")
        if version != VERSION:
            raise FrameFormatError(f"unsupported version {version}")
        if (channels, height, width, dtype) != (CHANNELS, HEIGHT, WIDTH, DTYPE_F32):
            raise FrameFormatError(
                f"unsupported geometry {(channels, height, width, dtype)}"
            )
        index = 0
        while True:
            prefix = f.read(FRAME_PREFIX.size)
            if len(prefix) == 0:
                return
            if len(prefix) != FRAME_PREFIX.size:
                raise FrameFormatError(f"frame {index}: truncated prefix")
            timestep, label = FRAME_PREFIX.unpack(prefix)
            if label not in (0, 1):
                raise FrameFormatError(f"frame {index}: label byte {label} not 0/1")
            payload = f.read(FRAME_PAYLOAD_BYTES)
            if len(payload) != FRAME_PAYLOAD_BYTES:
                raise FrameFormatError(f"frame {index}: truncated payload")
            frame = np.frombuffer(payload, dtype="<f4").reshape(CHANNELS, HEIGHT, WIDTH)
            yield timestep, label, frame
            index += 1


def count_frames(path: str | Path) -> int:
    """Frame count implied by the file size, validating exact framing."""
    size = Path(path).stat().st_size
    body = size - HEADER.size
    if body < 0 or body % FRAME_BYTES != 0:
        raise FrameFormatError(f"file size {size} does not frame evenly")
    return body // FRAME_BYTES
