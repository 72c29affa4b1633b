import struct
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"

HEADER = struct.pack("<4sIIIIB11x", b"HI2F", 1, 3, 224, 224, 1)


def hi2f_bytes(frames) -> bytes:
    """Serialize (timestep, label, frame) triples by hand, header first."""
    chunks = [HEADER]
    for timestep, label, frame in frames:
        chunks.append(struct.pack("<QB", timestep, label))
        chunks.append(np.ascontiguousarray(frame, dtype="<f4").tobytes())
    return b"".join(chunks)


def write_hi2f(path, frames) -> Path:
    path = Path(path)
    path.write_bytes(hi2f_bytes(frames))
    return path


def solid_frame(level: float) -> np.ndarray:
    return np.full((3, 224, 224), level, dtype=np.float32)


def split_frame(label: int) -> np.ndarray:
    """Left half bright for class 1, right half bright for class 0."""
    f = np.full((3, 224, 224), 0.05, dtype=np.float32)
    if label == 1:
        f[:, :, :112] = 0.95
    else:
        f[:, :, 112:] = 0.95
    return f


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
