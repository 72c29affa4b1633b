"""From-scratch convolutional binary classifier trained one frame at a time.

DeskNet is deliberately small enough to train on a desktop CPU: two
strided convolutions, one max pool, global average pooling, and a
single logistic output. Forward and backward passes are hand-written
numpy (im2col convolutions), with plain per-instance SGD and binary
cross-entropy. Any model exposing predict(frame) and
learn(frame, label) with predict-then-update semantics can stand in
for it downstream.

Default input is 3x224x224 with conv1 stride 4; a reduced 3x32x32
configuration (conv1 stride 2, identical layer types and parameter
shapes) exists for exhaustive gradient verification. Parameters are
single precision by default and double precision in verification mode.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .rng import MASK64, SplitMix64

EPS = 1e-7
CONV1_FILTERS = 8
CONV1_KERNEL = 7
CONV1_PAD = 3
CONV2_FILTERS = 16
CONV2_KERNEL = 3
CONV2_PAD = 1
CONV2_STRIDE = 2

_CKPT_MAGIC = b"HI2W"
_CKPT_VERSION = 1
_CKPT_HEADER = struct.Struct("<4sIQ")


class DivergenceError(RuntimeError):
    """Training produced a non-finite activation or gradient."""

    def __init__(self, message: str, timestep: int | None = None):
        if timestep is not None:
            message = f"{message} at timestep {timestep}"
        super().__init__(message)
        self.timestep = timestep


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _clamp(p: float) -> float:
    return min(max(p, EPS), 1.0 - EPS)


def bce_loss(y: int, p: float) -> float:
    """Binary cross-entropy with the probability clamped to [1e-7, 1-1e-7]."""
    if y not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {y!r}")
    p = _clamp(float(p))
    return -(y * math.log(p) + (1 - y) * math.log(1.0 - p))


class DeskNet:
    """Two-conv binary classifier with hand-rolled backprop and SGD.

    Weights draw uniformly from [-sqrt(6/fan_in), sqrt(6/fan_in)] in the
    fixed order conv1, conv2, dense from a dedicated generator; biases
    start at zero.
    """

    def __init__(self, seed: int, lr: float = 1e-3, input_size: int = 224,
                 conv1_stride: int = 4, dtype=np.float32):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        if lr < 0 or not math.isfinite(lr):
            raise ValueError(f"learning rate must be a finite non-negative real, got {lr}")
        self.seed = seed
        self.lr = float(lr)
        self.input_size = int(input_size)
        self.conv1_stride = int(conv1_stride)
        self.dtype = np.dtype(dtype)

        o1 = (self.input_size + 2 * CONV1_PAD - CONV1_KERNEL) // self.conv1_stride + 1
        if o1 < 2 or o1 % 2 != 0:
            raise ValueError(
                f"conv1 output {o1} is not an even size; pick a compatible input_size/stride"
            )
        self.o1 = o1
        self.o_pool = o1 // 2
        self.o2 = (self.o_pool + 2 * CONV2_PAD - CONV2_KERNEL) // CONV2_STRIDE + 1

        rng = SplitMix64(seed)
        fan1 = 3 * CONV1_KERNEL * CONV1_KERNEL
        fan2 = CONV1_FILTERS * CONV2_KERNEL * CONV2_KERNEL
        fan3 = CONV2_FILTERS
        self.conv1_w = self._draw(rng, (CONV1_FILTERS, 3, CONV1_KERNEL, CONV1_KERNEL), fan1)
        self.conv1_b = np.zeros(CONV1_FILTERS, dtype=self.dtype)
        self.conv2_w = self._draw(rng, (CONV2_FILTERS, CONV1_FILTERS, CONV2_KERNEL, CONV2_KERNEL), fan2)
        self.conv2_b = np.zeros(CONV2_FILTERS, dtype=self.dtype)
        self.dense_w = self._draw(rng, (CONV2_FILTERS,), fan3)
        self.dense_b = np.zeros(1, dtype=self.dtype)

    def _draw(self, rng: SplitMix64, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
        bound = math.sqrt(6.0 / fan_in)
        u = rng.uniform_block(int(np.prod(shape)))
        return ((2.0 * u - 1.0) * bound).astype(self.dtype).reshape(shape)

    def parameters(self) -> list[tuple[str, np.ndarray]]:
        """Name/array pairs in the fixed checkpoint order."""
        return [
            ("conv1_w", self.conv1_w),
            ("conv1_b", self.conv1_b),
            ("conv2_w", self.conv2_w),
            ("conv2_b", self.conv2_b),
            ("dense_w", self.dense_w),
            ("dense_b", self.dense_b),
        ]

    @property
    def param_count(self) -> int:
        return sum(arr.size for _, arr in self.parameters())

    def get_flat(self) -> np.ndarray:
        return np.concatenate([arr.ravel().astype(np.float64) for _, arr in self.parameters()])

    def set_flat(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.param_count,):
            raise ValueError(f"expected {self.param_count} values, got {flat.shape}")
        offset = 0
        for _, arr in self.parameters():
            chunk = flat[offset:offset + arr.size].reshape(arr.shape)
            arr[...] = chunk.astype(self.dtype)
            offset += arr.size

    def _check_frame(self, frame: np.ndarray) -> np.ndarray:
        x = np.asarray(frame)
        expected = (3, self.input_size, self.input_size)
        if x.shape != expected:
            raise ValueError(f"frame shape {x.shape} does not match {expected}")
        return x.astype(self.dtype, copy=False)

    def _forward(self, x: np.ndarray) -> tuple[float, dict]:
        k1, s1 = CONV1_KERNEL, self.conv1_stride
        pad1 = np.pad(x, ((0, 0), (CONV1_PAD, CONV1_PAD), (CONV1_PAD, CONV1_PAD)))
        win1 = sliding_window_view(pad1, (k1, k1), axis=(1, 2))[:, ::s1, ::s1]
        cols1 = win1.transpose(1, 2, 0, 3, 4).reshape(self.o1 * self.o1, 3 * k1 * k1)
        z1 = cols1 @ self.conv1_w.reshape(CONV1_FILTERS, -1).T + self.conv1_b
        z1 = z1.T.reshape(CONV1_FILTERS, self.o1, self.o1)
        a1 = np.maximum(z1, 0)

        m = self.o_pool
        pool_win = a1.reshape(CONV1_FILTERS, m, 2, m, 2).transpose(0, 1, 3, 2, 4)
        pool_win = pool_win.reshape(CONV1_FILTERS, m, m, 4)
        pool_idx = np.argmax(pool_win, axis=3)
        pooled = np.take_along_axis(pool_win, pool_idx[..., None], axis=3)[..., 0]

        k2, s2 = CONV2_KERNEL, CONV2_STRIDE
        pad2 = np.pad(pooled, ((0, 0), (CONV2_PAD, CONV2_PAD), (CONV2_PAD, CONV2_PAD)))
        win2 = sliding_window_view(pad2, (k2, k2), axis=(1, 2))[:, ::s2, ::s2]
        cols2 = win2.transpose(1, 2, 0, 3, 4).reshape(self.o2 * self.o2, CONV1_FILTERS * k2 * k2)
        z2 = cols2 @ self.conv2_w.reshape(CONV2_FILTERS, -1).T + self.conv2_b
        z2 = z2.T.reshape(CONV2_FILTERS, self.o2, self.o2)
        a2 = np.maximum(z2, 0)

        g = a2.mean(axis=(1, 2))
        z3 = float(g @ self.dense_w + self.dense_b[0])
        if not (np.isfinite(z3) and np.isfinite(z1).all() and np.isfinite(z2).all()):
            raise DivergenceError("non-finite activation")
        p = _sigmoid(z3)
        cache = {"cols1": cols1, "z1": z1, "pool_idx": pool_idx, "cols2": cols2,
                 "z2": z2, "g": g, "p": p}
        return p, cache

    def _backward(self, y: int, cache: dict) -> list[np.ndarray]:
        p = cache["p"]
        dz3 = (p - y) if EPS < p < 1.0 - EPS else 0.0

        d_dense_w = (dz3 * cache["g"]).astype(self.dtype)
        d_dense_b = np.array([dz3], dtype=self.dtype)

        m2 = self.o2
        da2 = (dz3 / (m2 * m2)) * self.dense_w.astype(np.float64)
        da2 = np.broadcast_to(da2[:, None, None].astype(self.dtype), (CONV2_FILTERS, m2, m2))
        dz2 = np.where(cache["z2"] > 0, da2, 0).astype(self.dtype)

        d_conv2_b = dz2.sum(axis=(1, 2))
        dz2_flat = dz2.reshape(CONV2_FILTERS, m2 * m2).T
        d_conv2_w = (dz2_flat.T @ cache["cols2"]).reshape(self.conv2_w.shape)

        k2 = CONV2_KERNEL
        dcols2 = (dz2_flat @ self.conv2_w.reshape(CONV2_FILTERS, -1))
        dwin2 = dcols2.reshape(m2, m2, CONV1_FILTERS, k2, k2).transpose(2, 0, 1, 3, 4)
        m = self.o_pool
        dpad2 = np.zeros((CONV1_FILTERS, m + 2 * CONV2_PAD, m + 2 * CONV2_PAD), dtype=self.dtype)
        for ki in range(k2):
            for kj in range(k2):
                dpad2[:, ki:ki + 2 * m2:2, kj:kj + 2 * m2:2] += dwin2[:, :, :, ki, kj]
        dpooled = dpad2[:, CONV2_PAD:CONV2_PAD + m, CONV2_PAD:CONV2_PAD + m]

        dpool_win = np.zeros((CONV1_FILTERS, m, m, 4), dtype=self.dtype)
        np.put_along_axis(dpool_win, cache["pool_idx"][..., None], dpooled[..., None], axis=3)
        da1 = dpool_win.reshape(CONV1_FILTERS, m, m, 2, 2).transpose(0, 1, 3, 2, 4)
        da1 = da1.reshape(CONV1_FILTERS, self.o1, self.o1)
        dz1 = np.where(cache["z1"] > 0, da1, 0).astype(self.dtype)

        d_conv1_b = dz1.sum(axis=(1, 2))
        dz1_flat = dz1.reshape(CONV1_FILTERS, self.o1 * self.o1).T
        d_conv1_w = (dz1_flat.T @ cache["cols1"]).reshape(self.conv1_w.shape)

        return [d_conv1_w, d_conv1_b, d_conv2_w, d_conv2_b, d_dense_w, d_dense_b]

    def predict(self, frame: np.ndarray) -> float:
        """Probability of class 1 for one frame, clamped into (0, 1); no update."""
        x = self._check_frame(frame)
        p, _ = self._forward(x)
        return _clamp(p)

    def learn(self, frame: np.ndarray, label: int,
              timestep: int | None = None) -> tuple[float, float]:
        """One prequential step: predict, then update on the revealed label.

        Returns the pre-update probability and its binary cross-entropy.
        """
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        x = self._check_frame(frame)
        try:
            p_raw, cache = self._forward(x)
        except DivergenceError as exc:
            raise DivergenceError(str(exc), timestep) from None
        loss = bce_loss(label, p_raw)
        grads = self._backward(label, cache)
        for (_, arr), grad in zip(self.parameters(), grads):
            if not np.isfinite(grad).all():
                raise DivergenceError("non-finite gradient", timestep)
            arr -= (self.lr * grad).astype(self.dtype)
        return _clamp(p_raw), loss

    def save(self, path: str | Path) -> None:
        """Write parameters as float64 little-endian after a 16-byte header."""
        flat = self.get_flat()
        with open(path, "wb") as f:
            f.write(_CKPT_HEADER.pack(_CKPT_MAGIC, _CKPT_VERSION, flat.size))
            f.write(flat.astype("<f8").tobytes())

    def restore(self, path: str | Path) -> None:
        """Load a checkpoint written by save into this net's parameters."""
        with open(path, "rb") as f:
            header = f.read(_CKPT_HEADER.size)
            if len(header) != _CKPT_HEADER.size:
                raise ValueError("checkpoint truncated before header end")
            magic, version, count = _CKPT_HEADER.unpack(header)
            if magic != _CKPT_MAGIC:
                raise ValueError(f"bad checkpoint magic {magic!r}")
            if version != _CKPT_VERSION:
                raise ValueError(f"unsupported checkpoint version {version}")
            if count != self.param_count:
                raise ValueError(
                    f"checkpoint holds {count} parameters, net has {self.param_count}"
                )
            payload = f.read(8 * count)
            if len(payload) != 8 * count:
                raise ValueError("checkpoint truncated before payload end")
        self.set_flat(np.frombuffer(payload, dtype="<f8"))


def init_desknet(seed: int, lr: float = 1e-3, **kwargs) -> DeskNet:
    return DeskNet(seed, lr=lr, **kwargs)


def predict(net: DeskNet, frame: np.ndarray) -> float:
    return net.predict(frame)


def learn_step(net: DeskNet, frame: np.ndarray, label: int,
               timestep: int | None = None) -> tuple[float, float]:
    return net.learn(frame, label, timestep)
