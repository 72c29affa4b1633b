"""First-touch color assignment for feature ids.

Every feature id that ever appears gets a permanent RGB color drawn from
a seeded SplitMix64 stream: three consecutive draws reduced mod 256 form
a candidate, which is rejected and redrawn if some earlier feature
already owns it or if it sits within Chebyshev distance 16 of white
(the canvas background). Assignment order therefore fixes the palette,
so a checkpoint only needs the seed and the ordered (feature, color)
pairs; loading replays the draw stream and verifies every recorded
color falls out of it again.
"""

from __future__ import annotations

from pathlib import Path

from .rng import MASK64, SplitMix64

WHITE_GUARD = 16
MAX_COLORS = (1 << 24) - (WHITE_GUARD + 1) ** 3
_HEADER_ALGO = "splitmix64"


class PaletteExhaustedError(RuntimeError):
    """All 2^24 - 17^3 assignable colors are taken."""


class PaletteCheckpointError(ValueError):
    """A palette checkpoint is malformed or fails replay verification."""


def _near_white(r: int, g: int, b: int) -> bool:
    return min(r, g, b) >= 255 - WHITE_GUARD


class Palette:
    """Deterministic feature-to-color map keyed by first request order."""

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._rng = SplitMix64(seed)
        self._colors: dict[int, tuple[int, int, int]] = {}
        self._taken: set[tuple[int, int, int]] = set()
        self._order: list[int] = []

    def __len__(self) -> int:
        return len(self._colors)

    def __contains__(self, feature_id: int) -> bool:
        return feature_id in self._colors

    def _draw_color(self) -> tuple[int, int, int]:
        if len(self._taken) >= MAX_COLORS:
            raise PaletteExhaustedError(f"all {MAX_COLORS} colors assigned")
        while True:
            r = self._rng.next_u64() % 256
            g = self._rng.next_u64() % 256
            b = self._rng.next_u64() % 256
            if _near_white(r, g, b):
                continue
            if (r, g, b) in self._taken:
                continue
            return r, g, b

    def color_for(self, feature_id: int) -> tuple[int, int, int]:
        """Return feature_id's color, assigning a fresh one on first request."""
        color = self._colors.get(feature_id)
        if color is None:
            color = self._draw_color()
            self._colors[feature_id] = color
            self._taken.add(color)
            self._order.append(feature_id)
        return color

    @property
    def assignments(self) -> list[tuple[int, tuple[int, int, int]]]:
        """(feature_id, color) pairs in assignment order."""
        return [(fid, self._colors[fid]) for fid in self._order]

    def snapshot(self) -> list[tuple[int, int, int, int]]:
        """(feature_id, r, g, b) rows in assignment order."""
        return [(fid, *self._colors[fid]) for fid in self._order]

    def save(self, path: str | Path) -> None:
        """Write the seed and ordered assignments as a text checkpoint."""
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"seed={self.seed} algo={_HEADER_ALGO}\n")
            for fid in self._order:
                r, g, b = self._colors[fid]
                f.write(f"{fid} {r} {g} {b}\n")

    @classmethod
    def load(cls, path: str | Path) -> "Palette":
        """Rebuild a palette by replaying its draw stream against the checkpoint.

        Each recorded color must reappear as the next accepted draw;
        any deviation means the file does not describe this seed's
        stream and raises PaletteCheckpointError.
        """
        with open(path, "r", encoding="utf-8") as f:
            header = f.readline().strip()
            parts = dict(
                kv.split("=", 1) for kv in header.split() if "=" in kv
            )
            if set(parts) != {"seed", "algo"}:
                raise PaletteCheckpointError(f"bad header {header!r}")
            if parts["algo"] != _HEADER_ALGO:
                raise PaletteCheckpointError(f"unsupported algo {parts['algo']!r}")
            try:
                seed = int(parts["seed"])
            except ValueError:
                raise PaletteCheckpointError(f"bad seed in header {header!r}") from None
            palette = cls(seed)
            for lineno, line in enumerate(f, start=2):
                tokens = line.split()
                if len(tokens) != 4:
                    raise PaletteCheckpointError(f"line {lineno}: expected 'fid r g b'")
                try:
                    fid, r, g, b = (int(t) for t in tokens)
                except ValueError:
                    raise PaletteCheckpointError(f"line {lineno}: non-integer field") from None
                if fid in palette._colors:
                    raise PaletteCheckpointError(f"line {lineno}: duplicate feature {fid}")
                drawn = palette._draw_color()
                if drawn != (r, g, b):
                    raise PaletteCheckpointError(
                        f"line {lineno}: recorded color {(r, g, b)} does not match replay {drawn}"
                    )
                palette._colors[fid] = drawn
                palette._taken.add(drawn)
                palette._order.append(fid)
        return palette
