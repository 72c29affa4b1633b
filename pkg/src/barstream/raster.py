"""Direct pixel-buffer rendering of one instance into a 3x224x224 frame.

Three representations share the same canvas conventions: bar charts
(default), bar charts with X glyphs for known-but-unobserved features,
and pie charts. Frames are float32 arrays in [0,1] where a pixel is
either background white (1.0) or a feature color divided by 255.

Bar geometry follows the truncating-integer layout

    bar_width = int(canvas / (d + (d+1)*ff)),  spacing = int(bar_width*ff)

with d observed features, leading spacing, and truncation leftovers
padding the right edge. When d is large enough that bar_width would be
zero at 224, the canvas doubles until bar_width >= 2 and the result is
area-average pooled back down, which is exact because doubling keeps
the canvas a multiple of 224.

The spacing fraction is interpreted as the decimal literal it prints
as (0.3 means 3/10, not the binary float nearest 0.3), so layout
arithmetic is exact rational arithmetic and immune to representation
drift across platforms.

Bar painting is column-vectorized: per-frame cost is dominated by
fixed-size canvas work, not the feature count, which keeps per-instance
time flat across streams of different widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import numpy as np

from .palette import Palette

FRAME_SIZE = 224
DEFAULT_FF = 0.3
ZSCORE_RANGE = 3.0
PIE_CENTER = (112, 112)
PIE_RADIUS = 100

Observed = tuple[tuple[int, float], ...]


def _exact_fraction(ff: float | int | str | Fraction) -> Fraction:
    if isinstance(ff, Fraction):
        return ff
    if isinstance(ff, int):
        return Fraction(ff)
    if isinstance(ff, float):
        return Fraction(Decimal(repr(ff)))
    return Fraction(Decimal(ff))


@dataclass(frozen=True)
class LayoutSpec:
    """Integer bar geometry for one frame."""

    bar_width: int
    spacing: int
    d: int
    ff: Fraction
    canvas_width: int

    def slot_columns(self, j: int) -> tuple[int, int]:
        """Half-open column range of bar slot j."""
        x0 = self.spacing + j * (self.bar_width + self.spacing)
        return x0, x0 + self.bar_width


def layout(d: int, ff: float | Fraction = DEFAULT_FF, canvas_width: int = FRAME_SIZE) -> LayoutSpec:
    """Solve the bar/spacing widths for d features, enlarging the canvas if needed.

    If bar_width truncates to zero at the requested canvas, the canvas
    doubles until bar_width >= 2.
    """
    if d <= 0:
        raise ValueError(f"layout needs at least one feature, got d={d}")
    frac = _exact_fraction(ff)
    if frac <= 0:
        raise ValueError(f"spacing fraction must be positive, got {ff!r}")
    denom = d + (d + 1) * frac
    width = canvas_width
    bar = int(Fraction(width) / denom)
    if bar < 1:
        while bar < 2:
            width *= 2
            bar = int(Fraction(width) / denom)
    spacing = int(bar * frac)
    return LayoutSpec(bar_width=bar, spacing=spacing, d=d, ff=frac, canvas_width=width)


def _check_mode(mode: str) -> None:
    if mode not in ("zscore", "minmax"):
        raise ValueError(f"mode must be 'zscore' or 'minmax', got {mode!r}")


def _check_values(values: np.ndarray, mode: str) -> None:
    if mode == "zscore":
        if values.size and (values.min() < -ZSCORE_RANGE or values.max() > ZSCORE_RANGE):
            raise ValueError("zscore value outside [-3, 3]")
    elif values.size and (values.min() < 0.0 or values.max() > 1.0):
        raise ValueError("minmax value outside [0, 1]")


def _rows_for_values(values: np.ndarray, mode: str, height: int) -> np.ndarray:
    """Vectorized value-to-row mapping; ties round to even."""
    _check_values(values, mode)
    if mode == "zscore":
        rows = np.round((ZSCORE_RANGE - values) / (2.0 * ZSCORE_RANGE) * (height - 1))
    else:
        rows = np.round((1.0 - values) * (height - 1))
    return rows.astype(np.int64)


def value_to_row(value: float, mode: str, height: int = FRAME_SIZE) -> int:
    """Map one normalized value to a pixel row (0 = top).

    zscore maps [-3, 3] onto [height-1, 0]; minmax maps [0, 1] onto
    [height-1, 0].
    """
    _check_mode(mode)
    return int(_rows_for_values(np.asarray([float(value)]), mode, height)[0])


def baseline_row(mode: str, height: int = FRAME_SIZE) -> int:
    """Row that a zero-valued bar collapses to (midline or bottom edge)."""
    return value_to_row(0.0, mode, height)


def _blank_canvas(width: int) -> np.ndarray:
    return np.ones((3, width, width), dtype=np.float32)


_ROW_GRID: dict[int, np.ndarray] = {}


def _row_grid(width: int) -> np.ndarray:
    grid = _ROW_GRID.get(width)
    if grid is None:
        grid = np.arange(width, dtype=np.int64)[:, None]
        _ROW_GRID[width] = grid
    return grid


def _paint_bars(canvas: np.ndarray, spec: LayoutSpec, slots: np.ndarray,
                values: np.ndarray, colors: np.ndarray, mode: str) -> None:
    """Fill bar slots in one vectorized pass over the whole canvas."""
    height = spec.canvas_width
    bw = spec.bar_width
    r_value = _rows_for_values(values, mode, height)
    r_base = baseline_row(mode, height)
    tops = np.minimum(r_value, r_base)
    bottoms = np.maximum(r_value, r_base)

    starts = spec.spacing + slots * (bw + spec.spacing)
    bar_cols = (starts[:, None] + np.arange(bw)[None, :]).ravel()
    col_top = np.full(height, height, dtype=np.int64)
    col_bottom = np.full(height, -1, dtype=np.int64)
    col_top[bar_cols] = np.repeat(tops, bw)
    col_bottom[bar_cols] = np.repeat(bottoms, bw)
    col_color = np.ones((3, height), dtype=np.float32)
    col_color[:, bar_cols] = np.repeat(colors, bw, axis=0).T

    rows = _row_grid(height)
    mask = (rows >= col_top) & (rows <= col_bottom)
    painted = np.broadcast_to(col_color[:, None, :], canvas.shape)[:, mask]
    canvas[:, mask] = painted


def _palette_colors(palette: Palette, fids: list[int]) -> np.ndarray:
    return np.asarray([palette.color_for(fid) for fid in fids], dtype=np.float32) / 255.0


def render_bar(observed: Observed, palette: Palette, mode: str = "zscore",
               ff: float | Fraction = DEFAULT_FF) -> np.ndarray:
    """Render observed features as colored bars; empty input gives a white frame."""
    _check_mode(mode)
    if len(observed) == 0:
        return _blank_canvas(FRAME_SIZE)
    spec = layout(len(observed), ff)
    canvas = _blank_canvas(spec.canvas_width)
    values = np.asarray([v for _, v in observed], dtype=np.float64)
    colors = _palette_colors(palette, [fid for fid, _ in observed])
    _paint_bars(canvas, spec, np.arange(len(observed)), values, colors, mode)
    return downscale(canvas)


def _paint_x(canvas: np.ndarray, spec: LayoutSpec, slot: int, mode: str,
             color: np.ndarray) -> None:
    """Two thick diagonals of a bar_width square centered on the baseline."""
    height = spec.canvas_width
    bw = spec.bar_width
    top = baseline_row(mode, height) - bw // 2
    x0, _ = spec.slot_columns(slot)
    thickness = max(1, bw // 8)
    col = color[:, None]
    for i in range(bw):
        for r in (top + i, top + bw - 1 - i):
            lo = max(0, r)
            hi = min(height, r + thickness)
            if lo < hi:
                canvas[:, lo:hi, x0 + i] = col


def render_bar_x(known_features: list[int], observed: Observed, palette: Palette,
                 mode: str = "zscore", ff: float | Fraction = DEFAULT_FF) -> np.ndarray:
    """Render bars for observed features and X glyphs for the rest.

    Slot positions follow known_features order, so a feature keeps its
    column whether or not it is observed this step.
    """
    _check_mode(mode)
    known = list(known_features)
    if len(set(known)) != len(known):
        raise ValueError("known_features contains duplicates")
    slot_of = {fid: j for j, fid in enumerate(known)}
    observed_fids = [fid for fid, _ in observed]
    missing = set(observed_fids) - set(slot_of)
    if missing:
        raise ValueError(f"observed features {sorted(missing)} not in known_features")
    if len(known) == 0:
        return _blank_canvas(FRAME_SIZE)
    spec = layout(len(known), ff)
    canvas = _blank_canvas(spec.canvas_width)
    if observed_fids:
        slots = np.asarray([slot_of[fid] for fid in observed_fids])
        values = np.asarray([v for _, v in observed], dtype=np.float64)
        colors = _palette_colors(palette, observed_fids)
        _paint_bars(canvas, spec, slots, values, colors, mode)
    observed_set = set(observed_fids)
    for fid in known:
        if fid not in observed_set:
            color = np.asarray(palette.color_for(fid), dtype=np.float32) / 255.0
            _paint_x(canvas, spec, slot_of[fid], mode, color)
    return downscale(canvas)


_PIE_GRID: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pie_grid(width: int) -> tuple[np.ndarray, np.ndarray]:
    """Cache (inside-disc mask, clockwise-from-noon angle) for the canvas."""
    cached = _PIE_GRID.get(width)
    if cached is None:
        rows, cols = np.indices((width, width))
        dy = rows - PIE_CENTER[0]
        dx = cols - PIE_CENTER[1]
        inside = dx * dx + dy * dy <= PIE_RADIUS * PIE_RADIUS
        theta = np.mod(np.arctan2(dx, -dy), 2.0 * math.pi)
        cached = (inside, theta[inside])
        _PIE_GRID[width] = cached
    return cached


def render_pie(observed: Observed, palette: Palette, mode: str = "zscore",
               ff: float | Fraction = DEFAULT_FF) -> np.ndarray:
    """Render observed features as clockwise pie sectors starting at 12 o'clock.

    Sector weight is value + 3 under zscore (keeping weights
    non-negative) and the raw value under minmax; an all-zero total
    falls back to equal sectors.
    """
    _check_mode(mode)
    canvas = _blank_canvas(FRAME_SIZE)
    if len(observed) == 0:
        return canvas
    values = np.asarray([v for _, v in observed], dtype=np.float64)
    _check_values(values, mode)
    weights = values + ZSCORE_RANGE if mode == "zscore" else values
    total = float(weights.sum())
    if total == 0.0:
        fractions = np.full(len(weights), 1.0 / len(weights))
    else:
        fractions = weights / total
    edges = np.cumsum(fractions) * 2.0 * math.pi
    edges[-1] = 2.0 * math.pi + 1.0  # catch float shortfall at the wrap
    inside, theta = _pie_grid(FRAME_SIZE)
    sector = np.searchsorted(edges, theta, side="right")
    colors = _palette_colors(palette, [fid for fid, _ in observed])
    canvas[:, inside] = colors[sector].T
    return canvas


def downscale(canvas: np.ndarray, target: int = FRAME_SIZE) -> np.ndarray:
    """Area-average a 3xWxW canvas down to 3 x target x target."""
    _, height, width = canvas.shape
    if height != width:
        raise ValueError(f"canvas must be square, got {height}x{width}")
    if width % target != 0:
        raise ValueError(f"canvas width {width} is not a multiple of {target}")
    factor = width // target
    if factor == 1:
        return canvas
    pooled = canvas.reshape(3, target, factor, target, factor).mean(axis=(2, 4))
    return pooled.astype(np.float32)
