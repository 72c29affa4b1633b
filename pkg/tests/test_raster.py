"""Geometry and rendering tests against hand-derived pixel facts.

The layout reference below re-derives bar/spacing widths with plain
truncating float arithmetic, independently of the rational arithmetic
inside the package. Frozen cases ((16, 4) at d=10, (140, 42) at d=1)
were worked by hand first.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from barstream.palette import Palette
from barstream.raster import (FRAME_SIZE, PIE_CENTER, PIE_RADIUS, baseline_row,
                              downscale, layout, render_bar, render_bar_x,
                              render_pie, value_to_row)

WHITE = 1.0


def _layout_reference(d, ff=0.3, canvas=224):
    width = canvas
    bar = int(width / (d + (d + 1) * ff))
    if bar < 1:
        while bar < 2:
            width *= 2
            bar = int(width / (d + (d + 1) * ff))
    return bar, int(bar * ff), width


# ------------------------------------------------------------------ layout

def test_layout_frozen_hand_cases():
    spec = layout(10, 0.3)
    assert (spec.bar_width, spec.spacing, spec.canvas_width) == (16, 4, 224)
    spec = layout(1, 0.3)
    assert (spec.bar_width, spec.spacing, spec.canvas_width) == (140, 42, 224)


def test_layout_matches_truncating_reference():
    for d in range(1, 501):
        spec = layout(d, 0.3)
        assert (spec.bar_width, spec.spacing, spec.canvas_width) == _layout_reference(d)


def test_layout_canvas_doubles_until_bars_fit():
    spec = layout(224, 0.3)
    assert (spec.bar_width, spec.spacing, spec.canvas_width) == (3, 0, 896)
    assert spec.canvas_width % FRAME_SIZE == 0


def test_layout_validation():
    with pytest.raises(ValueError, match="at least one feature"):
        layout(0, 0.3)
    with pytest.raises(ValueError, match="spacing fraction must be positive"):
        layout(5, 0.0)


def test_layout_ff_is_decimal_exact():
    # 0.3 must mean 3/10: d=3 gives 224/4.2 = 53.33 -> 53, not a float-noise neighbor
    spec = layout(3, 0.3)
    assert spec.ff.numerator == 3 and spec.ff.denominator == 10
    assert spec.bar_width == 53


@given(st.integers(min_value=1, max_value=300))
def test_slots_ordered_disjoint_contained(d):
    spec = layout(d, 0.3)
    prev_end = 0
    for j in range(d):
        x0, x1 = spec.slot_columns(j)
        assert x1 - x0 == spec.bar_width
        assert x0 >= prev_end
        if j == 0:
            assert x0 == spec.spacing
        else:
            assert x0 - prev_end == spec.spacing
        prev_end = x1
    assert prev_end <= spec.canvas_width


# ------------------------------------------------------------------- y-map

def test_value_to_row_endpoints():
    assert value_to_row(3.0, "zscore") == 0
    assert value_to_row(-3.0, "zscore") == 223
    assert value_to_row(1.0, "minmax") == 0
    assert value_to_row(0.0, "minmax") == 223
    assert baseline_row("zscore") == 112
    assert baseline_row("minmax") == 223


def test_value_to_row_ties_round_to_even():
    # minmax at height 9: (1 - 0.6875) * 8 = 2.5 -> 2, (1 - 0.5625) * 8 = 3.5 -> 4
    assert value_to_row(0.6875, "minmax", height=9) == 2
    assert value_to_row(0.5625, "minmax", height=9) == 4
    # zscore at height 9: (3 - 1.125) / 6 * 8 = 2.5 -> 2
    assert value_to_row(1.125, "zscore", height=9) == 2


@given(st.floats(min_value=-3.0, max_value=3.0))
def test_zscore_rows_in_range_and_monotone(z):
    row = value_to_row(z, "zscore")
    assert 0 <= row <= 223
    if z + 0.5 <= 3.0:
        assert value_to_row(z + 0.5, "zscore") <= row


def test_value_to_row_range_errors():
    with pytest.raises(ValueError, match=r"zscore value outside \[-3, 3\]"):
        value_to_row(3.0001, "zscore")
    with pytest.raises(ValueError, match=r"minmax value outside \[0, 1\]"):
        value_to_row(-0.0001, "minmax")
    with pytest.raises(ValueError, match="mode must be"):
        value_to_row(0.0, "log")


# ------------------------------------------------------------------- bars

def _distinct_colors(frame):
    pixels = frame.reshape(3, -1).T
    non_bg = pixels[~np.all(pixels == WHITE, axis=1)]
    return {tuple(px) for px in non_bg}


def test_render_bar_empty_is_white():
    frame = render_bar((), Palette(1))
    assert frame.shape == (3, 224, 224)
    assert frame.dtype == np.float32
    assert np.all(frame == WHITE)


def test_render_bar_single_feature_top_value():
    palette = Palette(42)
    frame = render_bar(((0, 3.0),), palette, mode="zscore")
    color = np.asarray(palette.color_for(0), dtype=np.float32) / 255.0
    # bar spans baseline row 112 up to row 0, columns 42..181 (width 140)
    bar = frame[:, 0:113, 42:182]
    assert np.all(bar == color[:, None, None])
    assert np.all(frame[:, 113:, :] == WHITE)
    assert np.all(frame[:, :, :42] == WHITE)
    assert np.all(frame[:, :, 182:] == WHITE)


def test_render_bar_negative_value_grows_downward():
    palette = Palette(42)
    frame = render_bar(((0, -3.0),), palette, mode="zscore")
    assert np.all(frame[:, 0:112, :] == WHITE)
    color = np.asarray(palette.color_for(0), dtype=np.float32) / 255.0
    assert np.all(frame[:, 112:224, 42:182] == color[:, None, None])


def test_render_bar_zero_value_is_one_row():
    palette = Palette(7)
    frame = render_bar(((0, 0.0),), palette, mode="zscore")
    painted_rows = np.unique(np.nonzero(frame[0] != WHITE)[0])
    assert list(painted_rows) == [112]


def test_render_bar_minmax_anchors_at_bottom():
    palette = Palette(7)
    frame = render_bar(((0, 0.5),), palette, mode="minmax")
    painted_rows = np.unique(np.nonzero(frame[0] != WHITE)[0])
    assert painted_rows.min() == 112 and painted_rows.max() == 223


def test_render_bar_color_accounting():
    palette = Palette(9)
    observed = tuple((fid, ((fid * 7) % 13 - 6) / 2.0) for fid in range(10))
    frame = render_bar(observed, palette, mode="zscore")
    colors = _distinct_colors(frame)
    expected = {tuple(np.float32(c) / np.float32(255.0) for c in palette.color_for(fid))
                for fid in range(10)}
    assert colors == expected


def test_render_bar_slots_follow_observed_order():
    palette = Palette(3)
    frame = render_bar(((4, 1.0), (9, 1.0)), palette, mode="zscore")
    spec = layout(2, 0.3)
    c4 = np.asarray(palette.color_for(4), dtype=np.float32) / 255.0
    c9 = np.asarray(palette.color_for(9), dtype=np.float32) / 255.0
    x0, x1 = spec.slot_columns(0)
    assert np.all(frame[:, 100, x0:x1] == c4[:, None])
    x0, x1 = spec.slot_columns(1)
    assert np.all(frame[:, 100, x0:x1] == c9[:, None])


def test_render_bar_downscale_path_stays_in_range():
    palette = Palette(5)
    observed = tuple((fid, float((-1) ** fid)) for fid in range(224))
    frame = render_bar(observed, palette, mode="zscore")
    assert frame.shape == (3, 224, 224)
    assert float(frame.min()) >= 0.0 and float(frame.max()) <= 1.0
    # averaged borders leave strictly-between-bar-and-white pixels behind
    assert not np.all(np.isin(frame, [0.0, 1.0]))


def test_render_bar_rejects_out_of_range_values():
    with pytest.raises(ValueError, match="zscore value outside"):
        render_bar(((0, 5.0),), Palette(1), mode="zscore")


# ------------------------------------------------------------------ bar_x

def test_bar_x_all_observed_equals_render_bar():
    palette_a, palette_b = Palette(11), Palette(11)
    observed = ((0, 1.5), (1, -0.5), (2, 0.25))
    a = render_bar_x([0, 1, 2], observed, palette_a)
    b = render_bar(observed, palette_b)
    assert np.array_equal(a, b)


def test_bar_x_draws_x_for_unobserved():
    palette = Palette(13)
    known = [0, 1]
    frame = render_bar_x(known, ((0, 2.0),), palette)
    spec = layout(2, 0.3)
    x0, x1 = spec.slot_columns(1)
    glyph = frame[:, :, x0:x1]
    color = np.asarray(palette.color_for(1), dtype=np.float32) / 255.0
    painted = np.all(glyph == color[:, None, None], axis=0)
    assert painted.any()
    # glyph is centered on the baseline, inside a bar_width-high square
    # (plus stroke thickness below the last diagonal row)
    rows = np.nonzero(painted.any(axis=1))[0]
    top = baseline_row("zscore") - spec.bar_width // 2
    thickness = max(1, spec.bar_width // 8)
    assert rows.min() >= top
    assert rows.max() <= top + spec.bar_width + thickness - 2
    # both diagonal endpoints of the square are painted
    assert painted[top, 0] and painted[top, spec.bar_width - 1]


def test_bar_x_empty_known_is_white():
    frame = render_bar_x([], (), Palette(1))
    assert np.all(frame == WHITE)


def test_bar_x_slots_keyed_by_known_order():
    palette = Palette(17)
    frame = render_bar_x([5, 3, 8], ((3, 3.0),), palette)
    spec = layout(3, 0.3)
    color = np.asarray(palette.color_for(3), dtype=np.float32) / 255.0
    x0, x1 = spec.slot_columns(1)
    assert np.all(frame[:, 50, x0:x1] == color[:, None])


def test_bar_x_validation():
    with pytest.raises(ValueError, match="known_features contains duplicates"):
        render_bar_x([1, 1], (), Palette(1))
    with pytest.raises(ValueError, match=r"observed features \[2\] not in known_features"):
        render_bar_x([0, 1], ((2, 0.0),), Palette(1))


# -------------------------------------------------------------------- pie

def test_pie_empty_is_white():
    assert np.all(render_pie((), Palette(1)) == WHITE)


def test_pie_covers_disc_and_nothing_else():
    palette = Palette(19)
    frame = render_pie(((0, 1.0), (1, -0.5)), palette)
    rows, cols = np.indices((224, 224))
    inside = (rows - PIE_CENTER[0]) ** 2 + (cols - PIE_CENTER[1]) ** 2 <= PIE_RADIUS ** 2
    assert np.all(np.any(frame != WHITE, axis=0) == inside)
    assert float(frame.min()) >= 0.0 and float(frame.max()) <= 1.0


def test_pie_sectors_clockwise_from_noon():
    palette = Palette(23)
    # equal zscore weights 3 and 3: first sector covers clockwise 0..pi
    frame = render_pie(((0, 0.0), (1, 0.0)), palette)
    c0 = np.asarray(palette.color_for(0), dtype=np.float32) / 255.0
    c1 = np.asarray(palette.color_for(1), dtype=np.float32) / 255.0
    cy, cx = PIE_CENTER
    assert np.allclose(frame[:, cy - 50, cx + 1], c0)  # just right of noon
    assert np.allclose(frame[:, cy + 1, cx + 50], c0)  # 3 o'clock boundary side
    assert np.allclose(frame[:, cy - 50, cx - 1], c1)  # just left of noon
    assert np.allclose(frame[:, cy + 1, cx - 50], c1)  # 9 o'clock


def test_pie_zero_total_falls_back_to_equal_sectors():
    palette = Palette(29)
    frame_zero = render_pie(((0, 0.0), (1, 0.0)), palette, mode="minmax")
    palette2 = Palette(29)
    frame_equal = render_pie(((0, 0.5), (1, 0.5)), palette2, mode="minmax")
    assert np.array_equal(frame_zero, frame_equal)


def test_pie_sector_area_tracks_weights():
    palette = Palette(31)
    frame = render_pie(((0, 3.0), (1, -3.0)), palette, mode="zscore")
    c0 = np.asarray(palette.color_for(0), dtype=np.float32) / 255.0
    share0 = float(np.all(frame == c0[:, None, None], axis=0).sum())
    inside_total = float(np.any(frame != WHITE, axis=0).sum())
    assert share0 / inside_total > 0.99  # weight 6 vs 0


# -------------------------------------------------------------- downscale

def test_downscale_exact_block_average():
    rng = np.random.default_rng(0)
    canvas = rng.random((3, 448, 448)).astype(np.float32)
    pooled = downscale(canvas)
    assert pooled.shape == (3, 224, 224)
    manual = canvas[:, :2, :2].mean(axis=(1, 2))
    assert np.allclose(pooled[:, 0, 0], manual)


def test_downscale_identity_at_target():
    canvas = np.ones((3, 224, 224), dtype=np.float32)
    assert downscale(canvas) is canvas


def test_downscale_validation():
    with pytest.raises(ValueError, match="must be square"):
        downscale(np.ones((3, 224, 448), dtype=np.float32))
    with pytest.raises(ValueError, match="not a multiple"):
        downscale(np.ones((3, 300, 300), dtype=np.float32))
