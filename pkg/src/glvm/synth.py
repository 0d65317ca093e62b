"""Deterministic synthetic detection data and the shared cell-feature
extractor.

Images are grayscale rasters with bar-composed shapes: a cross target for
positives, and T-junction / L-corner confusers plus clutter for backgrounds.
The shapes share individual bars, so part-level counter-evidence is
informative by construction.  Everything is reproducible from (seed, image
index); no global RNG state is touched.

Features are per-cell 8-bin signed gradient-orientation histograms (central
differences, magnitude-weighted) plus one occupancy channel, L2-normalized
per cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import MisuseError

FEATURE_CHANNELS = 9  # 8 orientation bins + occupancy
_NORM_EPS = 1e-6


@dataclass(frozen=True)
class GrayImage:
    """H x W intensity grid in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        object.__setattr__(self, "pixels", px)
        if px.ndim != 2:
            raise MisuseError("image must be two-dimensional")
        if px.size and (px.min() < 0.0 or px.max() > 1.0):
            raise MisuseError("intensities must lie in [0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape


@dataclass(frozen=True)
class FeatureGrid:
    """Cell-feature tensor of shape (rows, cols, channels) at one scale."""

    cells: np.ndarray
    scale: float

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.float64)
        object.__setattr__(self, "cells", cells)
        if cells.ndim != 3:
            raise MisuseError("feature grid must be rows x cols x channels")
        if not np.all(np.isfinite(cells)):
            raise MisuseError("feature grid contains non-finite entries")
        if self.scale <= 0:
            raise MisuseError("scale must be positive")

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]


@dataclass(frozen=True)
class ShapeSpec:
    """A named bar composition; ``size`` is the overall extent in pixels."""

    kind: str  # cross | tee | ell | bar
    size: float = 24.0
    bar_width: float = 6.0
    intensity: float = 0.9

    def __post_init__(self):
        if self.kind not in ("cross", "tee", "ell", "bar"):
            raise MisuseError(f"unknown shape kind {self.kind!r}")
        if self.size <= 0 or self.bar_width <= 0 or not (
            0 < self.intensity <= 1
        ):
            raise MisuseError("invalid shape geometry")

    def bars(self) -> list[tuple[float, float, float, float, float]]:
        """(cx, cy, length, width, angle_deg) in shape-local coordinates."""
        size, width = self.size, self.bar_width
        if self.kind == "cross":
            return [
                (0.0, 0.0, size, width, 0.0),
                (0.0, 0.0, size, width, 90.0),
            ]
        if self.kind == "tee":
            top_y = -(size - width) / 2.0
            return [
                (0.0, top_y, size, width, 0.0),
                (0.0, width / 2.0, size - width, width, 90.0),
            ]
        if self.kind == "ell":
            bottom_y = (size - width) / 2.0
            left_x = -(size - width) / 2.0
            return [
                (0.0, bottom_y, size, width, 0.0),
                (left_x, 0.0, size - width, width, 90.0),
            ]
        return [(0.0, 0.0, size, width, 0.0)]


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    height: int = 48
    width: int = 48
    cell_size: int = 6
    n_positive: int = 60
    n_background: int = 500
    target: ShapeSpec = field(default_factory=lambda: ShapeSpec("cross"))
    confusers: tuple[ShapeSpec, ...] = field(
        default_factory=lambda: (ShapeSpec("tee"), ShapeSpec("ell"))
    )
    noise: float = 0.02
    jitter_pos: float = 3.0
    jitter_rot: float = 8.0
    jitter_scale: float = 0.1
    clutter_dots: int = 3
    confusers_per_background: int = 1

    def __post_init__(self):
        if self.height % self.cell_size or self.width % self.cell_size:
            raise MisuseError("image dims must be a multiple of the cell size")
        if self.noise < 0:
            raise MisuseError("noise must be non-negative")
        if self.n_positive < 0 or self.n_background < 0:
            raise MisuseError("image counts must be non-negative")
        for shape in (self.target, *self.confusers):
            extent = shape.size * (1 + self.jitter_scale)
            if extent > min(self.height, self.width):
                raise MisuseError(
                    f"shape {shape.kind!r} of size {shape.size} does not fit "
                    f"a {self.height}x{self.width} image"
                )


@dataclass(frozen=True)
class AnnotatedImage:
    """Image payload with its label and (for positives) target boxes.

    Boxes are (x0, y0, x1, y1) in pixel coordinates.
    """

    id: str
    image: GrayImage
    label: int
    boxes: tuple[tuple[float, float, float, float], ...] = ()

    def __post_init__(self):
        if self.label not in (+1, -1):
            raise MisuseError("label must be +1 or -1")
        if self.label == +1 and not self.boxes:
            raise MisuseError("positive images carry at least one box")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _draw_bar(canvas, cx, cy, length, width, angle_deg, intensity):
    """Max-blend a rotated rectangle; 2x2 supersampled coverage."""
    theta = math.radians(angle_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    half_l, half_w = length / 2.0, width / 2.0
    reach = math.hypot(half_l, half_w) + 1.0
    h, w = canvas.shape
    r0 = max(0, int(math.floor(cy - reach)))
    r1 = min(h, int(math.ceil(cy + reach)) + 1)
    c0 = max(0, int(math.floor(cx - reach)))
    c1 = min(w, int(math.ceil(cx + reach)) + 1)
    if r0 >= r1 or c0 >= c1:
        return
    rows = np.arange(r0, r1)[:, None] + np.zeros((1, c1 - c0))
    cols = np.arange(c0, c1)[None, :] + np.zeros((r1 - r0, 1))
    coverage = np.zeros((r1 - r0, c1 - c0))
    for dy in (-0.25, 0.25):
        for dx in (-0.25, 0.25):
            px = cols + dx - cx
            py = rows + dy - cy
            u = cos_t * px + sin_t * py
            v = -sin_t * px + cos_t * py
            coverage += (np.abs(u) <= half_l) & (np.abs(v) <= half_w)
    coverage /= 4.0
    region = canvas[r0:r1, c0:c1]
    np.maximum(region, coverage * intensity, out=region)


def _place_shape(canvas, shape: ShapeSpec, cx, cy, rotation_deg, scale):
    """Render the shape and return the tight bounding box of its geometry."""
    theta = math.radians(rotation_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    xs, ys = [], []
    for bx, by, length, width, bar_angle in shape.bars():
        gx = cx + scale * (cos_t * bx - sin_t * by)
        gy = cy + scale * (sin_t * bx + cos_t * by)
        _draw_bar(
            canvas, gx, gy, scale * length, scale * width,
            bar_angle + rotation_deg, shape.intensity,
        )
        phi = math.radians(bar_angle + rotation_deg)
        cb, sb = math.cos(phi), math.sin(phi)
        for su in (-0.5, 0.5):
            for sv in (-0.5, 0.5):
                dx = su * scale * length
                dy = sv * scale * width
                xs.append(gx + cb * dx - sb * dy)
                ys.append(gy + sb * dx + cb * dy)
    pad = 0.5  # half-pixel pad so lit pixel extents stay inside the box
    return (
        min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad,
    )


def _render_image(
    config: SynthConfig,
    rng: np.random.Generator,
    *,
    with_target: bool,
) -> tuple[GrayImage, Optional[tuple[float, float, float, float]]]:
    canvas = np.zeros((config.height, config.width))
    box = None

    def jittered_center(extent):
        margin = extent / 2.0 + 1.0
        base_x = config.width / 2.0
        base_y = config.height / 2.0
        jx = rng.uniform(-config.jitter_pos, config.jitter_pos)
        jy = rng.uniform(-config.jitter_pos, config.jitter_pos)
        x = min(max(base_x + jx, margin), config.width - margin)
        y = min(max(base_y + jy, margin), config.height - margin)
        return x, y

    if with_target:
        scale = 1.0 + rng.uniform(-config.jitter_scale, config.jitter_scale)
        rot = rng.uniform(-config.jitter_rot, config.jitter_rot)
        cx, cy = jittered_center(config.target.size * scale)
        box = _place_shape(canvas, config.target, cx, cy, rot, scale)
    else:
        for _ in range(config.confusers_per_background):
            if not config.confusers:
                break
            shape = config.confusers[int(rng.integers(len(config.confusers)))]
            scale = 1.0 + rng.uniform(-config.jitter_scale, config.jitter_scale)
            rot = rng.uniform(-config.jitter_rot, config.jitter_rot)
            cx, cy = jittered_center(shape.size * scale)
            _place_shape(canvas, shape, cx, cy, rot, scale)

    for _ in range(config.clutter_dots):
        cx = rng.uniform(2, config.width - 2)
        cy = rng.uniform(2, config.height - 2)
        _draw_bar(canvas, cx, cy, rng.uniform(1.5, 3.5), 1.5,
                  rng.uniform(0, 180), 0.5)

    if config.noise > 0:
        canvas = canvas + config.noise * rng.standard_normal(canvas.shape)
    np.clip(canvas, 0.0, 1.0, out=canvas)
    return GrayImage(pixels=canvas), box


def generate_dataset(config: SynthConfig) -> list[AnnotatedImage]:
    """Positives then backgrounds, each image seeded by (seed, kind, index)."""
    images: list[AnnotatedImage] = []
    for i in range(config.n_positive):
        rng = np.random.default_rng([config.seed, 0, i])
        image, box = _render_image(config, rng, with_target=True)
        images.append(
            AnnotatedImage(
                id=f"pos_{i:04d}", image=image, label=+1, boxes=(box,)
            )
        )
    for i in range(config.n_background):
        rng = np.random.default_rng([config.seed, 1, i])
        image, _ = _render_image(config, rng, with_target=False)
        images.append(
            AnnotatedImage(id=f"bg_{i:04d}", image=image, label=-1)
        )
    return images


# ---------------------------------------------------------------------------
# Features
# ---------------------------------------------------------------------------


def extract_features(image: GrayImage, cell_size: int) -> FeatureGrid:
    """Per-cell 8-bin signed orientation histogram plus occupancy.

    Gradients by central differences (one-sided at borders), votes weighted
    by magnitude, cells L2-normalized with epsilon 1e-6.
    """
    pixels = image.pixels
    h, w = pixels.shape
    if h % cell_size or w % cell_size:
        raise MisuseError(
            f"image dims {h}x{w} not divisible by cell size {cell_size}"
        )
    gy, gx = np.gradient(pixels)
    magnitude = np.hypot(gx, gy)
    angle = np.arctan2(gy, gx)
    bins = np.rint(angle / (math.pi / 4.0)).astype(np.int64) % 8

    rows, cols = h // cell_size, w // cell_size
    cell_row = np.repeat(np.arange(rows), cell_size)[:, None]
    cell_col = np.repeat(np.arange(cols), cell_size)[None, :]
    flat_cell = (cell_row * cols + cell_col).astype(np.int64)

    histogram = np.zeros((rows * cols, 8))
    np.add.at(
        histogram,
        (flat_cell.ravel() + np.zeros_like(bins).ravel(), bins.ravel()),
        magnitude.ravel(),
    )
    occupancy = pixels.reshape(rows, cell_size, cols, cell_size).mean(
        axis=(1, 3)
    )
    cells = np.concatenate(
        [histogram.reshape(rows, cols, 8), occupancy[:, :, None]], axis=2
    )
    norms = np.linalg.norm(cells, axis=2, keepdims=True)
    cells = cells / (norms + _NORM_EPS)
    return FeatureGrid(cells=cells, scale=1.0)


def resize_bilinear(image: GrayImage, out_h: int, out_w: int) -> GrayImage:
    """Deterministic bilinear resampling (half-pixel centers)."""
    pixels = image.pixels
    h, w = pixels.shape
    if out_h <= 0 or out_w <= 0:
        raise MisuseError("output dims must be positive")
    ys = np.clip((np.arange(out_h) + 0.5) * h / out_h - 0.5, 0, h - 1)
    xs = np.clip((np.arange(out_w) + 0.5) * w / out_w - 0.5, 0, w - 1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = pixels[np.ix_(y0, x0)] * (1 - fx) + pixels[np.ix_(y0, x1)] * fx
    bottom = pixels[np.ix_(y1, x0)] * (1 - fx) + pixels[np.ix_(y1, x1)] * fx
    out = top * (1 - fy) + bottom * fy
    return GrayImage(pixels=np.clip(out, 0.0, 1.0))
