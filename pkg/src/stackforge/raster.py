"""Rasterize abstract frame descriptions into FrameRasters.

Every frame of a stack shares one square window so layers align.  Pixels
are filled by supersampled coverage: each pixel is probed on a regular
n x n sub-grid at interior offsets (k+0.5)/n and its value is the rounded
fraction of covered samples times 255.  With supersample=1 values are pure
0/255; higher settings produce the graded boundary pixels that give the
level threshold its meaning and reproduce the density shading of escape
renders just outside the Mandelbrot set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from . import _kernels as kernels
from .core import FrameRaster
from .families import EscapeParams, TreeSquare

__all__ = [
    "Window",
    "RasterConfig",
    "RasterError",
    "FLOWER_WINDOW",
    "JULIA_WINDOW",
    "HYPERBOLA_WINDOW",
    "fit_window",
    "rasterize_polar",
    "rasterize_regions",
    "rasterize_escape",
    "rasterize_membership",
    "mandelbrot_membership_grid",
]


class RasterError(Exception):
    pass


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle in family units."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(f"window must have positive extent, got {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height


FLOWER_WINDOW = Window(-3.2, 3.2, -3.2, 3.2)
JULIA_WINDOW = Window(-2.0, 2.0, -2.0, 2.0)
HYPERBOLA_WINDOW = Window(-3.0, 3.0, -3.0, 3.0)


def fit_window(
    x_min: float, y_min: float, x_max: float, y_max: float, margin: float = 0.10
) -> Window:
    """Smallest square window containing the box, grown by `margin`."""
    cx, cy = (x_min + x_max) / 2.0, (y_min + y_max) / 2.0
    half = max(x_max - x_min, y_max - y_min) / 2.0 * (1.0 + margin)
    return Window(cx - half, cx + half, cy - half, cy + half)


@dataclass(frozen=True)
class RasterConfig:
    """Shared rasterization settings.

    resolution is pixels per side (frames are square); model_width_mm maps
    the window width onto physical millimeters (default 80 mm).
    """

    resolution: int = 512
    window: Window = FLOWER_WINDOW
    supersample: int = 4
    model_width_mm: float = 80.0

    def __post_init__(self):
        if self.resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {self.resolution}")
        if not 1 <= self.supersample <= 8:
            raise ValueError(f"supersample must be in [1, 8], got {self.supersample}")
        w, h = self.window.width, self.window.height
        if abs(w - h) > 1e-9 * max(w, h):
            raise ValueError(f"window must be square so pixels are square, got {self.window}")
        if not self.model_width_mm > 0:
            raise ValueError(f"model_width_mm must be > 0, got {self.model_width_mm}")

    @property
    def pixel_pitch_units(self) -> float:
        return self.window.width / self.resolution

    @property
    def pixel_pitch_mm(self) -> float:
        return self.model_width_mm / self.resolution


def _sample_axis(lo: float, pitch: float, resolution: int, ss: int) -> np.ndarray:
    idx = np.arange(resolution * ss)
    frac = (idx // ss) + ((idx % ss) + 0.5) / ss
    return lo + frac * pitch


_GRID_CACHE: dict = {}


def _polar_grid(cfg: RasterConfig) -> Tuple[np.ndarray, np.ndarray]:
    """(radius, angle in [0, 2pi)) of every supersample point; cached since
    the grid is frame-independent."""
    key = (cfg.resolution, cfg.window, cfg.supersample)
    hit = _GRID_CACHE.get(key)
    if hit is not None:
        return hit
    xs = _sample_axis(cfg.window.x_min, cfg.pixel_pitch_units, cfg.resolution, cfg.supersample)
    ys = _sample_axis(cfg.window.y_min, cfg.pixel_pitch_units, cfg.resolution, cfg.supersample)
    x, y = np.meshgrid(xs, ys)
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    theta[theta < 0] += 2.0 * np.pi
    r.flags.writeable = False
    theta.flags.writeable = False
    if len(_GRID_CACHE) > 4:
        _GRID_CACHE.clear()
    _GRID_CACHE[key] = (r, theta)
    return r, theta


def _reduce_coverage(mask: np.ndarray, cfg: RasterConfig) -> FrameRaster:
    n, ss = cfg.resolution, cfg.supersample
    counts = mask.reshape(n, ss, n, ss).sum(axis=(1, 3), dtype=np.int64)
    total = ss * ss
    values = ((counts * 255 + total // 2) // total).astype(np.uint8)
    pitch = cfg.pixel_pitch_mm
    return FrameRaster(values=values, pixel_pitch=pitch, origin=(pitch / 2.0, pitch / 2.0))


def rasterize_polar(boundary: Callable[[np.ndarray], np.ndarray], cfg: RasterConfig) -> FrameRaster:
    """Coverage raster of the region {(r, theta): r <= boundary(theta)}.

    `boundary` must be total on [0, 2pi] and accept a numpy array of angles
    (a scalar return is broadcast).
    """
    r, theta = _polar_grid(cfg)
    bound = np.asarray(boundary(theta), dtype=np.float64)
    if bound.shape != theta.shape:
        bound = np.broadcast_to(bound, theta.shape)
    if not np.isfinite(bound).all():
        bad = np.unravel_index(int(np.argmin(np.isfinite(bound))), bound.shape)
        raise RasterError(f"boundary evaluation not finite at theta={theta[bad]!r}")
    return _reduce_coverage(r <= bound, cfg)


def rasterize_regions(squares: Sequence[TreeSquare], cfg: RasterConfig) -> FrameRaster:
    """Coverage raster of the union of (convex) squares."""
    n, ss = cfg.resolution, cfg.supersample
    pitch = cfg.pixel_pitch_units
    xs = _sample_axis(cfg.window.x_min, pitch, n, ss)
    ys = _sample_axis(cfg.window.y_min, pitch, n, ss)
    mask = np.zeros((n * ss, n * ss), dtype=bool)
    sample_step = pitch / ss
    for sq in squares:
        c = sq.corner_array()
        # restrict the inside test to the square's bounding box
        i0 = max(0, int(np.floor((c[:, 0].min() - cfg.window.x_min) / sample_step)) - 1)
        i1 = min(n * ss, int(np.ceil((c[:, 0].max() - cfg.window.x_min) / sample_step)) + 1)
        j0 = max(0, int(np.floor((c[:, 1].min() - cfg.window.y_min) / sample_step)) - 1)
        j1 = min(n * ss, int(np.ceil((c[:, 1].max() - cfg.window.y_min) / sample_step)) + 1)
        if i0 >= i1 or j0 >= j1:
            continue
        x, y = np.meshgrid(xs[i0:i1], ys[j0:j1])
        inside = np.ones(x.shape, dtype=bool)
        for a in range(4):
            ax, ay = c[a]
            bx, by = c[(a + 1) % 4]
            inside &= (bx - ax) * (y - ay) - (by - ay) * (x - ax) >= 0.0
        mask[j0:j1, i0:i1] |= inside
    return _reduce_coverage(mask, cfg)


def rasterize_escape(c: complex, p: EscapeParams, cfg: RasterConfig) -> FrameRaster:
    """Coverage raster of the filled Julia set of z^2 + c: the fraction of a
    pixel's supersample points whose orbits stay bounded.

    Colors follow the stack convention (inside = white); near the boundary
    of the Mandelbrot set the supersampled coverage shows the partial
    densities of Cantor-like Julia sets as gray pixels.
    """
    xs = _sample_axis(cfg.window.x_min, cfg.pixel_pitch_units, cfg.resolution, cfg.supersample)
    ys = _sample_axis(cfg.window.y_min, cfg.pixel_pitch_units, cfg.resolution, cfg.supersample)
    x, y = np.meshgrid(xs, ys)
    flags = kernels.julia_bounded(x, y, float(c.real), float(c.imag), p.max_iter, p.escape_radius)
    return _reduce_coverage(flags.astype(bool), cfg)


def rasterize_membership(
    membership: Callable[[np.ndarray, np.ndarray], np.ndarray], cfg: RasterConfig
) -> FrameRaster:
    """Coverage raster of an arbitrary boolean field membership(x, y)."""
    xs = _sample_axis(cfg.window.x_min, cfg.pixel_pitch_units, cfg.resolution, cfg.supersample)
    ys = _sample_axis(cfg.window.y_min, cfg.pixel_pitch_units, cfg.resolution, cfg.supersample)
    x, y = np.meshgrid(xs, ys)
    mask = np.asarray(membership(x, y))
    if mask.shape != x.shape:
        raise RasterError(f"membership returned shape {mask.shape}, expected {x.shape}")
    return _reduce_coverage(mask.astype(bool), cfg)


def mandelbrot_membership_grid(window: Window, px: int, max_iter: int) -> np.ndarray:
    """px-by-px uint8 image (0/255) of Mandelbrot membership at pixel
    centers, row 0 at y_min (flip for image output)."""
    xs = window.x_min + (np.arange(px) + 0.5) * (window.width / px)
    ys = window.y_min + (np.arange(px) + 0.5) * (window.height / px)
    cr, ci = np.meshgrid(xs, ys)
    flags = kernels.mandelbrot_bounded(cr, ci, max_iter, 2.0)
    return (flags * np.uint8(255)).astype(np.uint8)
