"""Shared domain types: parameter intervals, frame rasters, voxel volumes,
triangle meshes, and parameter-space paths.

A "static animation" is a stack of 2D frames indexed by a parameter t; the
voxel volume is its discrete form, with layer i holding the frame at the
i-th parameter sample.  All types here are immutable after construction and
safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

__all__ = [
    "ParamInterval",
    "FrameRaster",
    "VoxelVolume",
    "TriangleMesh",
    "PathSpec",
    "PATH_KINDS",
]


@dataclass(frozen=True)
class ParamInterval:
    """An interval [t_min, t_max] sampled at frame_count evenly spaced points."""

    t_min: float
    t_max: float
    frame_count: int

    def __post_init__(self):
        if not (self.t_min < self.t_max):
            raise ValueError(f"t_min must be < t_max, got [{self.t_min}, {self.t_max}]")
        if self.frame_count < 2:
            raise ValueError(f"frame_count must be >= 2, got {self.frame_count}")

    def sample(self, i: int) -> float:
        """Parameter value of frame i; sample(0) = t_min, sample(n-1) = t_max."""
        if not 0 <= i < self.frame_count:
            raise IndexError(f"frame index {i} out of range [0, {self.frame_count})")
        return self.t_min + i * (self.t_max - self.t_min) / (self.frame_count - 1)

    def samples(self) -> np.ndarray:
        return np.array([self.sample(i) for i in range(self.frame_count)])


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FrameRaster:
    """One frame as an 8-bit occupancy grid.

    values[j, i] is the coverage of the pixel in column i, row j, with 0 =
    outside (black), 255 = inside (white) and intermediate values partial
    coverage from supersampling.  Row index increases with physical y (PNG
    I/O flips rows, so files look the conventional way up).  pixel_pitch is
    mm per pixel and origin the (x, y) mm position of the center of pixel
    (0, 0).
    """

    values: np.ndarray
    pixel_pitch: float
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.uint8)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"values must be a non-empty 2D grid, got shape {v.shape}")
        if not self.pixel_pitch > 0:
            raise ValueError(f"pixel_pitch must be > 0, got {self.pixel_pitch}")
        object.__setattr__(self, "values", _freeze(v.copy() if v is self.values else v))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def white_fraction(self) -> float:
        """Fraction of total possible coverage that is white (mass / 255·N)."""
        return float(self.values.sum()) / (255.0 * self.values.size)


@dataclass(frozen=True)
class VoxelVolume:
    """A stack of frames: the discretized static animation.

    Layer i holds the frame at parameter param.sample(i); slicing recovers
    it exactly (the fiber of the projection onto the parameter axis).
    layer_z gives each layer's physical height in mm; it is uniform
    (i * layer_pitch) unless the volume came from subsampling, where the
    last interval may be shorter.
    """

    layers: Tuple[FrameRaster, ...]
    layer_pitch: float
    param: ParamInterval
    layer_z: Tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if not self.layer_pitch > 0:
            raise ValueError(f"layer_pitch must be > 0, got {self.layer_pitch}")
        if len(layers) != self.param.frame_count:
            raise ValueError(
                f"layer count {len(layers)} != param.frame_count {self.param.frame_count}"
            )
        first = layers[0]
        for k, fr in enumerate(layers):
            if fr.values.shape != first.values.shape or fr.pixel_pitch != first.pixel_pitch:
                raise ValueError(f"layer {k} does not match layer 0 in shape or pitch")
        if self.layer_z is None:
            object.__setattr__(
                self, "layer_z", tuple(i * self.layer_pitch for i in range(len(layers)))
            )
        else:
            zs = tuple(float(z) for z in self.layer_z)
            if len(zs) != len(layers):
                raise ValueError("layer_z length must match layer count")
            if any(b <= a for a, b in zip(zs, zs[1:])):
                raise ValueError("layer_z must be strictly increasing")
            object.__setattr__(self, "layer_z", zs)

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    @property
    def width(self) -> int:
        return self.layers[0].width

    @property
    def height(self) -> int:
        return self.layers[0].height

    @property
    def pixel_pitch(self) -> float:
        return self.layers[0].pixel_pitch

    def slice(self, i: int) -> FrameRaster:
        """Recover frame i (the fiber over param.sample(i)), exactly."""
        if not 0 <= i < len(self.layers):
            raise IndexError(f"layer index {i} out of range [0, {len(self.layers)})")
        return self.layers[i]

    def as_array(self) -> np.ndarray:
        """The full (layers, height, width) uint8 grid."""
        return np.stack([fr.values for fr in self.layers])


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangle mesh; vertices in mm, triangles counter-clockwise
    viewed from outside.  A finalized (capped) mesh is watertight: every
    undirected edge shared by exactly two oppositely directed triangles.
    """

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        t = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        if v.size == 0:
            v = v.reshape(0, 3)
        if t.size == 0:
            t = t.reshape(0, 3)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must be (n, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError(f"triangles must be (m, 3), got {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle index out of range")
        object.__setattr__(self, "vertices", _freeze(v))
        object.__setattr__(self, "triangles", _freeze(t))

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    def triangle_corners(self) -> np.ndarray:
        """(m, 3, 3) corner coordinates."""
        return self.vertices[self.triangles]

    def translated(self, delta) -> "TriangleMesh":
        return TriangleMesh(self.vertices + np.asarray(delta, dtype=np.float64), self.triangles)

    def is_empty(self) -> bool:
        return self.triangle_count == 0


PATH_KINDS = ("cardioid-boundary", "period2-circle", "polyline", "expression")


@dataclass(frozen=True)
class PathSpec:
    """A path through a 2D parameter space (the complex plane for Julia
    families): a named built-in boundary, a polyline through control points,
    or a pair of expression strings x(t), y(t).

    trim_epsilon shrinks both ends of t_range, the trick used to open up a
    view of the end frames (the effective range is
    [t_min + eps, t_max - eps]).
    """

    kind: str
    t_range: ParamInterval
    trim_epsilon: float = 0.0
    points: Optional[Tuple[complex, ...]] = None
    x_expr: Optional[str] = None
    y_expr: Optional[str] = None

    def __post_init__(self):
        if self.kind not in PATH_KINDS:
            raise ValueError(f"unknown path kind {self.kind!r}; expected one of {PATH_KINDS}")
        if self.trim_epsilon < 0:
            raise ValueError(f"trim_epsilon must be >= 0, got {self.trim_epsilon}")
        if not (self.t_range.t_min + self.trim_epsilon < self.t_range.t_max - self.trim_epsilon):
            raise ValueError(
                f"trim_epsilon {self.trim_epsilon} leaves an empty range "
                f"[{self.t_range.t_min}, {self.t_range.t_max}]"
            )
        if self.kind == "polyline":
            if self.points is None or len(self.points) < 2:
                raise ValueError("polyline path needs at least 2 control points")
            object.__setattr__(self, "points", tuple(complex(p) for p in self.points))
        if self.kind == "expression" and (not self.x_expr or not self.y_expr):
            raise ValueError("expression path needs both x and y expression strings")

    @property
    def trimmed_min(self) -> float:
        return self.t_range.t_min + self.trim_epsilon

    @property
    def trimmed_max(self) -> float:
        return self.t_range.t_max - self.trim_epsilon

    def sample_ts(self, count: Optional[int] = None) -> np.ndarray:
        """count evenly spaced t values across the trimmed range."""
        n = self.t_range.frame_count if count is None else count
        if n < 2:
            return np.array([self.trimmed_min])
        return np.linspace(self.trimmed_min, self.trimmed_max, n)


