"""Built-in deforming families: polar flowers, Pythagorean trees, filled
Julia sets with paths through the Mandelbrot parameter plane, and the
hyperbola pencil xy = t.

All functions are pure; scalar arguments may usually be numpy arrays and
broadcast elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import exprlang
from .core import ParamInterval, PathSpec

__all__ = [
    "polar_flower_boundary",
    "TreeSquare",
    "pythagorean_tree",
    "tree_bounding_box",
    "EscapeParams",
    "EscapeOutcome",
    "julia_escape",
    "mandelbrot_membership",
    "cardioid_path",
    "period2_circle_path",
    "hyperbola_frame_membership",
    "evaluate_path",
    "path_points",
]

MAX_TREE_DEPTH = 16


def polar_flower_boundary(s, t, theta):
    """Boundary radius of the five-petal flower: 2 + s*cos(5*theta + 2*pi*t).

    s is the wave amplitude and t the phase shift; the coupled one-parameter
    family sets s = t.
    """
    return 2.0 + s * np.cos(5.0 * theta + 2.0 * np.pi * t)


@dataclass(frozen=True)
class TreeSquare:
    """One square of a Pythagorean tree, with its recursion depth.

    Corners are in order (base-left, base-right, far-right, far-left), the
    base edge being the side the square was attached by.
    """

    corners: Tuple[Tuple[float, float], ...]
    depth: int

    def __post_init__(self):
        c = np.asarray(self.corners, dtype=np.float64)
        if c.shape != (4, 2):
            raise ValueError(f"need 4 corner points, got shape {c.shape}")
        sides = np.roll(c, -1, axis=0) - c
        lengths = np.hypot(sides[:, 0], sides[:, 1])
        scale = lengths.max()
        if scale <= 0 or (lengths.max() - lengths.min()) > 1e-9 * scale:
            raise ValueError("corners do not form a square (unequal sides)")
        dots = np.abs(np.einsum("ij,ij->i", sides, np.roll(sides, -1, axis=0)))
        if dots.max() > 1e-9 * scale * scale:
            raise ValueError("corners do not form a square (angles not right)")
        object.__setattr__(self, "corners", tuple((float(x), float(y)) for x, y in c))

    @property
    def side(self) -> float:
        (x0, y0), (x1, y1) = self.corners[0], self.corners[1]
        return math.hypot(x1 - x0, y1 - y0)

    @property
    def area(self) -> float:
        return self.side**2

    def corner_array(self) -> np.ndarray:
        return np.asarray(self.corners, dtype=np.float64)


def pythagorean_tree(depth: int, theta_deg: float) -> List[TreeSquare]:
    """All squares of the Pythagorean tree through recursion depth `depth`.

    The root is the unit square with its bottom edge on the x-axis centered
    at the origin.  Each square grows a right triangle (minimal angle
    theta_deg) on its far side and a child square on each leg: the child on
    the left leg is scaled by sin(theta), the one on the right by
    cos(theta), matching the construction figures.
    """
    if not 0.0 < theta_deg <= 45.0:
        raise ValueError(f"theta_deg must be in (0, 45], got {theta_deg}")
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    if depth > MAX_TREE_DEPTH:
        raise ValueError(
            f"depth {depth} exceeds the guard limit {MAX_TREE_DEPTH} "
            f"(square count grows as 2^(depth+1))"
        )

    theta = math.radians(theta_deg)
    phi = math.pi / 2.0 - theta  # rotation of the left leg relative to the far side
    cos_phi, sin_phi = math.cos(phi), math.sin(phi)
    sin_t, cos_t = math.sin(theta), math.cos(theta)

    def build(p: complex, q: complex, d: int, out: List[TreeSquare]):
        edge = q - p
        n = complex(-edge.imag, edge.real)  # left normal of the base edge
        a, b = p + n, q + n
        out.append(
            TreeSquare(
                corners=((p.real, p.imag), (q.real, q.imag), (b.real, b.imag), (a.real, a.imag)),
                depth=d,
            )
        )
        if d == depth:
            return
        u = b - a
        apex = a + sin_t * complex(u.real * cos_phi - u.imag * sin_phi,
                                   u.real * sin_phi + u.imag * cos_phi)
        build(a, apex, d + 1, out)
        build(apex, b, d + 1, out)

    squares: List[TreeSquare] = []
    build(complex(-0.5, 0.0), complex(0.5, 0.0), 0, squares)
    return squares


def tree_bounding_box(squares: Sequence[TreeSquare]) -> Tuple[float, float, float, float]:
    """(x_min, y_min, x_max, y_max) over all square corners."""
    pts = np.concatenate([s.corner_array() for s in squares])
    return (
        float(pts[:, 0].min()),
        float(pts[:, 1].min()),
        float(pts[:, 0].max()),
        float(pts[:, 1].max()),
    )


@dataclass(frozen=True)
class EscapeParams:
    """Settings for iterating f_c(z) = z^2 + c."""

    c: complex = 0j
    max_iter: int = 500
    escape_radius: float = 2.0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.escape_radius >= 2.0:
            raise ValueError(
                f"escape_radius must be >= 2 (escape bound for quadratics), "
                f"got {self.escape_radius}"
            )


class EscapeOutcome(NamedTuple):
    bounded: bool
    step: Optional[int]  # first n with |z_n| > escape_radius, None if bounded


def julia_escape(p: EscapeParams, z0: complex) -> EscapeOutcome:
    """Iterate z <- z^2 + c from z0, checking |z_n| against the escape
    radius for n = 0 .. max_iter.  Non-finite inputs escape at step 0."""
    zr, zi = float(z0.real), float(z0.imag)
    cr, ci = float(p.c.real), float(p.c.imag)
    r2 = p.escape_radius * p.escape_radius
    for n in range(p.max_iter + 1):
        m = zr * zr + zi * zi
        if not m <= r2:  # catches > r2 as well as nan from non-finite input
            return EscapeOutcome(bounded=False, step=n)
        if n == p.max_iter:
            break
        zr, zi = zr * zr - zi * zi + cr, 2.0 * zr * zi + ci
    return EscapeOutcome(bounded=True, step=None)


def mandelbrot_membership(c: complex, max_iter: int = 500) -> bool:
    """True iff the critical orbit 0, c, c^2+c, ... stays bounded."""
    return julia_escape(EscapeParams(c=c, max_iter=max_iter), 0j).bounded


def cardioid_path(t: float) -> complex:
    """Boundary of the Mandelbrot set's main cardioid; t in [0, pi] walks
    from the cusp at 1/4 to the Basilica point -3/4."""
    ct = np.cos(t)
    x = 0.5 * ct * (1.0 - ct) + 0.25
    y = 0.5 * np.sin(t) * (1.0 - ct)
    return complex(x, y) if np.isscalar(x) or np.ndim(x) == 0 else x + 1j * y


def period2_circle_path(t: float) -> complex:
    """Boundary of the period-2 component: circle of radius 1/4 about -1."""
    x = -1.0 + 0.25 * np.cos(t)
    y = 0.25 * np.sin(t)
    return complex(x, y) if np.isscalar(x) or np.ndim(x) == 0 else x + 1j * y


def hyperbola_frame_membership(point, t: float, half_width: float = 0.05):
    """True where |x*y - t| <= half_width: the level set xy = t thickened so
    the curve prints with nonzero width."""
    if not half_width > 0:
        raise ValueError(f"half_width must be > 0, got {half_width}")
    x, y = point
    return np.abs(np.asarray(x) * np.asarray(y) - t) <= half_width


def _polyline_points(spec: PathSpec, ts: np.ndarray) -> np.ndarray:
    pts = np.asarray(spec.points, dtype=np.complex128)
    seg = np.abs(np.diff(pts))
    total = seg.sum()
    if total == 0.0:
        return np.full_like(ts, pts[0], dtype=np.complex128)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    u = (ts - spec.t_range.t_min) / (spec.t_range.t_max - spec.t_range.t_min)
    s = np.clip(u, 0.0, 1.0) * total
    re = np.interp(s, cum, pts.real)
    im = np.interp(s, cum, pts.imag)
    return re + 1j * im


def path_points(spec: PathSpec, ts) -> np.ndarray:
    """Evaluate the path at an array of t values (complex output)."""
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    if spec.kind == "cardioid-boundary":
        return cardioid_path(ts)
    if spec.kind == "period2-circle":
        return period2_circle_path(ts)
    if spec.kind == "polyline":
        return _polyline_points(spec, ts)
    x_ast = exprlang.parse(spec.x_expr)
    y_ast = exprlang.parse(spec.y_expr)
    xs = np.broadcast_to(exprlang.evaluate_array(x_ast, {"t": ts}), ts.shape)
    ys = np.broadcast_to(exprlang.evaluate_array(y_ast, {"t": ts}), ts.shape)
    return xs + 1j * ys


def evaluate_path(spec: PathSpec, t: float) -> complex:
    """The path point c = gamma(t)."""
    return complex(path_points(spec, [t])[0])
