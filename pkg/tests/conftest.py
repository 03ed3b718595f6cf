"""Shared fixtures: hand-built meshes with known measures and small frame
stacks used across the suite."""

import math

import numpy as np
import pytest

from stackforge.core import FrameRaster, ParamInterval, TriangleMesh
from stackforge.stack import assemble

# ---------------------------------------------------------------- meshes


def make_cube(side=1.0, origin=(0.0, 0.0, 0.0)):
    """Axis-aligned cube as 12 outward-oriented triangles."""
    ox, oy, oz = origin
    s = side
    v = np.array(
        [
            (ox, oy, oz), (ox + s, oy, oz), (ox + s, oy + s, oz), (ox, oy + s, oz),
            (ox, oy, oz + s), (ox + s, oy, oz + s), (ox + s, oy + s, oz + s), (ox, oy + s, oz + s),
        ]
    )
    t = np.array(
        [
            (0, 2, 1), (0, 3, 2),  # bottom (z=0, normal -z)
            (4, 5, 6), (4, 6, 7),  # top
            (0, 1, 5), (0, 5, 4),  # front (y=0)
            (2, 3, 7), (2, 7, 6),  # back
            (0, 4, 7), (0, 7, 3),  # left (x=0)
            (1, 2, 6), (1, 6, 5),  # right
        ]
    )
    return TriangleMesh(vertices=v, triangles=t)


def make_tetrahedron():
    """Regular-ish tetrahedron with outward orientation."""
    v = np.array([(0, 0, 0), (1, 0, 0), (0.5, math.sqrt(3) / 2, 0), (0.5, 0.3, 1.0)])
    t = np.array([(0, 2, 1), (0, 1, 3), (1, 2, 3), (2, 0, 3)])
    return TriangleMesh(vertices=v, triangles=t)


def make_cone(overhang_deg=50.0, r_bottom=1.0, height=2.0, n=64):
    """Closed solid widening upward: lateral walls lean outward by
    overhang_deg from vertical, so their undersides overhang by exactly
    that angle."""
    r_top = r_bottom + height * math.tan(math.radians(overhang_deg))
    ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    bottom = np.stack([r_bottom * np.cos(ang), r_bottom * np.sin(ang), np.zeros(n)], axis=1)
    top = np.stack([r_top * np.cos(ang), r_top * np.sin(ang), np.full(n, height)], axis=1)
    verts = np.concatenate([bottom, top, [[0, 0, 0]], [[0, 0, height]]])
    c_bot, c_top = 2 * n, 2 * n + 1
    tris = []
    for i in range(n):
        j = (i + 1) % n
        tris.append((c_bot, j, i))              # bottom fan, normal -z
        tris.append((c_top, n + i, n + j))      # top fan, normal +z
        tris.append((i, j, n + j))              # lateral
        tris.append((i, n + j, n + i))
    return TriangleMesh(vertices=verts, triangles=np.array(tris))


def make_dome_shell(r_outer=10.0, r_inner=8.0, n_theta=96, n_phi=24):
    """Hollow dome (hemispherical shell) resting rim-down: the outer surface
    faces up and out, the inner surface is the downward-facing ceiling."""
    ang = np.linspace(0.0, 2.0 * math.pi, n_theta, endpoint=False)
    phis = np.linspace(0.0, math.pi / 2.0, n_phi + 1)  # latitude, 0 = rim

    def ring(r, phi):
        return np.stack(
            [r * math.cos(phi) * np.cos(ang), r * math.cos(phi) * np.sin(ang),
             np.full(n_theta, r * math.sin(phi))],
            axis=1,
        )

    verts = []
    for r in (r_outer, r_inner):
        for phi in phis[:-1]:
            verts.append(ring(r, phi))
        verts.append(np.array([[0.0, 0.0, r]]))  # pole
    verts = np.concatenate(verts)
    n_rings = n_phi
    pole_out = n_rings * n_theta
    base_in = pole_out + 1
    pole_in = base_in + n_rings * n_theta

    def rid(base, k, i):
        return base + k * n_theta + (i % n_theta)

    tris = []
    for k in range(n_rings - 1):
        for i in range(n_theta):
            a, b = rid(0, k, i), rid(0, k, i + 1)
            c, d = rid(0, k + 1, i), rid(0, k + 1, i + 1)
            tris += [(a, b, d), (a, d, c)]          # outer, normals outward/up
    for i in range(n_theta):
        tris.append((rid(0, n_rings - 1, i), rid(0, n_rings - 1, i + 1), pole_out))
    for k in range(n_rings - 1):
        for i in range(n_theta):
            a, b = rid(base_in, k, i), rid(base_in, k, i + 1)
            c, d = rid(base_in, k + 1, i), rid(base_in, k + 1, i + 1)
            tris += [(a, d, b), (a, c, d)]          # inner, normals into the cavity
    for i in range(n_theta):
        tris.append((rid(base_in, n_rings - 1, i + 1), rid(base_in, n_rings - 1, i), pole_in))
    for i in range(n_theta):                        # rim annulus at z=0, normal -z
        a, b = rid(0, 0, i), rid(0, 0, i + 1)
        c, d = rid(base_in, 0, i), rid(base_in, 0, i + 1)
        tris += [(a, d, b), (a, c, d)]
    return TriangleMesh(vertices=verts, triangles=np.array(tris))


# ---------------------------------------------------------------- volumes


def voxelized_ball(radius=20.0, grid=48, supersample=4):
    """Coverage-voxelized ball: boundary voxels carry the fraction of their
    supersample points inside the sphere, the same convention the frame
    rasterizer uses."""
    n, ss = grid, supersample
    center = (n - 1) / 2.0
    idx = np.arange(n)
    off = (np.arange(ss) + 0.5) / ss - 0.5
    count = np.zeros((n, n, n), dtype=np.int64)
    r2 = radius * radius
    for ox in off:
        x2 = (idx + ox - center) ** 2
        for oy in off:
            y2 = (idx + oy - center) ** 2
            for oz in off:
                z2 = (idx + oz - center) ** 2
                count += (
                    x2[:, None, None] + y2[None, :, None] + z2[None, None, :]
                ) <= r2
    total = ss**3
    return ((count * 255 + total // 2) // total).astype(np.uint8)


@pytest.fixture
def small_flower_volume():
    """Tiny coupled-flower stack (graded pixels) for mesher tests."""
    from stackforge.families import polar_flower_boundary
    from stackforge.raster import RasterConfig, rasterize_polar

    cfg = RasterConfig(resolution=64, supersample=4)
    param = ParamInterval(0.2, 1.0, 9)
    frames = [
        rasterize_polar(lambda th, t=param.sample(i): polar_flower_boundary(t, t, th), cfg)
        for i in range(param.frame_count)
    ]
    return assemble(frames, layer_pitch=0.2, param=param)


def random_frames(rng, count=3, size=8, pitch=0.15625):
    return [
        FrameRaster(
            values=rng.integers(0, 256, size=(size, size), dtype=np.uint8).astype(np.uint8),
            pixel_pitch=pitch,
            origin=(pitch / 2, pitch / 2),
        )
        for _ in range(count)
    ]
