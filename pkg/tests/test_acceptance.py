"""Acceptance suite: one test per criterion, each at its stated tolerance.

The tutorial fixture runs the real 161-frame 512x512 job from
configs/flowers.json once per session; run with `-v` (add `-s` to see the
PASS lines) to get one line per criterion.
"""

import math
import os
import struct
import time
from pathlib import Path

import numpy as np
import pytest
import scipy.ndimage as ndi

from stackforge import cli, families
from stackforge import raster as R
from stackforge.core import ParamInterval
from stackforge.mesher import (
    MeshConfig,
    export_stl,
    extract_isosurface,
    mesh_statistics,
    parse_stl,
    rasterize_cross_section,
)
from stackforge.printcheck import overhang_report
from stackforge.stack import import_png_stack, strip_alpha

from conftest import make_cone, make_cube, voxelized_ball

REPO = Path(__file__).resolve().parent.parent
FLOWERS_CONFIG = REPO / "configs" / "flowers.json"


def ok(name):
    print(f"ACCEPTANCE PASS: {name}")


@pytest.fixture(scope="module")
def tutorial_run(tmp_path_factory):
    """Full tutorial pipeline in a scratch cwd; shared by several criteria."""
    workdir = tmp_path_factory.mktemp("tutorial")
    old = os.getcwd()
    os.chdir(workdir)
    try:
        t0 = time.perf_counter()
        exit_code = cli.main(["run", "--config", str(FLOWERS_CONFIG)])
        elapsed = time.perf_counter() - t0
    finally:
        os.chdir(old)
    return {
        "workdir": workdir,
        "exit_code": exit_code,
        "elapsed": elapsed,
        "frames_dir": workdir / "out" / "flowers",
        "stl": workdir / "out" / "flowers.stl",
    }


class TestTutorialReproduction:
    def test_criterion(self, tutorial_run):
        assert tutorial_run["exit_code"] == 0
        names = sorted(p.name for p in tutorial_run["frames_dir"].glob("*.png"))
        assert names == [f"flowers_{1000 + i}.png" for i in range(161)]
        param = ParamInterval(0.2, 1.0, 161)
        assert np.allclose(np.diff(param.samples()), 0.005, atol=1e-12)
        stats = mesh_statistics(parse_stl(tutorial_run["stl"]))
        assert stats.watertight
        assert tutorial_run["elapsed"] < 60.0, f"took {tutorial_run['elapsed']:.1f}s"
        ok(f"tutorial reproduction ({tutorial_run['elapsed']:.1f}s, "
           f"{stats.triangle_count} triangles)")


class TestFlowerAreaOracle:
    def test_criterion(self, tutorial_run):
        vol = import_png_stack(tutorial_run["frames_dir"])
        window_area = 6.4 * 6.4
        for i, t in ((0, 0.2), (80, 0.6), (160, 1.0)):
            expected = (4 * math.pi + math.pi * t * t / 2.0) / window_area
            got = vol.slice(i).white_fraction()
            assert got == pytest.approx(expected, rel=0.01), f"frame {i} (t={t})"
        ok("flower area oracle at t in {0.2, 0.6, 1.0}")


class TestPaperValueRegression:
    def test_criterion(self):
        assert abs(families.cardioid_path(0.0) - 0.25) <= 1e-12
        assert abs(families.cardioid_path(math.pi) - (-0.75)) <= 1e-12
        c = families.cardioid_path(0.075)
        assert abs(c.real - 0.251402) <= 0.5e-6   # 6 significant digits
        assert abs(c.imag - 0.000105321) <= 0.5e-9
        ok("cardioid parametrization matches reported values")


class TestJuliaDisk:
    def test_criterion(self):
        cfg = R.RasterConfig(resolution=512, window=R.JULIA_WINDOW, supersample=4)
        frame = R.rasterize_escape(0j, families.EscapeParams(max_iter=500), cfg)
        area_units = frame.white_fraction() * cfg.window.area
        assert area_units == pytest.approx(math.pi, rel=0.01)
        assert np.array_equal(frame.values, frame.values[::-1])
        ok(f"unit-disk Julia set: area {area_units:.4f} vs pi, flip-symmetric")


class TestMeshCorrectness:
    def test_criterion(self):
        from stackforge.core import FrameRaster
        from stackforge.stack import assemble

        ball = voxelized_ball(radius=20.0, grid=48, supersample=4)
        frames = [FrameRaster(values=a, pixel_pitch=1.0) for a in ball]
        vol = assemble(frames, 1.0, ParamInterval(0.0, 1.0, 48))
        t0 = time.perf_counter()
        mesh = extract_isosurface(vol, MeshConfig(level=128))
        elapsed = time.perf_counter() - t0
        stats = mesh_statistics(mesh)
        assert stats.watertight
        assert stats.euler_characteristic == 2
        assert stats.volume_mm3 == pytest.approx(4 / 3 * math.pi * 20**3, rel=0.03)
        assert stats.area_mm2 == pytest.approx(4 * math.pi * 20**2, rel=0.05)
        assert elapsed < 5.0
        ok(f"ball fixture: volume {stats.volume_mm3:.0f}, area {stats.area_mm2:.0f}, "
           f"chi=2, {elapsed:.2f}s")


class TestSliceFidelity:
    def test_criterion(self, tutorial_run):
        vol = import_png_stack(tutorial_run["frames_dir"])
        mesh = extract_isosurface(vol, MeshConfig(level=128))
        level = 128
        for i in (20, 55, 80, 120, 145):
            z = vol.layer_z[i] + 1e-4 * vol.layer_pitch
            section = rasterize_cross_section(mesh, z, vol.layers[i]) > 0
            source = vol.slice(i).values >= level
            diff = section != source
            if not diff.any():
                continue
            boundary = source != ndi.binary_erosion(source)
            boundary |= ndi.binary_dilation(source) != source
            band = ndi.binary_dilation(
                boundary, structure=np.ones((3, 3), dtype=bool), iterations=2
            )
            assert not (diff & ~band).any(), f"layer {i}: differences beyond 2-pixel band"
        ok("mesh cross sections match source frames within a 2-pixel band")


class TestStlFormat:
    def test_criterion(self, tmp_path, tutorial_run):
        cube_path = tmp_path / "cube.stl"
        assert export_stl(make_cube(), cube_path) == 684
        assert cube_path.stat().st_size == 684

        for name, mesh in (
            ("cube", make_cube(side=0.35, origin=(1.1, 2.2, 3.3))),
            ("flower", parse_stl(tutorial_run["stl"])),
        ):
            path = tmp_path / f"{name}_rt.stl"
            export_stl(mesh, path)
            back = parse_stl(path)
            assert back.triangle_count == mesh.triangle_count
            assert np.array_equal(
                mesh.triangle_corners().astype(np.float32),
                back.triangle_corners().astype(np.float32),
            )
        ok("binary STL format: 684-byte cube, bitwise float32 round-trips")


class TestTreeCombinatorics:
    def test_criterion(self):
        for theta in (30.0, 37.5, 45.0):
            squares = families.pythagorean_tree(8, theta)
            assert len(squares) == 511
            by_depth = {}
            for s in squares:
                by_depth[s.depth] = by_depth.get(s.depth, 0.0) + s.area
            for d, total in by_depth.items():
                assert abs(total - 1.0) <= 1e-6, f"theta={theta} depth={d}"
        sides = sorted(s.side for s in families.pythagorean_tree(1, 30.0)[1:])
        assert abs(sides[0] - 0.5) <= 1e-6
        assert abs(sides[1] - 0.8660254) <= 1e-6
        ok("tree combinatorics: 511 squares, unit area per generation, 30-60-90 sides")


class TestPrintabilityHeuristics:
    def test_criterion(self):
        cone = make_cone(overhang_deg=50.0)
        assert overhang_report(cone, 45.0).flagged_triangles > 0
        assert overhang_report(cone, 60.0).flagged_triangles == 0
        areas = [overhang_report(cone, t).flagged_area_mm2 for t in (40, 45, 50, 55, 60)]
        assert all(a >= b for a, b in zip(areas, areas[1:]))
        ok("50-degree cone flagged at 45, clean at 60, monotone flagged area")


class TestAlphaHandling:
    def test_criterion(self, tmp_path):
        from PIL import Image

        from stackforge.stack import AlphaChannelError

        rgba = np.zeros((32, 32, 4), dtype=np.uint8)
        rgba[8:24, 8:24] = (255, 255, 255, 255)
        rgba[4:8, 4:8] = (255, 255, 255, 96)
        composited = np.rint(
            rgba[..., :3].astype(np.float64) * (rgba[..., 3:4].astype(np.float64) / 255.0)
        ).astype(np.uint8)

        rgba_dir, rgb_dir = tmp_path / "rgba", tmp_path / "rgb"
        rgba_dir.mkdir(), rgb_dir.mkdir()
        for i in range(2):
            Image.fromarray(rgba, mode="RGBA").save(rgba_dir / f"f_{1000 + i}.png")
            Image.fromarray(composited, mode="RGB").save(rgb_dir / f"f_{1000 + i}.png")

        with pytest.raises(AlphaChannelError) as err:
            import_png_stack(rgba_dir, strict_alpha=True)
        assert "f_1000.png" in str(err.value)

        lenient = import_png_stack(rgba_dir, strict_alpha=False)
        reference = import_png_stack(rgb_dir)
        for i in range(2):
            assert np.array_equal(lenient.slice(i).values, reference.slice(i).values)

        src = tmp_path / "s.png"
        Image.fromarray(rgba, mode="RGBA").save(src)
        once = strip_alpha(src, tmp_path / "once.png")
        twice = strip_alpha(once, tmp_path / "twice.png")
        assert once.read_bytes() == twice.read_bytes()
        ok("alpha handling: strict rejection, lenient compositing, idempotent strip")


class TestDeterminism:
    def test_criterion(self, tutorial_run, tmp_path_factory):
        """A second full end-to-end run must reproduce every byte."""
        second = tmp_path_factory.mktemp("determinism")
        old = os.getcwd()
        os.chdir(second)
        try:
            assert cli.main(["run", "--config", str(FLOWERS_CONFIG)]) == 0
        finally:
            os.chdir(old)
        first_dir = tutorial_run["frames_dir"]
        second_dir = second / "out" / "flowers"
        for i in range(161):
            name = f"flowers_{1000 + i}.png"
            assert (first_dir / name).read_bytes() == (second_dir / name).read_bytes(), name
        assert tutorial_run["stl"].read_bytes() == (second / "out" / "flowers.stl").read_bytes()
        ok("bitwise-identical PNG stack and STL across independent runs")
