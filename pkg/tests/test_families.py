import cmath
import math

import numpy as np
import pytest

from stackforge import families as F
from stackforge.core import ParamInterval, PathSpec


class TestPolarFlower:
    def test_paper_anchor_values(self):
        assert F.polar_flower_boundary(1.0, 1.0, 0.0) == pytest.approx(3.0, abs=1e-12)
        assert F.polar_flower_boundary(0.0, 0.37, 1.23) == 2.0
        # cos(pi) = -1 evaluated directly
        assert F.polar_flower_boundary(0.5, 0.5, 0.0) == pytest.approx(1.5, abs=1e-12)

    def test_periodicity(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            s, t, theta = rng.uniform(-2, 2, size=3)
            a = F.polar_flower_boundary(s, t, theta)
            b = F.polar_flower_boundary(s, t, theta + 2 * np.pi)
            # adding 2*pi is itself a rounded float, so allow an ulp-scale slop
            assert abs(a - b) <= 1e-9

    def test_amplitude_bounds(self):
        rng = np.random.default_rng(2)
        s = rng.uniform(-3, 3, 500)
        t = rng.uniform(-3, 3, 500)
        theta = rng.uniform(0, 2 * np.pi, 500)
        r = F.polar_flower_boundary(s, t, theta)
        assert (r >= 2 - np.abs(s) - 1e-12).all()
        assert (r <= 2 + np.abs(s) + 1e-12).all()


class TestPythagoreanTree:
    def test_root_square(self):
        (root,) = F.pythagorean_tree(0, 45.0)
        assert root.depth == 0
        assert root.corners == ((-0.5, 0.0), (0.5, 0.0), (0.5, 1.0), (-0.5, 1.0))

    @pytest.mark.parametrize("theta", [30.0, 37.5, 45.0])
    @pytest.mark.parametrize("depth", [0, 1, 3, 8])
    def test_square_count_is_full_binary_tree(self, depth, theta):
        squares = F.pythagorean_tree(depth, theta)
        assert len(squares) == 2 ** (depth + 1) - 1

    def test_depth1_child_sides_match_construction_figure(self):
        squares = F.pythagorean_tree(1, 30.0)
        sides = sorted(s.side for s in squares[1:])
        assert sides[0] == pytest.approx(0.5, abs=1e-6)
        assert sides[1] == pytest.approx(0.8660254, abs=1e-6)

    def test_smaller_child_on_the_left_for_sharp_angles(self):
        root, left, right = F.pythagorean_tree(1, 30.0)
        assert left.side < right.side
        # left child sits left of the right child
        assert left.corner_array()[:, 0].mean() < right.corner_array()[:, 0].mean()

    @pytest.mark.parametrize("theta", [30.0, 37.5, 45.0])
    def test_area_per_generation_is_one(self, theta):
        """Pythagorean identity: each generation's squares cover unit area."""
        squares = F.pythagorean_tree(6, theta)
        totals = {}
        for s in squares:
            totals[s.depth] = totals.get(s.depth, 0.0) + s.area
        for depth, total in totals.items():
            assert total == pytest.approx(1.0, abs=1e-6), f"depth {depth}"

    def test_guards(self):
        with pytest.raises(ValueError):
            F.pythagorean_tree(3, 0.0)
        with pytest.raises(ValueError):
            F.pythagorean_tree(3, 45.1)
        with pytest.raises(ValueError):
            F.pythagorean_tree(-1, 30.0)
        with pytest.raises(ValueError):
            F.pythagorean_tree(17, 30.0)

    def test_tree_square_invariant(self):
        with pytest.raises(ValueError):
            F.TreeSquare(corners=((0, 0), (1, 0), (1, 2), (0, 2)), depth=0)
        with pytest.raises(ValueError):
            F.TreeSquare(corners=((0, 0), (1, 0), (1.5, 1), (0, 1)), depth=0)


class TestJuliaEscape:
    def test_unit_disk_interior_is_bounded(self):
        out = F.julia_escape(F.EscapeParams(c=0j), 0.5 + 0j)
        assert out.bounded

    def test_outside_unit_disk_escapes(self):
        out = F.julia_escape(F.EscapeParams(c=0j), 2.5 + 0j)
        assert not out.bounded
        assert out.step == 0  # |z0| already beyond the radius

    def test_minus_one_orbit_bounded(self):
        # independent oracle: iterate 1000 steps with complex arithmetic
        z = 0j
        for _ in range(1000):
            z = z * z - 1
            assert abs(z) <= 2.0
        out = F.julia_escape(F.EscapeParams(c=-1 + 0j, max_iter=1000), 0j)
        assert out.bounded

    def test_escape_step_counts_orbit_index(self):
        # orbit of 0 under c=1: 0, 1, 2, 5 -> exceeds radius 2 at step 3
        out = F.julia_escape(F.EscapeParams(c=1 + 0j), 0j)
        assert (out.bounded, out.step) == (False, 3)

    def test_non_finite_inputs_escape_at_zero(self):
        out = F.julia_escape(F.EscapeParams(c=0j), complex(float("nan"), 0))
        assert (out.bounded, out.step) == (False, 0)
        out = F.julia_escape(F.EscapeParams(c=complex(float("inf"), 0)), 1 + 0j)
        assert not out.bounded

    def test_escape_monotone_in_radius(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            c = complex(*rng.uniform(-1.5, 1.5, 2))
            z0 = complex(*rng.uniform(-2, 2, 2))
            small = F.julia_escape(F.EscapeParams(c=c, escape_radius=2.0), z0)
            big = F.julia_escape(F.EscapeParams(c=c, escape_radius=3.0), z0)
            if not big.bounded:
                assert not small.bounded
                assert small.step <= big.step

    def test_params_validated(self):
        with pytest.raises(ValueError):
            F.EscapeParams(max_iter=0)
        with pytest.raises(ValueError):
            F.EscapeParams(escape_radius=1.5)


class TestMandelbrot:
    def test_known_members(self):
        assert F.mandelbrot_membership(0j)
        assert not F.mandelbrot_membership(1 + 0j)
        assert F.mandelbrot_membership(0.25 + 0j, max_iter=1000)  # cardioid cusp

    def test_conjugation_symmetry(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            c = complex(*rng.uniform(-2, 2, 2))
            assert F.mandelbrot_membership(c, 128) == F.mandelbrot_membership(c.conjugate(), 128)

    def test_low_iteration_only_over_includes(self):
        """64-iteration classification may keep points that 4096 iterations
        reject, never the other way, and mistakes hug the boundary."""
        xs = np.linspace(-2.0, 2.0, 32)
        grid = [complex(x, y) for x in xs for y in xs]
        m64 = np.array([F.mandelbrot_membership(c, 64) for c in grid])
        m4096 = np.array([F.mandelbrot_membership(c, 4096) for c in grid])
        assert not (m4096 & ~m64).any(), "high-iteration members must survive low iteration"
        for c, lo, hi in zip(grid, m64, m4096):
            if lo == hi:
                continue
            # the misclassified point must lie within 0.1 of the boundary as
            # classified by the 4096-iteration oracle
            probes = [
                c + complex(dx, dy)
                for dx in np.linspace(-0.1, 0.1, 9)
                for dy in np.linspace(-0.1, 0.1, 9)
                if math.hypot(dx, dy) <= 0.1
            ]
            labels = {F.mandelbrot_membership(p, 4096) for p in probes}
            assert len(labels) == 2, f"{c} misclassified but not near the boundary"


class TestPaths:
    def test_cardioid_cusp_and_basilica(self):
        assert F.cardioid_path(0.0) == pytest.approx(0.25 + 0j, abs=1e-12)
        assert F.cardioid_path(math.pi) == pytest.approx(-0.75 + 0j, abs=1e-12)

    def test_cardioid_trim_value_from_parabolic_implosion(self):
        c = F.cardioid_path(0.075)
        assert abs(c.real - 0.251402) <= 5e-7
        assert abs(c.imag - 0.000105321) <= 5e-10

    def test_cardioid_conjugation(self):
        rng = np.random.default_rng(5)
        for t in rng.uniform(0, 2 * math.pi, 50):
            a = F.cardioid_path(2 * math.pi - t)
            b = F.cardioid_path(t)
            assert abs(a - b.conjugate()) <= 1e-12

    def test_period2_circle(self):
        assert F.period2_circle_path(0.0) == pytest.approx(-0.75 + 0j, abs=1e-12)
        assert F.period2_circle_path(math.pi) == pytest.approx(-1.25 + 0j, abs=1e-12)
        assert F.period2_circle_path(math.pi / 2) == pytest.approx(-1 + 0.25j, abs=1e-12)

    def test_polyline_arclength_interpolation(self):
        spec = PathSpec(
            kind="polyline",
            t_range=ParamInterval(0.0, 1.0, 3),
            points=(0j, 1 + 0j, 1 + 1j),
        )
        assert F.evaluate_path(spec, 0.0) == 0j
        assert F.evaluate_path(spec, 0.5) == pytest.approx(1 + 0j, abs=1e-12)
        assert F.evaluate_path(spec, 1.0) == pytest.approx(1 + 1j, abs=1e-12)

    def test_degenerate_polyline_is_constant(self):
        spec = PathSpec(
            kind="polyline",
            t_range=ParamInterval(0.0, 1.0, 2),
            points=(-1 + 0j, -1 + 0j),
        )
        assert F.evaluate_path(spec, 0.3) == -1 + 0j

    def test_expression_path(self):
        spec = PathSpec(
            kind="expression",
            t_range=ParamInterval(0.0, 2 * math.pi, 5),
            x_expr="cos(t)",
            y_expr="sin(t)",
        )
        for t in (0.0, 1.0, 2.5):
            assert F.evaluate_path(spec, t) == pytest.approx(cmath.exp(1j * t), abs=1e-12)

    def test_path_points_matches_scalar(self):
        spec = PathSpec(kind="cardioid-boundary", t_range=ParamInterval(0.0, math.pi, 7))
        ts = spec.sample_ts()
        pts = F.path_points(spec, ts)
        for t, c in zip(ts, pts):
            assert complex(c) == F.evaluate_path(spec, t)


class TestHyperbola:
    def test_examples(self):
        assert F.hyperbola_frame_membership((1.0, 1.0), 1.0, 0.05)
        assert F.hyperbola_frame_membership((0.0, 2.0), 0.0, 0.05)  # the axes at t=0
        assert not F.hyperbola_frame_membership((1.0, 1.0), 0.5, 0.05)

    def test_half_width_guard(self):
        with pytest.raises(ValueError):
            F.hyperbola_frame_membership((1.0, 1.0), 1.0, 0.0)
