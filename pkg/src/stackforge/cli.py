"""Command-line pipeline: generate frame stacks, mesh them, check
printability, or run the whole job from a JSON config.

Exit codes: 0 success, 1 usage or config error, 2 generation failure,
3 meshing failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__, exprlang, families
from .core import FrameRaster, ParamInterval, PathSpec
from .mesher import (
    MeshConfig,
    export_stl,
    extract_isosurface,
    mesh_statistics,
    parse_stl,
)
from .printcheck import PrintCheckError, overhang_report, place_on_plate
from .raster import (
    FLOWER_WINDOW,
    HYPERBOLA_WINDOW,
    JULIA_WINDOW,
    RasterConfig,
    Window,
    fit_window,
    rasterize_escape,
    rasterize_membership,
    rasterize_polar,
    rasterize_regions,
)
from .stack import (
    DEFAULT_LAYER_PITCH_MM,
    export_png_stack,
    import_png_stack,
    read_sidecar,
    write_sidecar,
)

__all__ = ["main", "load_config", "config_from_dict", "ConfigError", "JobConfig", "run_job"]

FAMILIES = ("polar-flower", "pythagorean-tree", "julia-path", "hyperbola", "expression")


class ConfigError(Exception):
    def __init__(self, key_path: str, message: str):
        super().__init__(f"config error at {key_path!r}: {message}")
        self.key_path = key_path


class _Section:
    """Dict wrapper that reports full key paths on errors."""

    def __init__(self, data: dict, path: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(path or "<root>", f"expected an object, got {type(data).__name__}")
        self.data = data
        self.path = path

    def _key(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def section(self, key: str, required: bool = False) -> Optional["_Section"]:
        if key not in self.data:
            if required:
                raise ConfigError(self._key(key), "missing required section")
            return None
        return _Section(self.data[key], self._key(key))

    def get(self, key: str, kind, default=None, required: bool = False):
        if key not in self.data:
            if required:
                raise ConfigError(self._key(key), "missing required key")
            return default
        value = self.data[key]
        try:
            if kind is float:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise TypeError
                return float(value)
            if kind is int:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise TypeError
                return int(value)
            if kind is bool:
                if not isinstance(value, bool):
                    raise TypeError
                return value
            if kind is str:
                if not isinstance(value, str):
                    raise TypeError
                return value
            if kind is list:
                if not isinstance(value, list):
                    raise TypeError
                return value
        except TypeError:
            raise ConfigError(
                self._key(key), f"expected {kind.__name__}, got {value!r}"
            ) from None
        raise AssertionError(kind)


@dataclass
class JobConfig:
    family: str
    param: ParamInterval
    raster: RasterConfig
    mesh: MeshConfig
    layer_pitch_mm: float
    frames_dir: Path
    basename: str
    stl_path: Path
    tree_depth: int = 9
    hyperbola_half_width: float = 0.05
    flower_expr: Optional[str] = None
    path_spec: Optional[PathSpec] = None
    escape: families.EscapeParams = field(default_factory=families.EscapeParams)
    window_explicit: bool = True

    def generation_fingerprint(self) -> str:
        """Hash of everything that influences the generated frames."""
        payload = {
            "family": self.family,
            "param": [self.param.t_min, self.param.t_max, self.param.frame_count],
            "resolution": self.raster.resolution,
            "supersample": self.raster.supersample,
            "model_width_mm": self.raster.model_width_mm,
            "window": [
                self.raster.window.x_min,
                self.raster.window.x_max,
                self.raster.window.y_min,
                self.raster.window.y_max,
            ]
            if self.window_explicit
            else "auto",
            "layer_pitch_mm": self.layer_pitch_mm,
            "basename": self.basename,
            "tree_depth": self.tree_depth,
            "hyperbola_half_width": self.hyperbola_half_width,
            "flower_expr": self.flower_expr,
            "escape": [self.escape.max_iter, self.escape.escape_radius],
            "path": None
            if self.path_spec is None
            else {
                "kind": self.path_spec.kind,
                "trim": self.path_spec.trim_epsilon,
                "points": None
                if self.path_spec.points is None
                else [[p.real, p.imag] for p in self.path_spec.points],
                "x": self.path_spec.x_expr,
                "y": self.path_spec.y_expr,
            },
            "version": 1,
        }
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


_DEFAULT_WINDOWS = {
    "polar-flower": FLOWER_WINDOW,
    "expression": FLOWER_WINDOW,
    "julia-path": JULIA_WINDOW,
    "hyperbola": HYPERBOLA_WINDOW,
}


def parse_path_section(sec: _Section, param: ParamInterval) -> PathSpec:
    kind = sec.get("kind", str, required=True)
    trim = sec.get("trim_epsilon", float, 0.0)
    points = None
    if kind == "polyline":
        raw = sec.get("points", list, required=True)
        try:
            points = tuple(complex(float(p[0]), float(p[1])) for p in raw)
        except (TypeError, ValueError, IndexError):
            raise ConfigError(
                sec._key("points"), "expected a list of [re, im] pairs"
            ) from None
    x_expr = sec.get("x", str)
    y_expr = sec.get("y", str)
    if kind == "expression":
        for name, src in (("x", x_expr), ("y", y_expr)):
            if not src:
                raise ConfigError(sec._key(name), "expression path needs x and y")
            try:
                exprlang.parse(src)
            except exprlang.ExprSyntaxError as err:
                raise ConfigError(sec._key(name), str(err)) from None
    try:
        return PathSpec(
            kind=kind, t_range=param, trim_epsilon=trim, points=points,
            x_expr=x_expr, y_expr=y_expr,
        )
    except ValueError as err:
        raise ConfigError(sec.path, str(err)) from None


def load_config(path: Path, overrides: Optional[dict] = None) -> JobConfig:
    """Read and validate a JSON job config; overrides (from CLI flags) win
    over file values."""
    p = Path(path)
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except OSError as err:
        raise ConfigError("<file>", f"cannot read {p}: {err}") from None
    except json.JSONDecodeError as err:
        raise ConfigError("<file>", f"{p} is not valid JSON: {err}") from None
    return config_from_dict(raw, overrides)


def config_from_dict(raw: dict, overrides: Optional[dict] = None) -> JobConfig:
    """Validate a job config given as a plain dict (file or HTTP body)."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    root = _Section(raw)
    family = root.get("family", str, required=True)
    if family not in FAMILIES:
        raise ConfigError("family", f"unknown family {family!r}; expected one of {FAMILIES}")

    psec = root.section("param", required=True)
    frames = overrides.get("frames", psec.get("frames", int, required=True))
    try:
        param = ParamInterval(
            t_min=psec.get("t_min", float, required=True),
            t_max=psec.get("t_max", float, required=True),
            frame_count=frames,
        )
    except ValueError as err:
        raise ConfigError("param", str(err)) from None

    rsec = root.section("raster") or _Section({}, "raster")
    wsec = rsec.section("window")
    window_explicit = wsec is not None
    if wsec is not None:
        try:
            window = Window(
                x_min=wsec.get("x_min", float, required=True),
                x_max=wsec.get("x_max", float, required=True),
                y_min=wsec.get("y_min", float, required=True),
                y_max=wsec.get("y_max", float, required=True),
            )
        except ValueError as err:
            raise ConfigError("raster.window", str(err)) from None
    else:
        window = _DEFAULT_WINDOWS.get(family)  # tree window resolved at generation

    ssec = root.section("scale") or _Section({}, "scale")
    model_width = ssec.get("model_width_mm", float, 80.0)
    layer_pitch = ssec.get("layer_pitch_mm", float, DEFAULT_LAYER_PITCH_MM)

    try:
        raster_cfg = RasterConfig(
            resolution=rsec.get("resolution", int, 512),
            window=window if window is not None else FLOWER_WINDOW,
            supersample=rsec.get("supersample", int, 4),
            model_width_mm=model_width,
        )
    except ValueError as err:
        raise ConfigError("raster", str(err)) from None

    msec = root.section("mesh") or _Section({}, "mesh")
    try:
        mesh_cfg = MeshConfig(
            level=overrides.get("level", msec.get("level", int, 128)),
            step=overrides.get("step", msec.get("step", int, 1)),
            cap_ends=msec.get("cap_ends", bool, True),
        )
    except ValueError as err:
        raise ConfigError("mesh", str(err)) from None

    osec = root.section("output") or _Section({}, "output")
    basename = osec.get("basename", str, family.replace("-", ""))
    frames_dir = Path(overrides.get("frames_dir", osec.get("frames_dir", str, f"out/{basename}")))
    stl_path = Path(overrides.get("stl", osec.get("stl", str, f"out/{basename}.stl")))

    cfg = JobConfig(
        family=family,
        param=param,
        raster=raster_cfg,
        mesh=mesh_cfg,
        layer_pitch_mm=layer_pitch,
        frames_dir=frames_dir,
        basename=basename,
        stl_path=stl_path,
        window_explicit=window_explicit,
    )

    if family == "pythagorean-tree":
        tsec = root.section("tree") or _Section({}, "tree")
        cfg.tree_depth = tsec.get("depth", int, 9)
        if not 0 <= cfg.tree_depth <= families.MAX_TREE_DEPTH:
            raise ConfigError("tree.depth", f"must be in [0, {families.MAX_TREE_DEPTH}]")
        if not (0.0 < param.t_min and param.t_max <= 45.0):
            raise ConfigError("param", "tree family parameter is theta in degrees, (0, 45]")
    elif family == "hyperbola":
        hsec = root.section("hyperbola") or _Section({}, "hyperbola")
        cfg.hyperbola_half_width = hsec.get("half_width", float, 0.05)
        if not cfg.hyperbola_half_width > 0:
            raise ConfigError("hyperbola.half_width", "must be > 0")
    elif family == "expression":
        esec = root.section("expression", required=True)
        cfg.flower_expr = esec.get("r", str, required=True)
        try:
            ast = exprlang.parse(cfg.flower_expr)
        except exprlang.ExprSyntaxError as err:
            raise ConfigError("expression.r", str(err)) from None
        free = _free_variables(ast)
        if not free <= {"theta", "t"}:
            raise ConfigError(
                "expression.r", f"unknown variables {sorted(free - {'theta', 't'})}"
            )
    elif family == "julia-path":
        path_sec = root.section("path", required=True)
        cfg.path_spec = parse_path_section(path_sec, param)
        esec = root.section("escape") or _Section({}, "escape")
        try:
            cfg.escape = families.EscapeParams(
                max_iter=esec.get("max_iter", int, 500),
                escape_radius=esec.get("escape_radius", float, 2.0),
            )
        except ValueError as err:
            raise ConfigError("escape", str(err)) from None
    return cfg


def _free_variables(e) -> set:
    if isinstance(e, exprlang.Var):
        return {e.name}
    if isinstance(e, exprlang.Neg):
        return _free_variables(e.arg)
    if isinstance(e, exprlang.BinOp):
        return _free_variables(e.left) | _free_variables(e.right)
    if isinstance(e, exprlang.Call):
        out = set()
        for a in e.args:
            out |= _free_variables(a)
        return out
    return set()


def _tree_window(cfg: JobConfig) -> Window:
    boxes = []
    for i in range(cfg.param.frame_count):
        theta = cfg.param.sample(i)
        boxes.append(families.tree_bounding_box(families.pythagorean_tree(cfg.tree_depth, theta)))
    b = np.array(boxes)
    return fit_window(b[:, 0].min(), b[:, 1].min(), b[:, 2].max(), b[:, 3].max(), margin=0.10)


def generate_frames(cfg: JobConfig) -> tuple:
    """Produce the frame list and the sidecar metadata for a job."""
    rcfg = cfg.raster
    if cfg.family == "pythagorean-tree" and not cfg.window_explicit:
        rcfg = RasterConfig(
            resolution=rcfg.resolution,
            window=_tree_window(cfg),
            supersample=rcfg.supersample,
            model_width_mm=rcfg.model_width_mm,
        )

    frames: List[FrameRaster] = []
    t_meta = (cfg.param.t_min, cfg.param.t_max)
    if cfg.family == "polar-flower":
        for i in range(cfg.param.frame_count):
            t = cfg.param.sample(i)
            frames.append(
                rasterize_polar(lambda th, t=t: families.polar_flower_boundary(t, t, th), rcfg)
            )
    elif cfg.family == "expression":
        ast = exprlang.parse(cfg.flower_expr)
        for i in range(cfg.param.frame_count):
            t = cfg.param.sample(i)
            frames.append(
                rasterize_polar(
                    lambda th, t=t: exprlang.evaluate_array(ast, {"theta": th, "t": t}), rcfg
                )
            )
    elif cfg.family == "pythagorean-tree":
        for i in range(cfg.param.frame_count):
            theta = cfg.param.sample(i)
            frames.append(rasterize_regions(families.pythagorean_tree(cfg.tree_depth, theta), rcfg))
    elif cfg.family == "hyperbola":
        for i in range(cfg.param.frame_count):
            t = cfg.param.sample(i)
            frames.append(
                rasterize_membership(
                    lambda x, y, t=t: families.hyperbola_frame_membership(
                        (x, y), t, cfg.hyperbola_half_width
                    ),
                    rcfg,
                )
            )
    elif cfg.family == "julia-path":
        spec = cfg.path_spec
        ts = spec.sample_ts(cfg.param.frame_count)
        cs = families.path_points(spec, ts)
        t_meta = (float(ts[0]), float(ts[-1]))
        for c in cs:
            frames.append(rasterize_escape(complex(c), cfg.escape, rcfg))
    else:
        raise ConfigError("family", f"unhandled family {cfg.family}")

    meta = {
        "pixel_pitch_mm": rcfg.pixel_pitch_mm,
        "layer_pitch_mm": cfg.layer_pitch_mm,
        "window": {
            "x_min": rcfg.window.x_min,
            "x_max": rcfg.window.x_max,
            "y_min": rcfg.window.y_min,
            "y_max": rcfg.window.y_max,
        },
        "t_min": t_meta[0],
        "t_max": t_meta[1],
        "config_sha256": cfg.generation_fingerprint(),
    }
    return frames, meta


def _stack_is_current(cfg: JobConfig) -> bool:
    meta = read_sidecar(cfg.frames_dir)
    if not meta or meta.get("config_sha256") != cfg.generation_fingerprint():
        return False
    expected = [
        cfg.frames_dir / f"{cfg.basename}_{1000 + i}.png" for i in range(cfg.param.frame_count)
    ]
    return all(p.exists() for p in expected)


def cmd_generate(cfg: JobConfig, out=None) -> List[Path]:
    out = out if out is not None else sys.stdout
    t0 = time.perf_counter()
    frames, meta = generate_frames(cfg)
    paths = export_png_stack(frames, cfg.frames_dir, cfg.basename)
    write_sidecar(cfg.frames_dir, meta)
    dt = time.perf_counter() - t0
    print(f"generated {len(paths)} frames in {dt:.1f}s -> {cfg.frames_dir}", file=out)
    return paths


def cmd_mesh(
    stack_dir: Path,
    level: int = 128,
    step: int = 1,
    out_path: Path = Path("model.stl"),
    strict_alpha: bool = False,
    out=None,
) -> Path:
    out = out if out is not None else sys.stdout
    volume = import_png_stack(stack_dir, strict_alpha=strict_alpha)
    mesh = extract_isosurface(volume, MeshConfig(level=level, step=step))
    t0 = time.perf_counter()
    byte_count = export_stl(mesh, out_path)
    dt = time.perf_counter() - t0
    stats = mesh_statistics(mesh)
    print(json.dumps(stats.to_dict(), indent=2), file=out)
    print(f"wrote {byte_count} bytes to {out_path} ({dt:.1f}s)", file=out)
    return Path(out_path)


def cmd_check(stl_path: Path, threshold_deg: float = 45.0, out=None) -> int:
    out = out if out is not None else sys.stdout
    mesh = parse_stl(stl_path)
    stats = mesh_statistics(mesh)
    report = {"statistics": stats.to_dict(), "threshold_deg": threshold_deg}
    exit_code = 0
    if not stats.watertight:
        report["verdict"] = (
            f"NOT WATERTIGHT: {stats.boundary_edge_count} boundary edges, "
            f"{stats.nonmanifold_edge_count} non-manifold edges"
        )
        exit_code = 4
    else:
        over = overhang_report(mesh, threshold_deg)
        placed = place_on_plate(mesh)
        report["overhang"] = over.to_dict()
        report["contact_area_mm2"] = placed.contact_area_mm2
        if over.flagged_triangles:
            report["warning"] = (
                f"{over.flagged_triangles} triangles overhang beyond "
                f"{threshold_deg} degrees (max {over.max_overhang_deg:.1f}); "
                f"expect drooping or add support material"
            )
        if placed.low_contact:
            report["placement_warning"] = (
                "contact footprint below 1% of the bounding box; "
                "the model may not adhere to the plate"
            )
        report["verdict"] = "watertight"
    print(json.dumps(report, indent=2), file=out)
    return exit_code


def run_job(cfg: JobConfig, out=None, force: bool = False) -> Path:
    """generate -> mesh -> check; skips generation when the stack on disk
    already matches the config hash."""
    out = out if out is not None else sys.stdout
    if not force and _stack_is_current(cfg):
        print(f"stack {cfg.frames_dir} is current; skipping generation", file=out)
    else:
        cmd_generate(cfg, out=out)
    cfg.stl_path.parent.mkdir(parents=True, exist_ok=True)
    cmd_mesh(
        cfg.frames_dir,
        level=cfg.mesh.level,
        step=cfg.mesh.step,
        out_path=cfg.stl_path,
        out=out,
    )
    cmd_check(cfg.stl_path, out=out)
    return cfg.stl_path


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors (argparse default is 2)
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stackforge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"stackforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="rasterize a frame stack from a job config")
    g.add_argument("--config", required=True, type=Path)
    g.add_argument("--frames", type=int, help="override frame count")
    g.add_argument("--out", type=Path, help="override frames directory")

    m = sub.add_parser("mesh", help="stitch a PNG stack into an STL")
    m.add_argument("stack_dir", type=Path)
    m.add_argument("--level", type=int, default=128)
    m.add_argument("--step", type=int, default=1, choices=[1, 2, 4, 8, 16])
    m.add_argument("--out", type=Path, default=Path("model.stl"))
    m.add_argument("--strict-alpha", action="store_true",
                   help="reject frames with an alpha channel instead of compositing")

    c = sub.add_parser("check", help="printability report for an STL")
    c.add_argument("stl", type=Path)
    c.add_argument("--threshold-deg", type=float, default=45.0)

    r = sub.add_parser("run", help="generate, mesh, and check from one config")
    r.add_argument("--config", required=True, type=Path)
    r.add_argument("--frames", type=int)
    r.add_argument("--level", type=int)
    r.add_argument("--step", type=int, choices=[1, 2, 4, 8, 16])
    r.add_argument("--out", type=Path, help="override STL output path")
    r.add_argument("--force", action="store_true", help="regenerate even if current")

    s = sub.add_parser("serve", help="start the preview/job HTTP service")
    s.add_argument("--port", type=int, default=8737)
    s.add_argument("--host", default="127.0.0.1")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            cfg = load_config(args.config, {"frames": args.frames, "frames_dir": args.out})
            try:
                cmd_generate(cfg)
            except Exception as err:
                print(f"[generate] {err}", file=sys.stderr)
                return 2
            return 0
        if args.command == "mesh":
            try:
                cmd_mesh(args.stack_dir, args.level, args.step, args.out,
                         strict_alpha=args.strict_alpha)
            except Exception as err:
                print(f"[mesh] {err}", file=sys.stderr)
                return 3
            return 0
        if args.command == "check":
            try:
                return cmd_check(args.stl, args.threshold_deg)
            except PrintCheckError as err:
                print(f"[check] {err}", file=sys.stderr)
                return 4
            except Exception as err:
                print(f"[check] {err}", file=sys.stderr)
                return 3
        if args.command == "run":
            cfg = load_config(
                args.config,
                {"frames": args.frames, "level": args.level, "step": args.step,
                 "stl": args.out},
            )
            try:
                if not args.force and _stack_is_current(cfg):
                    print(f"stack {cfg.frames_dir} is current; skipping generation")
                else:
                    cmd_generate(cfg)
            except Exception as err:
                print(f"[generate] {err}", file=sys.stderr)
                return 2
            try:
                cfg.stl_path.parent.mkdir(parents=True, exist_ok=True)
                cmd_mesh(cfg.frames_dir, cfg.mesh.level, cfg.mesh.step, cfg.stl_path)
            except Exception as err:
                print(f"[mesh] {err}", file=sys.stderr)
                return 3
            try:
                return cmd_check(cfg.stl_path)
            except Exception as err:
                print(f"[check] {err}", file=sys.stderr)
                return 4
        if args.command == "serve":
            from . import server

            server.serve(host=args.host, port=args.port)
            return 0
    except ConfigError as err:
        print(err, file=sys.stderr)
        return 1
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
