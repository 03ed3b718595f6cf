"""Persist and load frame stacks as PNG directories.

Follows the reverse-tomography stitching conventions: 8-bit grayscale
white-on-black frames, filenames numbered from 1000 so byte-lexicographic
order equals stack order, and no alpha channel (strict mode rejects RGBA
files the way Chimera does; lenient mode composites them over black).
Physical units travel in a stack.json sidecar since PNG cannot carry them.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import FrameRaster, ParamInterval, VoxelVolume

__all__ = [
    "StackError",
    "AlphaChannelError",
    "StackConsistencyError",
    "InsufficientFramesError",
    "ImageFormatError",
    "FrameCountWarning",
    "DEFAULT_PIXEL_PITCH_MM",
    "DEFAULT_LAYER_PITCH_MM",
    "FRAME_COUNT_GUIDANCE",
    "SIDECAR_NAME",
    "export_png_stack",
    "import_png_stack",
    "strip_alpha",
    "assemble",
    "write_sidecar",
    "read_sidecar",
]

# 512 px spanning the default 80 mm window; common FDM layer height
DEFAULT_PIXEL_PITCH_MM = 80.0 / 512.0
DEFAULT_LAYER_PITCH_MM = 0.2
FRAME_COUNT_GUIDANCE = 1500  # ~300 mm printer height at 0.2 mm layers
SIDECAR_NAME = "stack.json"


class StackError(Exception):
    pass


class AlphaChannelError(StackError):
    def __init__(self, path):
        super().__init__(
            f"{path} has an alpha channel; strict mode rejects it (remove the "
            f"alpha layer, e.g. with strip_alpha, or import leniently)"
        )
        self.path = Path(path)


class StackConsistencyError(StackError):
    pass


class InsufficientFramesError(StackError):
    pass


class ImageFormatError(StackError):
    pass


class FrameCountWarning(UserWarning):
    pass


def export_png_stack(frames: Sequence[FrameRaster], dir: Path, basename: str) -> List[Path]:
    """Write frames as <basename>_1000.png, <basename>_1001.png, ...

    Numbering starts at 1000 so that alphabetical order never interleaves
    (frame 10 would otherwise sort before frame 9).  Returns paths in stack
    order.
    """
    frames = list(frames)
    if not frames:
        raise InsufficientFramesError("no frames to export")
    if len(frames) > 9000:
        raise StackError("more than 9000 frames would exhaust the 4-digit name scheme")
    if len(frames) > FRAME_COUNT_GUIDANCE:
        warnings.warn(
            f"{len(frames)} frames exceed the ~{FRAME_COUNT_GUIDANCE}-frame guidance "
            f"(a 0.2 mm layer pitch already fills a 300 mm build height)",
            FrameCountWarning,
            stacklevel=2,
        )
    shape = frames[0].values.shape
    for i, fr in enumerate(frames):
        if fr.values.shape != shape:
            raise StackConsistencyError(
                f"frame {i} has shape {fr.values.shape}, expected {shape}"
            )
    out_dir = Path(dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, fr in enumerate(frames):
        path = out_dir / f"{basename}_{1000 + i}.png"
        # values row 0 is the bottom (y up); PNG rows run top-down
        Image.fromarray(fr.values[::-1], mode="L").save(path)
        paths.append(path)
    return paths


def _decode_png(path: Path, strict_alpha: bool) -> np.ndarray:
    """Decode one frame to a uint8 grayscale array in PNG row order."""
    try:
        img = Image.open(path)
        img.load()
    except (UnidentifiedImageError, OSError) as err:
        raise ImageFormatError(f"cannot decode {path}: {err}") from None

    has_alpha = img.mode in ("RGBA", "LA", "PA") or (
        img.mode == "P" and "transparency" in img.info
    )
    if has_alpha:
        if strict_alpha:
            raise AlphaChannelError(path)
        if img.mode != "RGBA":
            img = img.convert("RGBA")
        arr = np.asarray(img, dtype=np.float64)
        rgb = np.rint(arr[..., :3] * (arr[..., 3:4] / 255.0))
        return _luminance(rgb)

    if img.mode == "L":
        return np.asarray(img, dtype=np.uint8)
    if img.mode in ("I;16", "I"):
        arr = np.asarray(img).astype(np.float64)
        return np.rint(np.clip(arr, 0, 65535) * (255.0 / 65535.0)).astype(np.uint8)
    if img.mode != "RGB":
        img = img.convert("RGB")
    return _luminance(np.asarray(img, dtype=np.float64))


def _luminance(rgb: np.ndarray) -> np.ndarray:
    y = 0.2126 * rgb[..., 0] + 0.7152 * rgb[..., 1] + 0.0722 * rgb[..., 2]
    return np.rint(y).astype(np.uint8)


def import_png_stack(dir: Path, strict_alpha: bool = False) -> VoxelVolume:
    """Load a PNG directory (in byte-lexicographic filename order) into a
    VoxelVolume, taking physical pitches and the parameter range from the
    stack.json sidecar when present and built-in defaults otherwise."""
    in_dir = Path(dir)
    files = sorted(p for p in in_dir.glob("*.png"))
    if len(files) < 2:
        raise InsufficientFramesError(
            f"{in_dir} holds {len(files)} PNG file(s); a stack needs at least 2"
        )
    meta = read_sidecar(in_dir) or {}
    pixel_pitch = float(meta.get("pixel_pitch_mm", DEFAULT_PIXEL_PITCH_MM))
    layer_pitch = float(meta.get("layer_pitch_mm", DEFAULT_LAYER_PITCH_MM))
    t_min = float(meta.get("t_min", 0.0))
    t_max = float(meta.get("t_max", 1.0))

    arrays = []
    for path in files:
        arr = _decode_png(path, strict_alpha)
        if arrays and arr.shape != arrays[0].shape:
            raise StackConsistencyError(
                f"{path.name} has shape {arr.shape}, expected {arrays[0].shape}"
            )
        arrays.append(arr)

    border_white = any(
        a[0].any() or a[-1].any() or a[:, 0].any() or a[:, -1].any() for a in arrays
    )
    if border_white:
        warnings.warn(
            "some frames have white pixels on the image border; the mesher closes "
            "them by zero-padding, but the silhouette will be clipped",
            UserWarning,
            stacklevel=2,
        )

    frames = tuple(
        FrameRaster(
            values=a[::-1],  # back to row 0 = bottom
            pixel_pitch=pixel_pitch,
            origin=(pixel_pitch / 2.0, pixel_pitch / 2.0),
        )
        for a in arrays
    )
    param = ParamInterval(t_min=t_min, t_max=t_max, frame_count=len(frames))
    return VoxelVolume(layers=frames, layer_pitch=layer_pitch, param=param)


def strip_alpha(path: Path, out_path: Optional[Path] = None) -> Path:
    """Re-encode a PNG without its alpha channel, compositing over black.

    Idempotent: inputs without alpha are re-encoded unchanged (RGB stays
    RGB, grayscale stays grayscale).
    """
    src = Path(path)
    dst = Path(out_path) if out_path is not None else src
    try:
        img = Image.open(src)
        img.load()
    except (UnidentifiedImageError, OSError) as err:
        raise ImageFormatError(f"cannot decode {src}: {err}") from None

    if img.mode == "P" and "transparency" in img.info:
        img = img.convert("RGBA")
    if img.mode in ("RGBA", "PA"):
        arr = np.asarray(img.convert("RGBA"), dtype=np.float64)
        rgb = np.rint(arr[..., :3] * (arr[..., 3:4] / 255.0)).astype(np.uint8)
        out = Image.fromarray(rgb, mode="RGB")
    elif img.mode == "LA":
        arr = np.asarray(img, dtype=np.float64)
        lum = np.rint(arr[..., 0] * (arr[..., 1] / 255.0)).astype(np.uint8)
        out = Image.fromarray(lum, mode="L")
    else:
        out = img
    out.save(dst, format="PNG")
    return dst


def assemble(
    frames: Sequence[FrameRaster], layer_pitch: float, param: ParamInterval
) -> VoxelVolume:
    """Stack frames into a VoxelVolume; layer i sits at parameter
    param.sample(i) and height i * layer_pitch."""
    frames = tuple(frames)
    if len(frames) != param.frame_count:
        raise StackConsistencyError(
            f"frame count {len(frames)} != param.frame_count {param.frame_count}"
        )
    shape = frames[0].values.shape if frames else None
    for i, fr in enumerate(frames):
        if fr.values.shape != shape:
            raise StackConsistencyError(f"frame {i} has shape {fr.values.shape}, expected {shape}")
    return VoxelVolume(layers=frames, layer_pitch=layer_pitch, param=param)


def write_sidecar(dir: Path, meta: dict) -> Path:
    path = Path(dir) / SIDECAR_NAME
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_sidecar(dir: Path) -> Optional[dict]:
    path = Path(dir) / SIDECAR_NAME
    if not path.exists():
        return None
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise StackError(f"unreadable sidecar {path}: {err}") from None
