"""Printability heuristics: overhang-angle analysis and build-plate
placement.

Overhang is measured in degrees from vertical, the convention printer
guides use: a vertical wall is 0 degrees, a horizontal downward-facing
ceiling 90.  Extrusion printers typically manage unsupported overhangs
somewhere between 45 and 60 degrees; beyond that expect drooping or failed
prints unless support material is added.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import TriangleMesh
from .mesher import mesh_statistics

__all__ = [
    "PrintCheckError",
    "OverhangReport",
    "PlacementResult",
    "overhang_report",
    "place_on_plate",
    "PLATE_TOLERANCE_MM",
]

PLATE_TOLERANCE_MM = 0.01


class PrintCheckError(Exception):
    pass


@dataclass(frozen=True)
class OverhangReport:
    max_overhang_deg: float
    flagged_triangles: int
    flagged_area_mm2: float
    worst_triangle_index: Optional[int]
    threshold_deg: float

    def to_dict(self) -> dict:
        return {
            "max_overhang_deg": self.max_overhang_deg,
            "flagged_triangles": self.flagged_triangles,
            "flagged_area_mm2": self.flagged_area_mm2,
            "worst_triangle_index": self.worst_triangle_index,
            "threshold_deg": self.threshold_deg,
        }


def overhang_report(m: TriangleMesh, threshold_deg: float = 45.0) -> OverhangReport:
    """Flag downward-facing triangles steeper than the threshold.

    Only triangles whose outward normal points downward can lack support;
    their overhang angle is 90 minus the angle between the normal and the
    straight-down direction.  Faces resting on the build plate (everything
    within PLATE_TOLERANCE_MM of the lowest z) are exempt.  Requires a
    watertight mesh so "outward" and "downward-facing" are well defined.
    """
    if not 0.0 < threshold_deg < 90.0:
        raise ValueError(f"threshold_deg must be in (0, 90), got {threshold_deg}")
    stats = mesh_statistics(m)
    if m.triangle_count and not stats.watertight:
        raise PrintCheckError(
            f"overhang analysis needs a watertight mesh "
            f"({stats.boundary_edge_count} boundary edges)"
        )
    if m.triangle_count == 0:
        return OverhangReport(0.0, 0, 0.0, None, threshold_deg)

    p = m.triangle_corners()
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    norms = np.linalg.norm(n, axis=1)
    area = norms / 2.0
    with np.errstate(invalid="ignore"):
        nz = np.where(norms > 0, n[:, 2] / norms, 0.0)

    min_z = m.vertices[:, 2].min()
    on_plate = p[..., 2].max(axis=1) <= min_z + PLATE_TOLERANCE_MM

    downward = (nz < 0) & ~on_plate
    overhang = np.zeros(len(p))
    overhang[downward] = np.degrees(np.arcsin(np.clip(-nz[downward], -1.0, 1.0)))

    flagged = downward & (overhang > threshold_deg)
    worst = int(np.argmax(overhang)) if downward.any() else None
    return OverhangReport(
        max_overhang_deg=float(overhang.max()) if downward.any() else 0.0,
        flagged_triangles=int(flagged.sum()),
        flagged_area_mm2=float(area[flagged].sum()),
        worst_triangle_index=worst,
        threshold_deg=threshold_deg,
    )


@dataclass(frozen=True)
class PlacementResult:
    mesh: TriangleMesh
    contact_area_mm2: float
    footprint_area_mm2: float
    low_contact: bool

    def to_dict(self) -> dict:
        return {
            "contact_area_mm2": self.contact_area_mm2,
            "footprint_area_mm2": self.footprint_area_mm2,
            "low_contact": self.low_contact,
        }


def place_on_plate(m: TriangleMesh) -> PlacementResult:
    """Translate the mesh so its lowest point sits at z = 0 and measure the
    contact footprint.

    Does not rotate: picking a better orientation is the operator's call
    (slicers offer a lay-flat command).  low_contact is set when the faces
    within PLATE_TOLERANCE_MM of the plate cover less than 1% of the
    bounding-box footprint, which usually means the model is balancing on
    an edge or a tangent point.
    """
    if m.triangle_count == 0:
        raise PrintCheckError("cannot place an empty mesh")
    min_z = float(m.vertices[:, 2].min())
    placed = m if min_z == 0.0 else m.translated((0.0, 0.0, -min_z))

    p = placed.triangle_corners()
    contact = p[..., 2].max(axis=1) <= PLATE_TOLERANCE_MM
    area = 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)
    contact_area = float(area[contact].sum())

    extent = placed.vertices.max(axis=0) - placed.vertices.min(axis=0)
    footprint = float(extent[0] * extent[1])
    low_contact = footprint > 0 and contact_area < 0.01 * footprint
    return PlacementResult(
        mesh=placed,
        contact_area_mm2=contact_area,
        footprint_area_mm2=footprint,
        low_contact=low_contact,
    )
