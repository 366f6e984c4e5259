"""3-D face models of vehicle bodies and their projection to 2-D reference segments."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .descriptors import FrameOrientation, SegmentDescriptor, merge_all
from .errors import DegenerateProjection, FaceBehindCamera, ParseError

CLASS_IDS = ("personal_car", "van", "truck", "bus", "tractor_trailer")

PLANARITY_TOL = 1e-6
ORTHONORMAL_TOL = 1e-9
MIN_PROJECTED_AREA = 1e-6


def _newell_normal(pts: np.ndarray) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    return np.array(
        [
            np.sum((pts[:, 1] - nxt[:, 1]) * (pts[:, 2] + nxt[:, 2])),
            np.sum((pts[:, 2] - nxt[:, 2]) * (pts[:, 0] + nxt[:, 0])),
            np.sum((pts[:, 0] - nxt[:, 0]) * (pts[:, 1] + nxt[:, 1])),
        ]
    )


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


def _self_intersects(poly2d: np.ndarray) -> bool:
    n = len(poly2d)
    edges = [(poly2d[i], poly2d[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for k in range(i + 2, n):
            if i == 0 and k == n - 1:
                continue
            if _segments_cross(*edges[i], *edges[k]):
                return True
    return False


@dataclass(frozen=True)
class Face3D:
    """Planar polygon; vertex order follows the right-hand rule around the outward normal."""

    label: str
    vertices: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        verts = tuple(tuple(float(c) for c in v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3 or any(len(v) != 3 for v in verts):
            raise ValueError(f"face '{self.label}' needs at least 3 three-dimensional vertices")
        pts = np.array(verts)
        n = _newell_normal(pts)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ValueError(f"face '{self.label}' has zero area")
        n = n / norm
        dist = (pts - pts.mean(axis=0)) @ n
        if np.max(np.abs(dist)) > PLANARITY_TOL:
            raise ValueError(f"face '{self.label}' is not planar")
        # in-plane basis for the self-intersection test
        u = pts[1] - pts[0]
        u = u / np.linalg.norm(u)
        v = np.cross(n, u)
        flat = np.column_stack([(pts - pts[0]) @ u, (pts - pts[0]) @ v])
        if _self_intersects(flat):
            raise ValueError(f"face '{self.label}' is self-intersecting")

    @property
    def normal(self) -> np.ndarray:
        n = _newell_normal(np.array(self.vertices))
        return n / np.linalg.norm(n)


@dataclass(frozen=True)
class VehicleModel3D:
    class_id: str
    faces: tuple[Face3D, ...]
    anchor: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "faces", tuple(self.faces))
        if not self.faces:
            raise ValueError(f"model '{self.class_id}' has no faces")
        if self.anchor is not None and self.anchor not in {f.label for f in self.faces}:
            raise ValueError(f"anchor face '{self.anchor}' not found in model '{self.class_id}'")


@dataclass(frozen=True)
class CameraPose:
    """Pinhole camera; ``rotation`` maps world directions to camera axes (rows = camera x, y, z)."""

    position: tuple[float, float, float]
    rotation: tuple[tuple[float, float, float], ...]
    focal: float
    principal: tuple[float, float] = (0.0, 0.0)
    frame: FrameOrientation = field(default_factory=FrameOrientation)

    def __post_init__(self) -> None:
        r = np.asarray(self.rotation, dtype=float)
        if r.shape != (3, 3):
            raise ValueError("camera rotation must be 3x3")
        if np.max(np.abs(r @ r.T - np.eye(3))) > ORTHONORMAL_TOL or np.linalg.det(r) < 0:
            raise ValueError("camera rotation is not a proper orthonormal matrix")
        if not self.focal > 0:
            raise ValueError("focal length must be positive")
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        object.__setattr__(self, "rotation", tuple(tuple(float(c) for c in row) for row in r))
        object.__setattr__(self, "principal", tuple(float(c) for c in self.principal))

    def to_camera(self, pts: np.ndarray) -> np.ndarray:
        return (np.asarray(pts, dtype=float) - np.asarray(self.position)) @ np.asarray(self.rotation).T


def look_at(position: Sequence[float], target: Sequence[float], up: Sequence[float] = (0.0, 0.0, 1.0)) -> np.ndarray:
    """Rotation for a camera at ``position`` looking at ``target``; image y points down."""
    pos = np.asarray(position, dtype=float)
    fwd = np.asarray(target, dtype=float) - pos
    fwd /= np.linalg.norm(fwd)
    right = np.cross(fwd, np.asarray(up, dtype=float))
    right /= np.linalg.norm(right)
    down = np.cross(fwd, right)
    return np.vstack([right, down, fwd])


@dataclass(frozen=True)
class ClassModel:
    """Reference segments of one class; index 0 is the anchor segment.

    ``polygons`` keeps the projected outlines (working-frame coordinates) when
    the model came from a 3-D projection; it is used for rendering and for
    the synthetic scene generator.
    """

    class_id: str
    segments: tuple[SegmentDescriptor, ...]
    frame: FrameOrientation = field(default_factory=FrameOrientation)
    polygons: tuple[np.ndarray, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        if len(self.segments) < 2:
            raise ValueError(
                f"class model '{self.class_id}' needs at least 2 segments, got {len(self.segments)}"
            )
        if self.polygons is not None:
            polys = tuple(np.asarray(p, dtype=float) for p in self.polygons)
            if len(polys) != len(self.segments):
                raise ValueError("one polygon per segment is required")
            object.__setattr__(self, "polygons", polys)

    @property
    def n(self) -> int:
        return len(self.segments)

    @property
    def diagonal(self) -> float:
        env = merge_all(self.segments)
        return math.hypot(env.x_max - env.x_min, env.y_max - env.y_min)


def anchor(m: ClassModel) -> SegmentDescriptor:
    return m.segments[0]


def polygon_descriptor(poly: np.ndarray, tag: str | None = None) -> SegmentDescriptor:
    """Exact descriptor of a simple polygon (shoelace area and centroid)."""
    poly = np.asarray(poly, dtype=float)
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    signed = 0.5 * np.sum(cross)
    if abs(signed) < MIN_PROJECTED_AREA:
        raise DegenerateProjection(f"polygon area {abs(signed)} is below {MIN_PROJECTED_AREA}")
    cx = np.sum((x + xn) * cross) / (6.0 * signed)
    cy = np.sum((y + yn) * cross) / (6.0 * signed)
    return SegmentDescriptor(
        float(abs(signed)),
        float(cx),
        float(cy),
        float(x.min()),
        float(x.max()),
        float(y.min()),
        float(y.max()),
        tag,
    )


def project_model(m: VehicleModel3D, cam: CameraPose) -> ClassModel:
    """Project camera-facing faces into reference segments.

    Faces whose outward normal points away from the camera are dropped.  No
    hidden-surface removal is done between visible faces.
    """
    cam_pos = np.asarray(cam.position)
    visible = []
    for face in m.faces:
        pts = np.asarray(face.vertices)
        pc = cam.to_camera(pts)
        if np.any(pc[:, 2] <= 0):
            raise FaceBehindCamera(f"face '{face.label}' of '{m.class_id}' is not in front of the camera")
        if float(face.normal @ (cam_pos - pts[0])) <= 0:
            continue
        u = cam.focal * pc[:, 0] / pc[:, 2] + cam.principal[0]
        v = cam.focal * pc[:, 1] / pc[:, 2] + cam.principal[1]
        fu, fv = cam.frame.to_frame(u, v)
        poly = np.column_stack([fu, fv])
        try:
            desc = polygon_descriptor(poly, tag=face.label)
        except DegenerateProjection:
            raise DegenerateProjection(f"face '{face.label}' of '{m.class_id}' projects to a sliver") from None
        visible.append((face.label, desc, poly))
    if not visible:
        raise DegenerateProjection(f"no face of '{m.class_id}' faces the camera")

    if m.anchor is not None:
        first = next((k for k, item in enumerate(visible) if item[0] == m.anchor), None)
        if first is None:
            raise DegenerateProjection(f"anchor face '{m.anchor}' of '{m.class_id}' is not visible")
    else:
        first = max(range(len(visible)), key=lambda k: (visible[k][1].area, -k))
    order = [first] + [k for k in range(len(visible)) if k != first]
    return ClassModel(
        m.class_id,
        tuple(visible[k][1] for k in order),
        cam.frame,
        tuple(visible[k][2] for k in order),
    )


# -- file formats -------------------------------------------------------------


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    return obj[key]


def model_from_dict(data: dict) -> VehicleModel3D:
    class_id = _require(data, "class", "model")
    if not isinstance(class_id, str):
        raise ParseError("model: field 'class' must be a string")
    faces_raw = _require(data, "faces", "model")
    if not isinstance(faces_raw, list):
        raise ParseError("model: field 'faces' must be a list")
    faces = []
    for k, f in enumerate(faces_raw):
        label = _require(f, "label", f"model.faces[{k}]")
        verts = _require(f, "vertices", f"model.faces[{k}]")
        try:
            faces.append(Face3D(str(label), tuple(tuple(v) for v in verts)))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"model.faces[{k}] ('{label}'): {exc}") from None
    try:
        return VehicleModel3D(class_id, tuple(faces), data.get("anchor"))
    except ValueError as exc:
        raise ParseError(f"model: {exc}") from None


def model_to_dict(m: VehicleModel3D) -> dict:
    out = {
        "class": m.class_id,
        "faces": [{"label": f.label, "vertices": [list(v) for v in f.vertices]} for f in m.faces],
    }
    if m.anchor is not None:
        out["anchor"] = m.anchor
    return out


def camera_from_dict(data: dict) -> CameraPose:
    try:
        return CameraPose(
            tuple(_require(data, "position", "camera")),
            tuple(tuple(row) for row in _require(data, "rotation", "camera")),
            float(_require(data, "focal", "camera")),
            tuple(data.get("principal", (0.0, 0.0))),
            FrameOrientation(float(data.get("frame_angle", 0.0))),
        )
    except ParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"camera: {exc}") from None


def camera_to_dict(cam: CameraPose) -> dict:
    return {
        "position": list(cam.position),
        "rotation": [list(r) for r in cam.rotation],
        "focal": cam.focal,
        "principal": list(cam.principal),
        "frame_angle": cam.frame.angle,
    }


def _load_json(path: str | Path, what: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what} {path}: invalid JSON at line {exc.lineno} ({exc.msg})") from None


def load_model(path: str | Path) -> VehicleModel3D:
    return model_from_dict(_load_json(path, "model file"))


def load_camera(path: str | Path) -> CameraPose:
    return camera_from_dict(_load_json(path, "camera file"))


def _data_file(name: str):
    return resources.files("fuzzyseg").joinpath("data", name)


def bundled_model(class_id: str) -> VehicleModel3D:
    if class_id not in CLASS_IDS:
        raise KeyError(f"no bundled model for '{class_id}'")
    return model_from_dict(json.loads(_data_file(f"{class_id}.json").read_text(encoding="utf-8")))


def bundled_camera() -> CameraPose:
    return camera_from_dict(json.loads(_data_file("camera.json").read_text(encoding="utf-8")))


def bundled_class_models() -> dict[str, ClassModel]:
    cam = bundled_camera()
    return {c: project_model(bundled_model(c), cam) for c in CLASS_IDS}
