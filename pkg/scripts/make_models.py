"""Regenerate the bundled vehicle face models and the default camera.

Vehicles stand with the front bumper at X = 0 and extend towards -X; the
near side lies in the plane Y = 0 and Z points up.  Dimensions are in meters
and are illustrative, not measured.

    python scripts/make_models.py
"""

import json
from pathlib import Path

import numpy as np

from fuzzyseg.model import Face3D, camera_to_dict, look_at, CameraPose, model_to_dict, VehicleModel3D

DATA = Path(__file__).resolve().parents[1] / "src" / "fuzzyseg" / "data"

CAMERA_POSITION = (10.0, -14.0, 7.0)
CAMERA_TARGET = (-5.0, 1.0, 1.5)


def face(label, pts, outward):
    """Order ``pts`` so the right-hand normal agrees with ``outward``."""
    pts = [tuple(float(c) for c in p) for p in pts]
    f = Face3D(label, tuple(pts))
    if float(np.dot(f.normal, outward)) < 0:
        f = Face3D(label, tuple(reversed(pts)))
    return f


def box(prefix, x0, x1, y0, y1, z0, z1, skip=()):
    faces = {
        "front": ([(x1, y0, z0), (x1, y1, z0), (x1, y1, z1), (x1, y0, z1)], (1, 0, 0)),
        "rear": ([(x0, y0, z0), (x0, y1, z0), (x0, y1, z1), (x0, y0, z1)], (-1, 0, 0)),
        "side": ([(x0, y0, z0), (x1, y0, z0), (x1, y0, z1), (x0, y0, z1)], (0, -1, 0)),
        "far_side": ([(x0, y1, z0), (x1, y1, z0), (x1, y1, z1), (x0, y1, z1)], (0, 1, 0)),
        "roof": ([(x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1)], (0, 0, 1)),
        "bottom": ([(x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0)], (0, 0, -1)),
    }
    return [face(f"{prefix}_{k}", pts, n) for k, (pts, n) in faces.items() if k not in skip]


def profile_faces(prefix, outline, y0, y1):
    """Extrude a side profile (list of (x, z), counter-clockwise seen from -Y) across y0..y1."""
    faces = [
        face(f"{prefix}_side", [(x, y0, z) for x, z in outline], (0, -1, 0)),
        face(f"{prefix}_far_side", [(x, y1, z) for x, z in outline], (0, 1, 0)),
    ]
    n = len(outline)
    for k in range(n):
        (xa, za), (xb, zb) = outline[k], outline[(k + 1) % n]
        tx, tz = xb - xa, zb - za
        outward = np.array([tz, 0.0, -tx])
        faces.append(face(f"{prefix}_edge{k}", [(xa, y0, za), (xb, y0, zb), (xb, y1, zb), (xa, y1, za)], outward))
    return faces


def personal_car():
    faces = []
    for f in box("body", -4.5, 0.0, 0.0, 1.8, 0.3, 1.0, skip=("roof",)):
        faces.append(f)
    faces.append(face("hood", [(-1.3, 0, 1.0), (0, 0, 1.0), (0, 1.8, 1.0), (-1.3, 1.8, 1.0)], (0, 0, 1)))
    faces.append(face("trunk", [(-4.5, 0, 1.0), (-3.7, 0, 1.0), (-3.7, 1.8, 1.0), (-4.5, 1.8, 1.0)], (0, 0, 1)))
    cabin = [(-3.7, 1.0), (-1.3, 1.0), (-1.9, 1.45), (-3.4, 1.45)]
    cab = profile_faces("cabin", cabin, 0.1, 1.7)
    relabel = {"cabin_edge1": "windshield", "cabin_edge2": "roof", "cabin_edge3": "rear_window"}
    for f in cab:
        if f.label == "cabin_edge0":
            continue  # rests on the body
        faces.append(Face3D(relabel.get(f.label, f.label), f.vertices))
    return VehicleModel3D("personal_car", tuple(faces))


def van():
    outline = [(-5.0, 0.3), (0.0, 0.3), (0.0, 1.0), (-0.9, 1.1), (-1.7, 2.0), (-5.0, 2.0)]
    faces = profile_faces("body", outline, 0.0, 1.9)
    relabel = {
        "body_edge0": "bottom",
        "body_edge1": "front",
        "body_edge2": "hood",
        "body_edge3": "windshield",
        "body_edge4": "roof",
        "body_edge5": "rear",
    }
    return VehicleModel3D("van", tuple(Face3D(relabel.get(f.label, f.label), f.vertices) for f in faces))


def truck():
    faces = box("cab", -2.2, 0.0, 0.1, 2.4, 0.4, 2.9)
    faces += box("cargo", -8.0, -2.4, 0.0, 2.5, 0.9, 3.8, skip=("front",))
    faces.append(face("cargo_front", [(-2.4, 0, 2.9), (-2.4, 2.5, 2.9), (-2.4, 2.5, 3.8), (-2.4, 0, 3.8)], (1, 0, 0)))
    return VehicleModel3D("truck", tuple(faces))


def bus():
    faces = box("body", -12.0, 0.0, 0.0, 2.55, 0.3, 3.2)
    return VehicleModel3D("bus", tuple(faces))


def tractor_trailer():
    faces = box("cab", -2.4, 0.0, 0.0, 2.5, 0.5, 3.0)
    faces += box("trailer", -16.6, -3.0, 0.0, 2.55, 1.1, 4.0, skip=("front",))
    faces.append(face("trailer_front", [(-3.0, 0, 3.0), (-3.0, 2.55, 3.0), (-3.0, 2.55, 4.0), (-3.0, 0, 4.0)], (1, 0, 0)))
    return VehicleModel3D("tractor_trailer", tuple(faces))


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    rot = look_at(CAMERA_POSITION, CAMERA_TARGET)
    cam = CameraPose(CAMERA_POSITION, tuple(map(tuple, rot)), 600.0, (640.0, 360.0))
    (DATA / "camera.json").write_text(json.dumps(camera_to_dict(cam), indent=2) + "\n", encoding="utf-8")
    for builder in (personal_car, van, truck, bus, tractor_trailer):
        m = builder()
        (DATA / f"{m.class_id}.json").write_text(json.dumps(model_to_dict(m), indent=1) + "\n", encoding="utf-8")
        print(m.class_id, len(m.faces), "faces")


if __name__ == "__main__":
    main()
