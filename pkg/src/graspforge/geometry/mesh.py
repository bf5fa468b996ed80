"""Triangle meshes: OBJ ingest, validity checks and mass properties."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

AREA_EPS = 1e-18


class MeshError(ValueError):
    """Base class for mesh construction and query failures."""


class ObjParseError(MeshError):
    pass


class DegenerateTriangleError(MeshError):
    def __init__(self, faces):
        self.faces = list(faces)
        super().__init__(f"degenerate (zero-area) triangles at faces {self.faces}")


class NotWatertightError(MeshError):
    pass


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Immutable triangle mesh.

    Parameters
    ----------
    vertices : (V, 3) array_like
        Vertex positions in meters.
    faces : (F, 3) array_like of int
        Vertex indices per triangle, counter-clockwise seen from outside.
    """

    vertices: np.ndarray
    faces: np.ndarray
    name: str = field(default="mesh", compare=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 3)
        f = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        if not np.all(np.isfinite(v)):
            raise MeshError("vertex coordinates must be finite")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            bad = np.nonzero((f < 0).any(1) | (f >= len(v)).any(1))[0]
            raise MeshError(
                f"face index out of range (mesh has {len(v)} vertices) at faces {bad.tolist()}"
            )
        v.flags.writeable = False
        f.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        if len(f):
            areas = self.face_areas
            bad = np.nonzero(areas <= AREA_EPS)[0]
            if len(bad):
                raise DegenerateTriangleError(bad.tolist())

    @property
    def triangles(self) -> np.ndarray:
        return self.vertices[self.faces]

    @cached_property
    def _cross(self) -> np.ndarray:
        t = self.triangles
        return np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])

    @cached_property
    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self._cross, axis=1)

    @cached_property
    def face_normals(self) -> np.ndarray:
        n = self._cross / np.linalg.norm(self._cross, axis=1, keepdims=True)
        n.flags.writeable = False
        return n

    @cached_property
    def watertight(self) -> bool:
        """Every undirected edge is shared by exactly two faces."""
        if len(self.faces) == 0:
            return False
        e = np.sort(self.faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return bool(np.all(counts == 2))

    @cached_property
    def signed_volume(self) -> float:
        t = self.triangles
        return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)

    @property
    def orientation(self) -> float:
        """+1 when face winding yields outward normals, -1 when inverted."""
        if self.watertight and self.signed_volume < 0:
            return -1.0
        return 1.0

    @property
    def bounds(self) -> np.ndarray:
        """(2, 3) array of axis-aligned min and max corners."""
        return np.stack([self.vertices.min(0), self.vertices.max(0)])

    @property
    def extents(self) -> np.ndarray:
        b = self.bounds
        return b[1] - b[0]

    @cached_property
    def area_centroid(self) -> np.ndarray:
        c = self.triangles.mean(axis=1)
        return (self.face_areas[:, None] * c).sum(0) / self.face_areas.sum()

    def transformed(self, rotation=None, translation=None) -> "TriMesh":
        R = np.eye(3) if rotation is None else np.asarray(rotation, float)
        t = np.zeros(3) if translation is None else np.asarray(translation, float)
        return TriMesh(self.vertices @ R.T + t, self.faces, name=self.name)

    def bounding_radius(self, center=None) -> float:
        c = center_of_mass(self) if center is None else np.asarray(center, float)
        return float(np.linalg.norm(self.vertices - c, axis=1).max())

    def __repr__(self):
        return (f"TriMesh(name={self.name!r}, vertices={len(self.vertices)}, "
                f"faces={len(self.faces)}, watertight={self.watertight})")


def parse_obj(text: str, name: str = "mesh") -> TriMesh:
    """Parse OBJ positions and triangular faces; normals and UVs are ignored."""
    verts, faces = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "v":
                if len(tok) < 4:
                    raise ValueError("vertex needs three coordinates")
                verts.append([float(x) for x in tok[1:4]])
            elif tok[0] == "f":
                if len(tok) != 4:
                    raise ObjParseError(
                        f"line {lineno}: only triangles are supported, got {len(tok) - 1}-gon")
                idx = []
                for t in tok[1:]:
                    i = int(t.split("/")[0])
                    # negative indices are relative to the current vertex count
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                faces.append(idx)
        except ObjParseError:
            raise
        except (ValueError, IndexError) as exc:
            raise ObjParseError(f"line {lineno}: cannot parse {raw!r} ({exc})") from None
    if not faces:
        raise ObjParseError("no faces found")
    return TriMesh(np.array(verts, float).reshape(-1, 3), np.array(faces), name=name)


def load_mesh(path) -> TriMesh:
    path = Path(path)
    return parse_obj(path.read_text(), name=path.stem)


def format_obj(mesh: TriMesh) -> str:
    lines = [f"# {mesh.name}"]
    lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist()]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces.tolist()]
    return "\n".join(lines) + "\n"


def save_mesh(mesh: TriMesh, path) -> None:
    Path(path).write_text(format_obj(mesh))


def center_of_mass(mesh: TriMesh, allow_area_fallback: bool = False) -> np.ndarray:
    """Uniform-density volume centroid.

    Sums signed tetrahedra spanned by the origin and each face. Open meshes
    have no enclosed volume; pass ``allow_area_fallback=True`` to get the
    area-weighted surface centroid instead.
    """
    if not mesh.watertight:
        if allow_area_fallback:
            return mesh.area_centroid.copy()
        raise NotWatertightError(
            "center_of_mass needs a watertight mesh; "
            "pass allow_area_fallback=True to use the surface area centroid")
    t = mesh.triangles
    vol = np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])) / 6.0
    return (vol[:, None] * t.sum(axis=1) / 4.0).sum(0) / vol.sum()
