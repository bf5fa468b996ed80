from dataclasses import dataclass

import numpy as np

from .mesh import MeshError, TriMesh


@dataclass(frozen=True)
class SurfaceSample:
    position: np.ndarray
    normal: np.ndarray


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator so independent streams stay reproducible."""
    return np.random.Generator(np.random.Philox(seed))


def sample_surface_arrays(mesh: TriMesh, n: int, seed=0):
    """Area-weighted uniform surface samples as ``(positions, normals)`` arrays."""
    if len(mesh.faces) == 0:
        raise MeshError("cannot sample an empty mesh")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    w = mesh.face_areas / mesh.face_areas.sum()
    face = rng.choice(len(w), size=n, p=w)
    r1, r2 = rng.random(n), rng.random(n)
    s = np.sqrt(r1)
    bary = np.column_stack([1 - s, s * (1 - r2), s * r2])
    tri = mesh.triangles[face]
    pos = np.einsum("ij,ijk->ik", bary, tri)
    nrm = mesh.face_normals[face] * mesh.orientation
    return pos, nrm


def sample_surface(mesh: TriMesh, n: int, seed=0) -> list:
    pos, nrm = sample_surface_arrays(mesh, n, seed)
    return [SurfaceSample(p, q) for p, q in zip(pos, nrm)]
