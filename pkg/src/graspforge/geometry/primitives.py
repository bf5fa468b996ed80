"""Analytic mesh constructors used for fixtures and tests."""
import numpy as np

from .mesh import TriMesh

_CUBE_FACES = np.array([
    [0, 2, 1], [0, 3, 2],  # z = 0
    [4, 5, 6], [4, 6, 7],  # z = 1
    [0, 1, 5], [0, 5, 4],  # y = 0
    [2, 3, 7], [2, 7, 6],  # y = 1
    [1, 2, 6], [1, 6, 5],  # x = 1
    [0, 4, 7], [0, 7, 3],  # x = 0
])


def box(extents=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0), name="box") -> TriMesh:
    """Axis-aligned box with its minimum corner at ``origin``."""
    ex = np.asarray(extents, float)
    unit = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                     [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], float)
    return TriMesh(unit * ex + np.asarray(origin, float), _CUBE_FACES.copy(), name=name)


def unit_cube() -> TriMesh:
    return box(name="unit_cube")


def centered_box(extents, name="box") -> TriMesh:
    ex = np.asarray(extents, float)
    return box(ex, -ex / 2, name=name)


def icosphere(radius=1.0, subdivisions=2, name=None) -> TriMesh:
    """Geodesic sphere centered at the origin, vertices on the sphere."""
    t = (1.0 + 5 ** 0.5) / 2.0
    verts = [[-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
             [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
             [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1]]
    faces = [[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
             [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
             [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
             [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]]
    verts = [list(np.asarray(v, float) / np.linalg.norm(v)) for v in verts]
    for _ in range(subdivisions):
        cache = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = (np.asarray(verts[a]) + np.asarray(verts[b])) / 2
                verts.append(list(m / np.linalg.norm(m)))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = new
    return TriMesh(np.array(verts) * radius, np.array(faces),
                   name=name or f"icosphere_{subdivisions}")


def cylinder(radius=0.03, height=0.1, segments=32, name="cylinder") -> TriMesh:
    """Closed cylinder along z with its base on z = 0."""
    ang = 2 * np.pi * np.arange(segments) / segments
    ring = np.stack([radius * np.cos(ang), radius * np.sin(ang)], 1)
    bottom = np.column_stack([ring, np.zeros(segments)])
    top = np.column_stack([ring, np.full(segments, height)])
    verts = np.vstack([bottom, top, [[0, 0, 0], [0, 0, height]]])
    cb, ct = 2 * segments, 2 * segments + 1
    faces = []
    for i in range(segments):
        j = (i + 1) % segments
        faces += [[i, j, segments + j], [i, segments + j, segments + i],
                  [cb, j, i], [ct, segments + i, segments + j]]
    return TriMesh(verts, np.array(faces), name=name)
