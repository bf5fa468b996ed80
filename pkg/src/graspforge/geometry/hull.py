import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .mesh import MeshError, TriMesh


class DegenerateHullError(MeshError):
    pass


def convex_hull(mesh: TriMesh) -> TriMesh:
    """Convex hull of the mesh vertices as an outward-wound triangle mesh.

    Hull vertices are a subset of the input vertices; points lying on a hull
    facet but not at a corner are dropped.
    """
    pts = np.asarray(mesh.vertices if isinstance(mesh, TriMesh) else mesh, float)
    if len(pts) < 4:
        raise DegenerateHullError(f"need at least 4 points, got {len(pts)}")
    centered = pts - pts.mean(0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[2] <= 1e-12 * max(sv[0], 1e-300):
        raise DegenerateHullError("input points are coplanar or collinear")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateHullError(str(exc)) from None

    simplices = hull.simplices.copy()
    tri = pts[simplices]
    n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    flip = np.einsum("ij,ij->i", n, hull.equations[:, :3]) < 0
    simplices[flip] = simplices[flip][:, ::-1]

    used = np.unique(simplices)
    remap = np.full(len(pts), -1)
    remap[used] = np.arange(len(used))
    name = getattr(mesh, "name", "points") + "_hull"
    return TriMesh(pts[used], remap[simplices], name=name)
