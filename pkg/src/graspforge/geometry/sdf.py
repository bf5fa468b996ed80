"""Signed distance to triangle meshes.

Distances are exact point-triangle distances accelerated by a median-split
bounding volume hierarchy. The sign comes from ray-parity counting (majority
over three fixed, non-axis-aligned rays), so it is only meaningful for
watertight meshes; open meshes yield unsigned distances.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .mesh import TriMesh

LEAF_SIZE = 4

RAY_DIRECTIONS = np.array([
    [0.5773502691896258, 0.5773502691896258, 0.5773502691896258],
    [-0.26726124191242440, 0.80178372573727320, 0.53452248382484880],
    [0.41702882811414954, -0.27801921874276636, 0.86530700327938460],
])
RAY_DIRECTIONS = RAY_DIRECTIONS / np.linalg.norm(RAY_DIRECTIONS, axis=1, keepdims=True)


@dataclass(frozen=True)
class BVH:
    tris: np.ndarray      # (F, 3, 3) triangles in leaf order
    order: np.ndarray     # leaf-order position -> original face index
    lo: np.ndarray        # (N, 3) node box min
    hi: np.ndarray        # (N, 3) node box max
    left: np.ndarray      # child index, -1 for leaves
    right: np.ndarray
    start: np.ndarray     # first triangle of a leaf
    count: np.ndarray     # triangles in a leaf, 0 for inner nodes


def build_bvh(triangles: np.ndarray, leaf_size: int = LEAF_SIZE) -> BVH:
    triangles = np.asarray(triangles, float)
    cent = triangles.mean(axis=1)
    tmin = triangles.min(axis=1)
    tmax = triangles.max(axis=1)
    order = np.arange(len(triangles))
    lo, hi, left, right, start, count = [], [], [], [], [], []

    def new_node(idx):
        lo.append(tmin[idx].min(0))
        hi.append(tmax[idx].max(0))
        left.append(-1)
        right.append(-1)
        start.append(0)
        count.append(0)
        return len(lo) - 1

    # iterative build over (node, slice) pairs
    root = new_node(order)
    stack = [(root, 0, len(order))]
    while stack:
        node, a, b = stack.pop()
        idx = order[a:b]
        if b - a <= leaf_size:
            start[node], count[node] = a, b - a
            continue
        c = cent[idx]
        axis = int(np.argmax(c.max(0) - c.min(0)))
        srt = idx[np.argsort(c[:, axis], kind="stable")]
        order[a:b] = srt
        mid = (a + b) // 2
        ln = new_node(order[a:mid])
        rn = new_node(order[mid:b])
        left[node], right[node] = ln, rn
        stack.append((rn, mid, b))
        stack.append((ln, a, mid))
    return BVH(
        tris=np.ascontiguousarray(triangles[order]),
        order=order.copy(),
        lo=np.array(lo), hi=np.array(hi),
        left=np.array(left, np.int64), right=np.array(right, np.int64),
        start=np.array(start, np.int64), count=np.array(count, np.int64),
    )


@njit(cache=True)
def _closest_on_triangle(p, a, b, c):
    # Ericson, Real-Time Collision Detection, 5.1.5; scalar form avoids temporaries
    abx, aby, abz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    acx, acy, acz = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    apx, apy, apz = p[0] - a[0], p[1] - a[1], p[2] - a[2]
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        return a[0], a[1], a[2]
    bpx, bpy, bpz = p[0] - b[0], p[1] - b[1], p[2] - b[2]
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        return b[0], b[1], b[2]
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return a[0] + v * abx, a[1] + v * aby, a[2] + v * abz
    cpx, cpy, cpz = p[0] - c[0], p[1] - c[1], p[2] - c[2]
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        return c[0], c[1], c[2]
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return a[0] + w * acx, a[1] + w * acy, a[2] + w * acz
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return b[0] + w * (c[0] - b[0]), b[1] + w * (c[1] - b[1]), b[2] + w * (c[2] - b[2])
    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return (a[0] + abx * v + acx * w, a[1] + aby * v + acy * w, a[2] + abz * v + acz * w)


@njit(cache=True)
def _box_dist2(p, lo, hi):
    s = 0.0
    for k in range(3):
        if p[k] < lo[k]:
            s += (lo[k] - p[k]) ** 2
        elif p[k] > hi[k]:
            s += (p[k] - hi[k]) ** 2
    return s


@njit(cache=True)
def _closest_points(points, tris, lo, hi, left, right, start, count):
    n = points.shape[0]
    dist = np.empty(n)
    closest = np.empty((n, 3))
    face = np.empty(n, np.int64)
    stack = np.empty(128, np.int64)
    for i in range(n):
        p = points[i]
        best = np.inf
        top = 0
        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top]
            if _box_dist2(p, lo[node], hi[node]) >= best:
                continue
            if count[node] > 0:
                for t in range(start[node], start[node] + count[node]):
                    qx, qy, qz = _closest_on_triangle(p, tris[t, 0], tris[t, 1], tris[t, 2])
                    d2 = (p[0] - qx) ** 2 + (p[1] - qy) ** 2 + (p[2] - qz) ** 2
                    if d2 < best:
                        best = d2
                        closest[i, 0] = qx
                        closest[i, 1] = qy
                        closest[i, 2] = qz
                        face[i] = t
            else:
                l, r = left[node], right[node]
                dl = _box_dist2(p, lo[l], hi[l])
                dr = _box_dist2(p, lo[r], hi[r])
                # push the farther child first so the nearer one is popped next
                if dl < dr:
                    stack[top] = r
                    stack[top + 1] = l
                else:
                    stack[top] = l
                    stack[top + 1] = r
                top += 2
        dist[i] = np.sqrt(best)
    return dist, closest, face


@njit(cache=True)
def _ray_box(o, inv, lo, hi):
    tmin = 0.0
    tmax = np.inf
    for k in range(3):
        t1 = (lo[k] - o[k]) * inv[k]
        t2 = (hi[k] - o[k]) * inv[k]
        if t1 > t2:
            t1, t2 = t2, t1
        tmin = max(tmin, t1)
        tmax = min(tmax, t2)
    return tmin <= tmax


@njit(cache=True)
def _ray_hits(o, d, tris, lo, hi, left, right, start, count):
    inv = 1.0 / d
    hits = 0
    stack = np.empty(128, np.int64)
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top]
        if not _ray_box(o, inv, lo[node], hi[node]):
            continue
        if count[node] > 0:
            for t in range(start[node], start[node] + count[node]):
                # Moller-Trumbore
                a = tris[t, 0]
                e1 = tris[t, 1] - a
                e2 = tris[t, 2] - a
                pv = np.cross(d, e2)
                det = e1 @ pv
                if abs(det) < 1e-300:
                    continue
                tv = o - a
                u = (tv @ pv) / det
                if u < 0.0 or u > 1.0:
                    continue
                qv = np.cross(tv, e1)
                v = (d @ qv) / det
                if v < 0.0 or u + v > 1.0:
                    continue
                if (e2 @ qv) / det > 0.0:
                    hits += 1
        else:
            stack[top] = left[node]
            stack[top + 1] = right[node]
            top += 2
    return hits


@njit(cache=True)
def _inside(points, dirs, tris, lo, hi, left, right, start, count):
    n = points.shape[0]
    out = np.empty(n, np.bool_)
    for i in range(n):
        votes = 0
        for k in range(dirs.shape[0]):
            if _ray_hits(points[i], dirs[k], tris, lo, hi, left, right, start, count) % 2 == 1:
                votes += 1
        out[i] = 2 * votes > dirs.shape[0]
    return out


def _bvh_of(mesh: TriMesh) -> BVH:
    cache = mesh.__dict__
    if "_bvh" not in cache:
        cache["_bvh"] = build_bvh(mesh.triangles)
    return cache["_bvh"]


def _bvh_args(b: BVH):
    return b.tris, b.lo, b.hi, b.left, b.right, b.start, b.count


def closest_points(mesh: TriMesh, points):
    """Nearest surface points; returns (distance, closest point, face index)."""
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, float)))
    b = _bvh_of(mesh)
    d, c, f = _closest_points(pts, *_bvh_args(b))
    return d, c, b.order[f]


def inside(mesh: TriMesh, points) -> np.ndarray:
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, float)))
    return _inside(pts, RAY_DIRECTIONS, *_bvh_args(_bvh_of(mesh)))


def signed_distance(mesh: TriMesh, points, return_flag: bool = False):
    """Signed distance, negative inside.

    ``points`` may be a single 3-vector (scalar result) or an (N, 3) array.
    For open meshes the magnitude is returned unsigned; ``return_flag=True``
    yields ``(values, is_signed)`` so callers can tell the two apart.
    """
    arr = np.asarray(points, float)
    single = arr.ndim == 1
    d, _, _ = closest_points(mesh, arr)
    signed = mesh.watertight
    if signed:
        d = np.where(inside(mesh, arr), -d, d)
    val = float(d[0]) if single else d
    return (val, signed) if return_flag else val


# brute-force reference path --------------------------------------------------

def point_triangle_distance_bruteforce(points, triangles) -> np.ndarray:
    """(N, F) exact distances by region classification, vectorized in numpy."""
    p = np.asarray(points, float)[:, None, :]
    a, b, c = (np.asarray(triangles, float)[None, :, k, :] for k in range(3))
    ab, ac, ap = b - a, c - a, p - a
    d1 = (ab * ap).sum(-1)
    d2 = (ac * ap).sum(-1)
    bp = p - b
    d3 = (ab * bp).sum(-1)
    d4 = (ac * bp).sum(-1)
    cp = p - c
    d5 = (ab * cp).sum(-1)
    d6 = (ac * cp).sum(-1)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = va + vb + vc
        q = a + ab * (vb / denom)[..., None] + ac * (vc / denom)[..., None]
        q = np.where(((va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0))[..., None],
                     b + ((d4 - d3) / ((d4 - d3) + (d5 - d6)))[..., None] * (c - b), q)
        q = np.where(((vb <= 0) & (d2 >= 0) & (d6 <= 0))[..., None],
                     a + (d2 / (d2 - d6))[..., None] * ac, q)
        q = np.where(((d6 >= 0) & (d5 <= d6))[..., None], c, q)
        q = np.where(((vc <= 0) & (d1 >= 0) & (d3 <= 0))[..., None],
                     a + (d1 / (d1 - d3))[..., None] * ab, q)
        q = np.where(((d3 >= 0) & (d4 <= d3))[..., None], b, q)
        q = np.where(((d1 <= 0) & (d2 <= 0))[..., None], a, q)
    return np.linalg.norm(p - q, axis=-1)


def signed_distance_bruteforce(mesh: TriMesh, points) -> np.ndarray:
    """O(F) reference: exact distance to every face, sign by single-ray parity."""
    pts = np.atleast_2d(np.asarray(points, float))
    d = point_triangle_distance_bruteforce(pts, mesh.triangles).min(axis=1)
    if not mesh.watertight:
        return d
    tri = mesh.triangles
    a = tri[None, :, 0]
    e1 = tri[None, :, 1] - a
    e2 = tri[None, :, 2] - a
    votes = np.zeros(len(pts), int)
    for ray in RAY_DIRECTIONS:
        pv = np.cross(ray, e2)
        det = (e1 * pv).sum(-1)
        tv = pts[:, None, :] - a
        with np.errstate(divide="ignore", invalid="ignore"):
            u = (tv * pv).sum(-1) / det
            qv = np.cross(tv, e1)
            v = (qv @ ray) / det
            t = (e2 * qv).sum(-1) / det
        hit = (u >= 0) & (u <= 1) & (v >= 0) & (u + v <= 1) & (t > 0)
        votes += hit.sum(1) % 2
    return np.where(2 * votes > len(RAY_DIRECTIONS), -d, d)
