import warnings

import numpy as np
from numba import njit

from .model import KinematicModel
from .transforms import RigidTransform


class JointLengthError(ValueError):
    pass


def _check_q(model: KinematicModel, q, clamp_warn=True) -> np.ndarray:
    q = np.asarray(q, float).reshape(-1)
    if len(q) != model.dof:
        raise JointLengthError(f"expected {model.dof} joint values, got {len(q)}")
    clamped = model.clamp(q)
    if clamp_warn and not np.array_equal(clamped, q):
        warnings.warn("joint vector outside limits; clamped", stacklevel=3)
    return clamped


@njit(cache=True)
def _forward(parent, child, origin, axis, qidx, kind, root, base, q):
    out = np.empty((origin.shape[0] + 1, 4, 4))
    out[root] = base
    M = np.eye(4)
    for k in range(parent.shape[0]):
        T = out[parent[k]] @ origin[k]
        if qidx[k] >= 0:
            v = q[qidx[k]]
            a = axis[k]
            M[:, :] = 0.0
            M[3, 3] = 1.0
            if kind[k] == 0:
                # Rodrigues about a unit axis
                c, s = np.cos(v), np.sin(v)
                C = 1.0 - c
                M[0, 0] = c + a[0] * a[0] * C
                M[0, 1] = a[0] * a[1] * C - a[2] * s
                M[0, 2] = a[0] * a[2] * C + a[1] * s
                M[1, 0] = a[1] * a[0] * C + a[2] * s
                M[1, 1] = c + a[1] * a[1] * C
                M[1, 2] = a[1] * a[2] * C - a[0] * s
                M[2, 0] = a[2] * a[0] * C - a[1] * s
                M[2, 1] = a[2] * a[1] * C + a[0] * s
                M[2, 2] = c + a[2] * a[2] * C
            else:
                M[0, 0] = M[1, 1] = M[2, 2] = 1.0
                M[0, 3] = a[0] * v
                M[1, 3] = a[1] * v
                M[2, 3] = a[2] * v
            T = T @ M
        out[child[k]] = T
    return out


def link_matrices(model: KinematicModel, base, q, clamp=True) -> np.ndarray:
    """World 4x4 transform of every link, indexed like ``model.links``."""
    qv = _check_q(model, q) if clamp else np.asarray(q, float)
    base = base.matrix() if isinstance(base, RigidTransform) else np.asarray(base, float)
    parent, child, origin, axis, qidx, kind = model._tables
    if len(parent) == 0:
        return base[None].copy()
    return _forward(parent, child, origin, axis, qidx, kind, model.link_index[model.root],
                    np.ascontiguousarray(base), np.ascontiguousarray(qv))


def forward_kinematics(model: KinematicModel, base: RigidTransform, q) -> dict:
    """Map every link name to its world ``RigidTransform``.

    Joint values outside the limits are clamped with a warning.
    """
    mats = link_matrices(model, base, q)
    return {name: RigidTransform.from_matrix(mats[i]) for i, name in enumerate(model.links)}


def point_jacobian(model: KinematicModel, base, q, link: str, local_point,
                   with_rotation=False) -> np.ndarray:
    """Analytic Jacobian of a point fixed on ``link`` w.r.t. the joint vector.

    Returns (3, dof), or (6, dof) with angular rows appended when
    ``with_rotation`` is set.
    """
    mats = link_matrices(model, base, np.asarray(q, float), clamp=False)
    return jacobian_from_matrices(model, mats, link, local_point, with_rotation)


def jacobian_from_matrices(model: KinematicModel, mats, link, local_point, with_rotation=False):
    li = model.link_index
    T = mats[li[link]]
    p = T[:3, :3] @ np.asarray(local_point, float) + T[:3, 3]
    J = np.zeros((6 if with_rotation else 3, model.dof))
    col = {n: i for i, n in enumerate(model.joint_names)}
    for j in model.chain(link):
        if not j.actuated:
            continue
        k = col[j.name]
        # joint frame is the child frame at q; its axis is fixed in that frame
        Tc = mats[li[j.child]]
        a = Tc[:3, :3] @ j.axis
        if j.type == "revolute":
            J[:3, k] = np.cross(a, p - Tc[:3, 3])
            if with_rotation:
                J[3:, k] = a
        else:
            J[:3, k] = a
    return J
