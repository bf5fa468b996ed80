"""Damped least-squares inverse kinematics."""
from dataclasses import dataclass

import numpy as np

from .fk import jacobian_from_matrices, link_matrices
from .model import KinematicModel
from .transforms import RigidTransform, so3_log


@dataclass(frozen=True)
class IKConfig:
    damping: float = 1e-2
    max_iterations: int = 200
    step_clamp: float = 0.2
    pos_tol: float = 1e-4
    rot_tol: float = 1e-3
    restarts: int = 10
    seed: int = 0


@dataclass(frozen=True, eq=False)
class IKResult:
    success: bool
    q: np.ndarray
    position_error: float
    rotation_error: float
    iterations: int

    def __bool__(self):
        return self.success


def pose_error(T: np.ndarray, target: RigidTransform):
    """(position error, rotation vector of R_target R_current^T)."""
    return target.translation - T[:3, 3], so3_log(target.rotation @ T[:3, :3].T)


def _dls(model, base, target, link, tool, q, cfg):
    lam2 = cfg.damping ** 2
    best = None
    for it in range(cfg.max_iterations + 1):
        mats = link_matrices(model, base, q, clamp=False)
        T = mats[model.link_index[link]] @ tool
        ep, er = pose_error(T, target)
        pe, re = float(np.linalg.norm(ep)), float(np.linalg.norm(er))
        if best is None or pe + re < best[1] + best[2]:
            best = (q.copy(), pe, re)
        if pe <= cfg.pos_tol and re <= cfg.rot_tol:
            return q, pe, re, it
        if it == cfg.max_iterations:
            break
        J = jacobian_from_matrices(model, mats, link, tool[:3, 3], with_rotation=True)
        e = np.concatenate([ep, er])
        dq = J.T @ np.linalg.solve(J @ J.T + lam2 * np.eye(6), e)
        m = np.abs(dq).max()
        if m > cfg.step_clamp:
            dq *= cfg.step_clamp / m
        q = model.clamp(q + dq)
    q, pe, re = best
    return q, pe, re, cfg.max_iterations


def ik_solve(model: KinematicModel, target: RigidTransform, q_init, config: IKConfig = None,
             link: str = None, base: RigidTransform = None, tool: RigidTransform = None) -> IKResult:
    """Solve for joints placing ``link`` (times ``tool``) at ``target``.

    The first attempt starts from ``q_init``; further attempts restart from
    joint vectors drawn uniformly within limits by a generator seeded from
    ``config.seed``, so results are deterministic. Success is judged by a
    fresh forward-kinematics evaluation of the returned joints.
    """
    cfg = config or IKConfig()
    base = base or RigidTransform.identity()
    link = link or model.links[-1]
    tool_m = (tool or RigidTransform.identity()).matrix()
    if model.dof < 6:
        raise ValueError(f"full-pose IK needs >= 6 actuated joints, model has {model.dof}")
    rng = np.random.default_rng(cfg.seed)
    starts = [model.clamp(q_init)]
    starts += [rng.uniform(model.lower, model.upper) for _ in range(cfg.restarts)]
    best = None
    total = 0
    for q0 in starts:
        q, pe, re, it = _dls(model, base, target, link, tool_m, np.array(q0, float), cfg)
        total += it
        T = link_matrices(model, base, q, clamp=False)[model.link_index[link]] @ tool_m
        pe_chk, re_chk = (float(np.linalg.norm(x)) for x in pose_error(T, target))
        ok = pe_chk <= cfg.pos_tol and re_chk <= cfg.rot_tol and model.within_limits(q)
        if ok:
            return IKResult(True, q, pe_chk, re_chk, total)
        if best is None or pe_chk + re_chk < best[1] + best[2]:
            best = (q, pe_chk, re_chk)
    return IKResult(False, best[0], best[1], best[2], total)
