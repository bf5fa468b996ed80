"""Turn a selected grasp into a validated four-stage trajectory."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..kinematics import IKConfig
from ..scene import Scene
from ..synthesis import BimanualGraspPose, GraspContext, evaluate
from .plan import (MERGE_THRESHOLD, RESOLUTION, PlanFailure, RobotRig, merge_small_steps,
                   plan_segment, waypoints_from_path)
from .stages import LIFT_HEIGHT, PREGRASP_OFFSET, SQUEEZE_DELTA, Stage, stage_targets
from .validate import MIN_LIFT, RESIDUAL_LIMIT, LiftValidation, validate_lift


@dataclass(frozen=True)
class DemoConfig:
    pregrasp_offset: float = PREGRASP_OFFSET
    lift_height: float = LIFT_HEIGHT
    squeeze_delta: float = SQUEEZE_DELTA
    resolution: float = RESOLUTION
    merge_threshold: float = MERGE_THRESHOLD
    min_lift: float = MIN_LIFT
    residual_limit: float = RESIDUAL_LIMIT

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True, eq=False)
class DemoResult:
    waypoints: list
    validation: LiftValidation
    squeeze_pose: BimanualGraspPose


def _squeezed(grasp: BimanualGraspPose, targets) -> BimanualGraspPose:
    out = grasp
    for h in grasp.active_indices:
        out = out.replace(h, joints=targets[Stage.SQUEEZE][h].joints)
    return out


def lifted_contacts(grasp: BimanualGraspPose, ctx: GraspContext, squeeze_delta=SQUEEZE_DELTA):
    """Contacts re-extracted at the squeeze configuration."""
    targets = stage_targets(grasp, ctx.hands, squeeze_delta=squeeze_delta)
    return evaluate(_squeezed(grasp, targets), ctx).contacts


def build_demo(grasp: BimanualGraspPose, ctx: GraspContext, arms, scene: Scene,
               target_object_id=None, grasp_arm_joints=None, config: DemoConfig = None,
               ik_config: IKConfig = None):
    """Plan home -> pregrasp -> grasp -> squeeze -> lift and validate the lift.

    ``grasp_arm_joints`` are per-hand arm solutions for the grasp wrist (as
    returned by the reachability filter); missing entries are solved here.
    The approach to the pregrasp is checked against the whole scene; later
    segments exclude the target object, which the hand touches and carries.
    Returns ``DemoResult`` or a falsy ``PlanFailure``.
    """
    cfg = config or DemoConfig()
    hands = ctx.hands
    targets = stage_targets(grasp, hands, cfg.pregrasp_offset, cfg.lift_height,
                            cfg.squeeze_delta)
    rig = RobotRig(tuple(arms), hands, grasp.active)
    grasp_arm_joints = grasp_arm_joints or (None, None)

    arm_q = {s: {} for s in Stage}
    for h in rig.indices:
        q_grasp = grasp_arm_joints[h]
        if q_grasp is None:
            res = arms[h].solve(targets[Stage.GRASP][h].wrist, config=ik_config)
            if not res:
                return PlanFailure(0, res.q, f"ik failure at {Stage.GRASP} (hand {h})")
            q_grasp = res.q
        q_grasp = np.asarray(q_grasp, float)
        arm_q[Stage.GRASP][h] = q_grasp
        arm_q[Stage.SQUEEZE][h] = q_grasp
        for s in (Stage.PREGRASP, Stage.LIFT):
            res = arms[h].solve(targets[s][h].wrist, q_init=q_grasp, config=ik_config)
            if not res:
                return PlanFailure(0, res.q, f"ik failure at {s} (hand {h})")
            arm_q[s][h] = res.q

    def config_at(stage):
        return rig.join(arm_q[stage], {h: targets[stage][h].joints for h in rig.indices})

    home = rig.join({h: arms[h].home for h in rig.indices},
                    {h: hands[h].q_open[grasp.strategy] for h in rig.indices})
    start = home
    waypoints = []
    exclude_target = (target_object_id,) if target_object_id is not None else ()
    for stage in Stage:
        goal = config_at(stage)
        exclude = () if stage is Stage.PREGRASP else exclude_target
        path = plan_segment(start, goal, scene, cfg.resolution, rig, exclude)
        if not path:
            return PlanFailure(len(waypoints) + path.index, path.q,
                               f"{path.reason} in {stage} segment")
        if waypoints and len(path) > 1:
            path = path[1:]
        waypoints += waypoints_from_path(path, stage, rig, len(waypoints))
        start = goal

    waypoints = merge_small_steps(waypoints, cfg.merge_threshold)
    validation = validate_from_waypoints(waypoints, grasp, ctx, cfg)
    return DemoResult(waypoints, validation, _squeezed(grasp, targets))


def lift_displacement(waypoints) -> float:
    """Smallest wrist rise over the active hands from the last Squeeze to the last Lift waypoint."""
    sq = [w for w in waypoints if w.stage is Stage.SQUEEZE][-1]
    lf = [w for w in waypoints if w.stage is Stage.LIFT][-1]
    rises = [b.translation[2] - a.translation[2]
             for a, b in zip(sq.wrists, lf.wrists) if a is not None]
    return float(min(rises))


def validate_from_waypoints(waypoints, grasp: BimanualGraspPose, ctx: GraspContext,
                            config: DemoConfig = None) -> LiftValidation:
    cfg = config or DemoConfig()
    contacts = lifted_contacts(grasp, ctx, cfg.squeeze_delta)
    return validate_lift(lift_displacement(waypoints), contacts, ctx.com, ctx.mass, ctx.cone,
                         ctx.alpha, cfg.min_lift, cfg.residual_limit)


def revalidate(record, ctx: GraspContext) -> LiftValidation:
    """Recompute a record's lift validation from its stored waypoints and grasp."""
    cfg = DemoConfig(**record.config.get("demo", {}))
    return validate_from_waypoints(record.waypoints, record.grasp, ctx, cfg)


def wrist_fk_error(waypoints, arms) -> float:
    """Largest gap between stored wrists and FK of the stored arm joints."""
    err = 0.0
    for w in waypoints:
        for h, (q, W) in enumerate(zip(w.arm_joints, w.wrists)):
            if q is None:
                continue
            T = arms[h].palm_pose(q)
            err = max(err, float(np.abs(T.matrix() - W.matrix()).max()))
    return err
