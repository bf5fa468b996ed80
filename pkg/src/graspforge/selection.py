"""Candidate filtering and distance-based ranking."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kinematics import IKConfig, RigidTransform
from .scene import Scene
from .synthesis import BimanualGraspPose, Candidate, CandidateBatch, GraspContext, PoseEvaluation, evaluate

ROT_WEIGHT = 0.1


@dataclass(frozen=True)
class Thresholds:
    """``contact_distance`` (delta), ``penetration`` (epsilon) in metres; ``wrench_residual`` (rho)."""

    contact_distance: float = 5e-3
    penetration: float = 2e-3
    wrench_residual: float = 1e-2


@dataclass(frozen=True)
class FilterResult:
    passed: bool
    reason: str = ""

    def __bool__(self):
        return self.passed


def _pose_of(candidate) -> BimanualGraspPose:
    return candidate.pose if isinstance(candidate, Candidate) else candidate


def physical_filter(candidate, ctx: GraspContext, thresholds: Thresholds = None) -> FilterResult:
    """Quasi-static plausibility: contacts on the surface, no penetration, targets resisted.

    ``candidate`` may be a ``Candidate``, a pose, or a precomputed
    ``PoseEvaluation``. Checks run in the order distance, penetration,
    wrench; the first failure names the reason.
    """
    th = thresholds or Thresholds()
    ev = candidate if isinstance(candidate, PoseEvaluation) else evaluate(_pose_of(candidate), ctx)
    if len(ev.contact_distance) and np.abs(ev.contact_distance).max() > th.contact_distance:
        return FilterResult(False, "contact distance")
    radii = np.concatenate(ev.sphere_radii)
    if len(radii) and np.max(radii - ev.sphere_sdf) > th.penetration:
        return FilterResult(False, "penetration")
    if ev.energy.wrench > th.wrench_residual:
        return FilterResult(False, "wrench residual")
    return FilterResult(True)


@dataclass(frozen=True, eq=False)
class ReachResult:
    passed: bool
    arm_joints: tuple        # per hand: joint vector, or None when inactive or unsolved

    def __bool__(self):
        return self.passed


def reachability_filter(candidate, arms, config: IKConfig = None) -> ReachResult:
    """IK for every active hand's wrist target on its own arm (hand h on ``arms[h]``)."""
    pose = _pose_of(candidate)
    sols = [None, None]
    ok = True
    for h in pose.active_indices:
        res = arms[h].solve(pose.wrist(h), config=config)
        if not res.success:
            ok = False
            break
        sols[h] = res.q
    return ReachResult(ok, tuple(sols))


def collision_filter(candidate, hands, scene: Scene, target_object_id=None) -> FilterResult:
    """Every active proxy sphere clears the table and all non-target scene meshes."""
    pose = _pose_of(candidate)
    hands = tuple(hands) if isinstance(hands, (list, tuple)) else (hands, hands)
    for h in pose.active_indices:
        T, q = pose.hand_pose(h)
        c = hands[h].sphere_centers(T, q)
        if not scene.collision_free(c, hands[h].sphere_radii, exclude=(target_object_id,)):
            return FilterResult(False, "scene collision")
    return FilterResult(True)


def rot_distance(R1, R2) -> float:
    """Geodesic angle between two rotations."""
    R1 = np.asarray(R1, float)
    R2 = np.asarray(R2, float)
    c = (np.trace(R1.T @ R2) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def se3_distance(T1: RigidTransform, T2: RigidTransform, rot_weight: float = ROT_WEIGHT) -> float:
    return float(np.linalg.norm(T1.translation - T2.translation)
                 + rot_weight * rot_distance(T1.rotation, T2.rotation))


def grasp_distance(candidate, current_ee_poses, rot_weight: float = ROT_WEIGHT) -> float:
    """Sum over active hands of the SE(3) distance from wrist target to current pose."""
    pose = _pose_of(candidate)
    return float(sum(se3_distance(pose.wrist(h), current_ee_poses[h], rot_weight)
                     for h in pose.active_indices))


@dataclass(frozen=True, eq=False)
class CandidateReport:
    index: int
    seed: int
    physical: FilterResult
    reachable: FilterResult
    collision_free: FilterResult
    distance: float = None
    arm_joints: tuple = (None, None)

    @property
    def passed(self) -> bool:
        return bool(self.physical and self.reachable and self.collision_free)

    def to_dict(self) -> dict:
        return {
            "index": self.index, "seed": self.seed,
            "physical": {"passed": self.physical.passed, "reason": self.physical.reason},
            "reachable": {"passed": self.reachable.passed, "reason": self.reachable.reason},
            "collision_free": {"passed": self.collision_free.passed,
                               "reason": self.collision_free.reason},
            "distance": self.distance,
            "arm_joints": [None if q is None else np.asarray(q).tolist() for q in self.arm_joints],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateReport":
        fr = [FilterResult(d[k]["passed"], d[k]["reason"])
              for k in ("physical", "reachable", "collision_free")]
        joints = tuple(None if q is None else np.asarray(q, float) for q in d["arm_joints"])
        return cls(d["index"], d["seed"], *fr, d["distance"], joints)


@dataclass(frozen=True, eq=False)
class FilterReport:
    entries: tuple
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        for e in self.entries:
            if (e.distance is not None) != e.passed:
                raise ValueError("distance must be present exactly when all filters pass")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def physical_pass_rate(self) -> float:
        return sum(bool(e.physical) for e in self.entries) / max(len(self.entries), 1)

    def to_dict(self) -> dict:
        t = self.thresholds
        return {"thresholds": {"contact_distance": t.contact_distance,
                               "penetration": t.penetration,
                               "wrench_residual": t.wrench_residual},
                "entries": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "FilterReport":
        return cls(tuple(CandidateReport.from_dict(e) for e in d["entries"]),
                   Thresholds(**d["thresholds"]))


def filter_batch(batch: CandidateBatch, ctx: GraspContext, arms, scene: Scene,
                 target_object_id=None, thresholds: Thresholds = None,
                 ik_config: IKConfig = None, rot_weight: float = ROT_WEIGHT,
                 current_ee_poses=None) -> FilterReport:
    """Run all three filters on every candidate.

    IK is attempted only for physically plausible candidates (a failed
    physical check already rules the candidate out); others are reported
    unreachable with reason "skipped".
    """
    th = thresholds or Thresholds()
    if current_ee_poses is None:
        current_ee_poses = [a.home_pose() for a in arms]
    entries = []
    for i, cand in enumerate(batch):
        phys = physical_filter(cand, ctx, th)
        coll = collision_filter(cand, ctx.hands, scene, target_object_id)
        if phys and coll:
            reach = reachability_filter(cand, arms, ik_config)
            rr = FilterResult(reach.passed, "" if reach.passed else "ik failed")
            joints = reach.arm_joints
        else:
            rr, joints = FilterResult(False, "skipped"), (None, None)
        ok = phys.passed and coll.passed and rr.passed
        dist = grasp_distance(cand, current_ee_poses, rot_weight) if ok else None
        entries.append(CandidateReport(i, cand.seed, phys, rr, coll, dist, joints))
    return FilterReport(tuple(entries), th)


def select_preferred(batch: CandidateBatch, reports: FilterReport, current_ee_poses,
                     rot_weight: float = ROT_WEIGHT):
    """Index of the passing candidate nearest the current end-effector poses, or None.

    Ties go to lower total energy, then lower batch index.
    """
    best, key = None, None
    for i, (cand, rep) in enumerate(zip(batch, reports.entries)):
        if not rep.passed:
            continue
        k = (grasp_distance(cand, current_ee_poses, rot_weight), cand.energy.total, i)
        if key is None or k < key:
            best, key = i, k
    return best
