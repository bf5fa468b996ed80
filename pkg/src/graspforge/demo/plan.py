"""Collision-checked joint-space interpolation and waypoint bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..kinematics import RigidTransform
from ..scene import Scene
from .stages import Stage

RESOLUTION = 0.05
MERGE_THRESHOLD = 1e-3


@dataclass(frozen=True, eq=False)
class RobotRig:
    """Arms carrying hands; a full joint vector stacks (arm, hand) for each active hand."""

    arms: tuple
    hands: tuple
    active: tuple = (True, False)

    @property
    def indices(self) -> list:
        return [h for h in (0, 1) if self.active[h]]

    @property
    def sizes(self) -> list:
        return [(self.arms[h].dof, self.hands[h].dof) for h in self.indices]

    @property
    def dof(self) -> int:
        return sum(a + b for a, b in self.sizes)

    def split(self, q) -> dict:
        """``{hand: (arm_q, hand_q)}`` for the active hands."""
        q = np.asarray(q, float)
        out, k = {}, 0
        for h, (na, nh) in zip(self.indices, self.sizes):
            out[h] = (q[k:k + na], q[k + na:k + na + nh])
            k += na + nh
        return out

    def join(self, arm_q, hand_q) -> np.ndarray:
        return np.concatenate([np.concatenate([np.asarray(arm_q[h], float),
                                               np.asarray(hand_q[h], float)])
                               for h in self.indices])

    @property
    def lower(self) -> np.ndarray:
        return self.join({h: self.arms[h].model.lower for h in self.indices},
                         {h: self.hands[h].chain.lower for h in self.indices})

    @property
    def upper(self) -> np.ndarray:
        return self.join({h: self.arms[h].model.upper for h in self.indices},
                         {h: self.hands[h].chain.upper for h in self.indices})

    def within_limits(self, q, tol=1e-12) -> bool:
        q = np.asarray(q, float)
        return bool(np.all(q >= self.lower - tol) and np.all(q <= self.upper + tol))

    def wrists(self, q) -> dict:
        return {h: self.arms[h].palm_pose(aq) for h, (aq, _) in self.split(q).items()}

    def spheres(self, q):
        centers, radii = [], []
        for h, (aq, hq) in self.split(q).items():
            W = self.arms[h].palm_pose(aq)
            centers.append(self.hands[h].sphere_centers(W, hq))
            radii.append(self.hands[h].sphere_radii)
        return np.vstack(centers), np.concatenate(radii)

    def collision_free(self, q, scene: Scene, exclude=()) -> bool:
        c, r = self.spheres(q)
        return scene.collision_free(c, r, exclude)


@dataclass(frozen=True, eq=False)
class PlanFailure:
    """Planning failed at waypoint ``index`` (configuration ``q``)."""

    index: int
    q: np.ndarray
    reason: str = "collision"

    def __bool__(self):
        return False

    def __str__(self):
        return f"{self.reason} at waypoint {self.index}"


def interpolate(q_from, q_to, resolution: float = RESOLUTION) -> list:
    """Evenly spaced joint vectors with max per-joint step at most ``resolution``."""
    a = np.asarray(q_from, float)
    b = np.asarray(q_to, float)
    span = float(np.abs(b - a).max()) if a.size else 0.0
    if span == 0.0:
        return [a.copy()]
    # guard against 0.5 / 0.05 evaluating to 10.000000000000002
    n = max(1, int(np.ceil(span / resolution - 1e-9)))
    return [a + (b - a) * (k / n) for k in range(n + 1)]


def plan_segment(q_from, q_to, scene: Scene, resolution: float = RESOLUTION,
                 rig: RobotRig = None, exclude=()):
    """Linear joint interpolation checked against ``scene`` (minus ``exclude``).

    Returns the waypoint list, or a falsy ``PlanFailure`` naming the first
    waypoint that leaves the joint limits or collides.
    """
    path = interpolate(q_from, q_to, resolution)
    for i, q in enumerate(path):
        if rig is None:
            continue
        if not rig.within_limits(q):
            return PlanFailure(i, q, "joint limits")
        if not rig.collision_free(q, scene, exclude):
            return PlanFailure(i, q, "collision")
    return path


@dataclass(frozen=True, eq=False)
class Waypoint:
    """One trajectory sample. ``arm_joints``/``hand_joints``/``wrists`` are per hand, None if idle."""

    index: int
    stage: Stage
    arm_joints: tuple
    hand_joints: tuple
    wrists: tuple = field(default=(None, None))

    def vector(self) -> np.ndarray:
        parts = []
        for a, h in zip(self.arm_joints, self.hand_joints):
            if a is not None:
                parts += [np.asarray(a, float), np.asarray(h, float)]
        return np.concatenate(parts)

    def with_index(self, i: int) -> "Waypoint":
        return Waypoint(i, self.stage, self.arm_joints, self.hand_joints, self.wrists)

    def to_dict(self) -> dict:
        def arr(x):
            return None if x is None else np.asarray(x, float).tolist()
        return {
            "index": self.index,
            "stage": self.stage.value,
            "arm_joints": [arr(a) for a in self.arm_joints],
            "hand_joints": [arr(h) for h in self.hand_joints],
            "wrists": [None if w is None else {"rotation": w.rotation.tolist(),
                                               "translation": w.translation.tolist()}
                       for w in self.wrists],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Waypoint":
        def arr(x):
            return None if x is None else np.asarray(x, float)
        wr = tuple(None if w is None else RigidTransform(w["rotation"], w["translation"])
                   for w in d["wrists"])
        return cls(d["index"], Stage(d["stage"]), tuple(arr(a) for a in d["arm_joints"]),
                   tuple(arr(h) for h in d["hand_joints"]), wr)


def waypoints_from_path(path, stage: Stage, rig: RobotRig, start_index: int = 0) -> list:
    out = []
    for k, q in enumerate(path):
        parts = rig.split(q)
        arm = tuple(parts[h][0] if h in parts else None for h in (0, 1))
        hand = tuple(parts[h][1] if h in parts else None for h in (0, 1))
        wr = tuple(rig.arms[h].palm_pose(parts[h][0]) if h in parts else None for h in (0, 1))
        out.append(Waypoint(start_index + k, stage, arm, hand, wr))
    return out


def merge_small_steps(waypoints, theta_min: float = MERGE_THRESHOLD) -> list:
    """Collapse runs of near-identical consecutive waypoints within a stage.

    A waypoint closer than ``theta_min`` (max per-joint delta) to the last
    kept one is dropped; the final waypoint of the trajectory replaces its
    predecessor instead so both trajectory endpoints survive. Waypoints
    in different stages are never merged. Indices are renumbered.
    """
    wps = list(waypoints)
    if not wps:
        raise ValueError("no waypoints to merge")

    def close(a, b):
        return a.stage == b.stage and np.abs(a.vector() - b.vector()).max() < theta_min

    kept = [wps[0]]
    last = len(wps) - 1
    for i in range(1, len(wps)):
        w = wps[i]
        if not close(kept[-1], w):
            kept.append(w)
        elif i == last and len(kept) > 1:
            kept[-1] = w
            while len(kept) > 2 and close(kept[-2], kept[-1]):
                del kept[-2]
    return [w.with_index(i) for i, w in enumerate(kept)]
