"""Grasp pose parameterization and hull-based initialization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import TriMesh, center_of_mass, convex_hull, make_rng, sample_surface_arrays
from ..kinematics import RigidTransform, frame_from_z, so3_exp
from ..strategy import GraspStrategy

STANDOFF_UNIMANUAL = 0.02
STANDOFF_BIMANUAL = 0.05


@dataclass(frozen=True, eq=False)
class BimanualGraspPose:
    """Wrist pose and joints for both hands; only ``active`` hands matter.

    ``translations`` is (2, 3), ``rotations`` (2, 3, 3), ``joints`` a pair of
    joint vectors. Single-hand strategies drive hand 0 and leave hand 1 at
    whatever placeholder it was given.
    """

    translations: np.ndarray
    rotations: np.ndarray
    joints: tuple
    strategy: GraspStrategy

    def __post_init__(self):
        t = np.array(self.translations, float).reshape(2, 3)
        R = np.array(self.rotations, float).reshape(2, 3, 3)
        q = tuple(np.array(v, float).reshape(-1) for v in self.joints)
        if len(q) != 2:
            raise ValueError("need one joint vector per hand")
        for a in (t, R, *q):
            a.flags.writeable = False
        object.__setattr__(self, "translations", t)
        object.__setattr__(self, "rotations", R)
        object.__setattr__(self, "joints", q)
        object.__setattr__(self, "strategy", GraspStrategy.parse(self.strategy))

    @property
    def active(self) -> tuple:
        return self.strategy.active_hands

    @property
    def active_indices(self) -> list:
        return [h for h in (0, 1) if self.active[h]]

    def wrist(self, h: int) -> RigidTransform:
        return RigidTransform(self.rotations[h], self.translations[h])

    def hand_pose(self, h: int) -> tuple:
        return self.wrist(h), self.joints[h]

    def replace(self, h: int, translation=None, rotation=None, joints=None) -> "BimanualGraspPose":
        t = self.translations.copy()
        R = self.rotations.copy()
        q = list(self.joints)
        if translation is not None:
            t[h] = translation
        if rotation is not None:
            R[h] = rotation
        if joints is not None:
            q[h] = joints
        return BimanualGraspPose(t, R, tuple(q), self.strategy)

    def is_valid(self, hands, tol=1e-9) -> bool:
        """Rotations orthonormal and active joints within limits."""
        for h in self.active_indices:
            if not self.wrist(h).is_valid(tol):
                return False
            if not hands[h].chain.within_limits(self.joints[h]):
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "hands": [
                {"active": bool(self.active[h]),
                 "translation": self.translations[h].tolist(),
                 "rotation": self.rotations[h].tolist(),
                 "joints": self.joints[h].tolist()}
                for h in (0, 1)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BimanualGraspPose":
        hs = d["hands"]
        return cls([h["translation"] for h in hs], [h["rotation"] for h in hs],
                   tuple(h["joints"] for h in hs), d["strategy"])


def _palm_rotation(hand, outward_normal, roll) -> np.ndarray:
    # palm normal (hand frame) must map to the inward surface direction
    target = frame_from_z(-np.asarray(outward_normal, float))
    local = frame_from_z(hand.palm_normal)
    return target @ so3_exp([0.0, 0.0, roll]) @ local.T


def _clears_table(hand, T: RigidTransform, q, table_height) -> bool:
    if table_height is None:
        return True
    c = hand.sphere_centers(T, q)
    return bool(np.all(c[:, 2] - hand.sphere_radii >= table_height))


def init_grasp(mesh: TriMesh, hands, strategy, seed: int, standoff: float = None,
               table_height: float = None, max_tries: int = 64,
               hull: TriMesh = None) -> BimanualGraspPose:
    """Place the active hands on the convex hull, palm facing the object.

    Each hand sits ``standoff`` metres out along the outward hull normal of a
    surface sample, rotated about that normal by a random roll, with joints at
    the strategy's open posture. For two hands the second sample is redrawn
    until it lies on the opposite side of the hull centroid; hand 0 takes the
    sample with the smaller y. With ``table_height`` set, samples whose hand
    proxies would start below the table are redrawn (up to ``max_tries``).
    """
    strategy = GraspStrategy.parse(strategy)
    hands = tuple(hands) if isinstance(hands, (list, tuple)) else (hands, hands)
    hull = convex_hull(mesh) if hull is None else hull
    if standoff is None:
        standoff = STANDOFF_BIMANUAL if strategy.bimanual else STANDOFF_UNIMANUAL
    rng = make_rng(seed)
    stream = iter(int(s) for s in rng.integers(0, 2**63 - 1, size=4 * max_tries))

    def draw(h):
        for _ in range(max_tries):
            pos, nrm = sample_surface_arrays(hull, 1, seed=next(stream))
            roll = rng.uniform(-np.pi, np.pi)
            p, n = pos[0], nrm[0]
            R = _palm_rotation(hands[h], n, roll)
            T = RigidTransform(R, p + standoff * n)
            if _clears_table(hands[h], T, hands[h].q_open[strategy], table_height):
                break
        return p, T

    q = tuple(hands[h].q_open[strategy] for h in (0, 1))
    if not strategy.bimanual:
        _, T = draw(0)
        idle = RigidTransform.identity()
        return BimanualGraspPose([T.translation, idle.translation], [T.rotation, idle.rotation],
                                 q, strategy)
    c = center_of_mass(hull)
    s1, T1 = draw(0)
    for _ in range(max_tries):
        s2, T2 = draw(1)
        if np.dot(s1 - c, s2 - c) < 0:
            break
    else:
        raise RuntimeError("could not draw two samples on opposite sides of the centroid")
    if s2[1] < s1[1]:
        T1, T2 = T2, T1
    return BimanualGraspPose([T1.translation, T2.translation], [T1.rotation, T2.rotation],
                             q, strategy)
