"""The four demonstration stages and their wrist/hand targets."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..kinematics import RigidTransform
from ..synthesis import BimanualGraspPose

PREGRASP_OFFSET = 0.1
LIFT_HEIGHT = 0.2
SQUEEZE_DELTA = 0.15


class Stage(str, Enum):
    PREGRASP = "Pregrasp"
    GRASP = "Grasp"
    SQUEEZE = "Squeeze"
    LIFT = "Lift"

    @property
    def order(self) -> int:
        return list(Stage).index(self)

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class HandTarget:
    wrist: RigidTransform
    joints: np.ndarray


def squeeze_joints(hand, strategy, q, delta: float = SQUEEZE_DELTA) -> np.ndarray:
    """Advance the strategy's flexion joints by ``delta``, clamped to limits."""
    q = np.array(q, float)
    idx = hand.squeeze_joints.get(strategy, [])
    q[idx] += delta
    return hand.chain.clamp(q)


def stage_targets(grasp: BimanualGraspPose, hands, pregrasp_offset: float = PREGRASP_OFFSET,
                  lift_height: float = LIFT_HEIGHT, squeeze_delta: float = SQUEEZE_DELTA) -> dict:
    """Map each stage to per-hand targets (``None`` for inactive hands).

    Pregrasp backs the wrist off along the world palm normal with the hand
    open; Grasp is the grasp itself; Squeeze flexes the designated joints;
    Lift raises the squeezed pose along world +z. Rotations never change.
    """
    hands = tuple(hands) if isinstance(hands, (list, tuple)) else (hands, hands)
    out = {s: [None, None] for s in Stage}
    for h in grasp.active_indices:
        hand = hands[h]
        W, q = grasp.hand_pose(h)
        n = hand.world_palm_normal(W)
        q_sq = squeeze_joints(hand, grasp.strategy, q, squeeze_delta)
        out[Stage.PREGRASP][h] = HandTarget(
            RigidTransform(W.rotation, W.translation - pregrasp_offset * n),
            hand.q_open[grasp.strategy].copy())
        out[Stage.GRASP][h] = HandTarget(W, np.array(q))
        out[Stage.SQUEEZE][h] = HandTarget(W, q_sq)
        out[Stage.LIFT][h] = HandTarget(
            RigidTransform(W.rotation, W.translation + np.array([0.0, 0.0, lift_height])), q_sq)
    return {s: tuple(v) for s, v in out.items()}
