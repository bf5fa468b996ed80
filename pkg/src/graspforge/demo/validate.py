"""Quasi-static lift check standing in for a simulated lift-and-hold test."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..contact import FrictionCone, grasp_map
from ..force_qp import GRAVITY, solve_contact_forces

MIN_LIFT = 0.17
RESIDUAL_LIMIT = 1e-2


@dataclass(frozen=True)
class LiftValidation:
    lift_height_m: float
    gravity_residual: float
    success: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return {"lift_height_m": self.lift_height_m, "gravity_residual": self.gravity_residual,
                "success": self.success, "reason": self.reason}

    @classmethod
    def from_dict(cls, d: dict) -> "LiftValidation":
        return cls(d["lift_height_m"], d["gravity_residual"], d["success"], d.get("reason", ""))


def gravity_residual(contacts, com, mass: float, cone: FrictionCone, alpha: float) -> float:
    """Residual norm of the best cone-feasible support of the object's weight."""
    maps = [grasp_map(c, com, alpha) for c in contacts]
    target = np.array([0.0, 0.0, mass * GRAVITY, 0.0, 0.0, 0.0])
    return solve_contact_forces(maps, cone, target).residual_norm


def validate_lift(lift_height: float, contacts, com, mass: float, cone: FrictionCone,
                  alpha: float, min_lift: float = MIN_LIFT,
                  residual_limit: float = RESIDUAL_LIMIT) -> LiftValidation:
    """Success iff the lift reached ``min_lift`` and the contacts can hold the weight.

    ``contacts`` are the squeeze-stage contacts; the object moves rigidly
    with the hand during the lift, so they are also the lifted contacts
    expressed relative to the object.
    """
    r = gravity_residual(contacts, com, mass, cone, alpha)
    if lift_height < min_lift:
        return LiftValidation(float(lift_height), r, False, "lift height")
    if not r <= residual_limit:
        return LiftValidation(float(lift_height), r, False, "gravity residual")
    return LiftValidation(float(lift_height), r, True)
