"""Arm rigs: a mounted serial arm carrying a hand at its flange."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fk import link_matrices
from .ik import IKConfig, IKResult, ik_solve
from .model import KinematicModel, load_urdf
from .transforms import RigidTransform, rpy_matrix


@dataclass(frozen=True, eq=False)
class ArmRig:
    """``mount`` places the arm base in the world; ``tool`` maps flange to palm frame."""

    model: KinematicModel
    mount: RigidTransform
    flange: str
    tool: RigidTransform
    home: np.ndarray
    name: str = "arm"
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def dof(self) -> int:
        return self.model.dof

    def palm_pose(self, q) -> RigidTransform:
        T = link_matrices(self.model, self.mount, q, clamp=False)[self.model.link_index[self.flange]]
        return RigidTransform.from_matrix(T @ self.tool.matrix())

    def home_pose(self) -> RigidTransform:
        return self.palm_pose(self.home)

    def solve(self, target: RigidTransform, q_init=None, config: IKConfig = None) -> IKResult:
        q0 = self.home if q_init is None else q_init
        return ik_solve(self.model, target, q0, config, link=self.flange,
                        base=self.mount, tool=self.tool)


def _tf(d) -> RigidTransform:
    return RigidTransform(rpy_matrix(*d.get("rpy", [0, 0, 0])), d.get("xyz", [0, 0, 0]))


def load_arms(meta_path) -> list:
    """One ``ArmRig`` per configured mount, in hand-index order."""
    meta_path = Path(meta_path)
    meta = json.loads(meta_path.read_text())
    model = load_urdf(meta_path.parent / meta["urdf"])
    rigs = []
    for m in meta["mounts"]:
        home = np.asarray(m.get("home", meta.get("home")), float)
        rigs.append(ArmRig(model, _tf(m), meta["flange"], _tf(meta["tool"]), home,
                           name=m.get("name", "arm"), meta=meta))
    return rigs
