"""Hand models: kinematic chain plus palm frame, contact anchors and sphere proxies."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ..contact import Contact
from ..strategy import GraspStrategy
from .fk import link_matrices
from .model import KinematicModel, load_urdf
from .transforms import RigidTransform, frame_from_z, rpy_matrix


@dataclass(frozen=True, eq=False)
class Anchor:
    """A candidate contact site fixed to a hand link."""

    name: str
    link: str
    offset: np.ndarray
    frame: np.ndarray   # local contact frame in link coordinates, z = pressing direction


@dataclass(frozen=True, eq=False)
class HandModel:
    """Kinematic chain rooted at the palm frame.

    The hand pose (t_h, R_h) is the world pose of ``palm_link`` composed
    with ``palm_offset``; ``palm_normal`` (palm-frame z by convention)
    points out of the palm toward the object.
    """

    chain: KinematicModel
    palm_link: str
    palm_offset: RigidTransform
    palm_normal: np.ndarray
    anchors: dict
    spheres: dict
    q_open: dict
    squeeze_joints: dict
    span: float = 0.12
    name: str = "hand"
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.palm_link not in self.chain.links:
            raise ValueError(f"palm link {self.palm_link!r} not in chain")
        for strat in GraspStrategy:
            anchors = self.anchors.get(strat)
            if anchors is None or len(anchors) < 2:
                raise ValueError(f"strategy {strat} needs at least 2 anchors")
            for a in anchors:
                if a.link not in self.chain.links:
                    raise ValueError(f"anchor {a.name!r} references unknown link {a.link!r}")
        for link in self.spheres:
            if link not in self.chain.links:
                raise ValueError(f"proxy spheres reference unknown link {link!r}")

    @property
    def dof(self) -> int:
        return self.chain.dof

    @cached_property
    def _sphere_table(self):
        li = self.chain.link_index
        idx, centers, radii = [], [], []
        for link, items in self.spheres.items():
            for x, y, z, r in items:
                idx.append(li[link])
                centers.append([x, y, z])
                radii.append(r)
        return np.array(idx, np.int64), np.array(centers, float), np.array(radii, float)

    @property
    def sphere_radii(self) -> np.ndarray:
        return self._sphere_table[2]

    @cached_property
    def _root_from_palm(self) -> np.ndarray:
        # root-link pose given the palm pose, assuming the palm link is the root
        if self.palm_link != self.chain.root:
            raise NotImplementedError("palm link must be the chain root")
        return self.palm_offset.inverse().matrix()

    def link_matrices(self, pose: RigidTransform, q) -> np.ndarray:
        base = pose.matrix() @ self._root_from_palm
        return link_matrices(self.chain, base, q, clamp=False)

    def sphere_centers(self, pose: RigidTransform, q, mats=None) -> np.ndarray:
        mats = self.link_matrices(pose, q) if mats is None else mats
        idx, c, _ = self._sphere_table
        T = mats[idx]
        return np.einsum("nij,nj->ni", T[:, :3, :3], c) + T[:, :3, 3]

    def world_palm_normal(self, pose: RigidTransform) -> np.ndarray:
        return pose.rotation @ self.palm_normal

    def anchor_table(self, strategy) -> tuple:
        strategy = GraspStrategy.parse(strategy)
        anchors = self.anchors[strategy]
        li = self.chain.link_index
        return (np.array([li[a.link] for a in anchors]),
                np.array([a.offset for a in anchors]),
                np.array([a.frame for a in anchors]))

    def anchor_points(self, pose, q, strategy, mats=None) -> np.ndarray:
        mats = self.link_matrices(pose, q) if mats is None else mats
        idx, off, _ = self.anchor_table(strategy)
        T = mats[idx]
        return np.einsum("nij,nj->ni", T[:, :3, :3], off) + T[:, :3, 3]

    def anchor_frames(self, pose, q, strategy, mats=None) -> np.ndarray:
        mats = self.link_matrices(pose, q) if mats is None else mats
        idx, _, fr = self.anchor_table(strategy)
        return np.einsum("nij,njk->nik", mats[idx][:, :3, :3], fr)


def contact_frames(hand: HandModel, pose, strategy, hand_index: int = 0) -> list:
    """World-frame contacts for every anchor of ``strategy``.

    ``pose`` is ``(RigidTransform, joint vector)``.
    """
    T, q = pose
    strategy = GraspStrategy.parse(strategy)
    if strategy not in hand.anchors:
        raise KeyError(f"hand has no anchors for strategy {strategy}")
    mats = hand.link_matrices(T, np.asarray(q, float))
    pts = hand.anchor_points(T, q, strategy, mats)
    frs = hand.anchor_frames(T, q, strategy, mats)
    return [Contact(p, R, hand_index, a.name)
            for p, R, a in zip(pts, frs, hand.anchors[strategy])]


def _transform(d) -> RigidTransform:
    d = d or {}
    return RigidTransform(rpy_matrix(*d.get("rpy", [0, 0, 0])), d.get("xyz", [0, 0, 0]))


def load_hand(meta_path) -> HandModel:
    """Load a hand from its JSON metadata; the URDF path is relative to it."""
    meta_path = Path(meta_path)
    meta = json.loads(meta_path.read_text())
    chain = load_urdf(meta_path.parent / meta["urdf"])
    anchors = {}
    for strat, items in meta["anchors"].items():
        lst = []
        for a in items:
            hint = np.asarray(a.get("hint", [1.0, 0.0, 0.0]), float)
            lst.append(Anchor(a["name"], a["link"], np.asarray(a["offset"], float),
                              frame_from_z(a["normal"], hint)))
        anchors[GraspStrategy.parse(strat)] = lst
    names = chain.joint_names
    q_open = {GraspStrategy.parse(k): np.asarray(v, float) for k, v in meta["q_open"].items()}
    for k, v in q_open.items():
        if len(v) != chain.dof:
            raise ValueError(f"q_open[{k}] has {len(v)} values, hand has {chain.dof} joints")
    squeeze = {}
    for k, joints in meta.get("squeeze_joints", {}).items():
        unknown = set(joints) - set(names)
        if unknown:
            raise ValueError(f"unknown squeeze joints {sorted(unknown)}")
        squeeze[GraspStrategy.parse(k)] = [names.index(j) for j in joints]
    normal = np.asarray(meta.get("palm_normal", [0, 0, 1]), float)
    return HandModel(
        chain=chain,
        palm_link=meta.get("palm_link", chain.root),
        palm_offset=_transform(meta.get("palm_offset")),
        palm_normal=normal / np.linalg.norm(normal),
        anchors=anchors,
        spheres={k: [tuple(s) for s in v] for k, v in meta["spheres"].items()},
        q_open=q_open,
        squeeze_joints=squeeze,
        span=float(meta.get("span", 0.12)),
        name=meta.get("name", meta_path.stem),
        meta=meta,
    )
