"""URDF subset parsing, forward kinematics and point Jacobians."""
from __future__ import annotations

import logging
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .transforms import RigidTransform, rpy_matrix

log = logging.getLogger(__name__)

JOINT_TYPES = ("revolute", "prismatic", "fixed")
_KNOWN_LINK_TAGS = {"visual", "collision", "inertial"}


class URDFError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Joint:
    name: str
    type: str
    parent: str
    child: str
    origin: RigidTransform
    axis: np.ndarray
    lower: float = 0.0
    upper: float = 0.0

    @property
    def actuated(self) -> bool:
        return self.type != "fixed"


@dataclass(frozen=True, eq=False)
class KinematicModel:
    """Tree of links connected by revolute, prismatic or fixed joints.

    ``joints`` is stored in root-to-leaf order, so a single forward pass
    composes every link transform.
    """

    name: str
    links: tuple
    joints: tuple
    root: str
    parent_joint: dict = field(repr=False)

    @property
    def actuated_joints(self) -> list:
        return [j for j in self.joints if j.actuated]

    @property
    def joint_names(self) -> list:
        return [j.name for j in self.actuated_joints]

    @property
    def dof(self) -> int:
        return len(self.actuated_joints)

    @property
    def lower(self) -> np.ndarray:
        return np.array([j.lower for j in self.actuated_joints])

    @property
    def upper(self) -> np.ndarray:
        return np.array([j.upper for j in self.actuated_joints])

    def clamp(self, q) -> np.ndarray:
        return np.clip(np.asarray(q, float), self.lower, self.upper)

    def within_limits(self, q, tol=0.0) -> bool:
        q = np.asarray(q, float)
        return bool(np.all(q >= self.lower - tol) and np.all(q <= self.upper + tol))

    @property
    def depth(self) -> int:
        def d(link):
            n = 0
            while link in self.parent_joint:
                link = self.parent_joint[link].parent
                n += 1
            return n
        return max(d(l) for l in self.links)

    def chain(self, link: str) -> list:
        """Joints from the root down to ``link``."""
        out = []
        while link in self.parent_joint:
            j = self.parent_joint[link]
            out.append(j)
            link = j.parent
        return out[::-1]

    @cached_property
    def link_index(self) -> dict:
        return {l: i for i, l in enumerate(self.links)}

    @cached_property
    def _tables(self):
        # flat per-joint arrays for the forward pass
        act = {j.name: i for i, j in enumerate(self.actuated_joints)}
        li = self.link_index
        parent = np.array([li[j.parent] for j in self.joints], np.int64)
        child = np.array([li[j.child] for j in self.joints], np.int64)
        origin = np.stack([j.origin.matrix() for j in self.joints]) if self.joints else np.zeros((0, 4, 4))
        axis = np.array([j.axis for j in self.joints]).reshape(-1, 3)
        qidx = np.array([act.get(j.name, -1) for j in self.joints], np.int64)
        kind = np.array([JOINT_TYPES.index(j.type) for j in self.joints], np.int64)
        return parent, child, origin, axis, qidx, kind


def _floats(text, n, default):
    if text is None:
        return np.array(default, float)
    vals = [float(x) for x in text.split()]
    if len(vals) != n:
        raise URDFError(f"expected {n} numbers, got {text!r}")
    return np.array(vals)


def parse_urdf(text: str) -> KinematicModel:
    """Parse the link/joint/origin/axis/limit subset of URDF."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise URDFError(f"malformed XML: {exc}") from None
    if root.tag != "robot":
        raise URDFError("root element must be <robot>")
    links = []
    for el in root.findall("link"):
        links.append(el.get("name"))
        for child in el:
            if child.tag in _KNOWN_LINK_TAGS:
                log.debug("ignoring <%s> in link %s", child.tag, el.get("name"))
    for el in root:
        if el.tag not in ("link", "joint"):
            warnings.warn(f"ignoring unsupported URDF element <{el.tag}>", stacklevel=2)
    link_set = set(links)
    if len(link_set) != len(links):
        raise URDFError("duplicate link names")

    joints = {}
    for el in root.findall("joint"):
        name, jtype = el.get("name"), el.get("type")
        if jtype not in JOINT_TYPES:
            raise URDFError(f"joint {name!r}: unsupported type {jtype!r}")
        parent = el.find("parent").get("link") if el.find("parent") is not None else None
        child = el.find("child").get("link") if el.find("child") is not None else None
        for role, ln in (("parent", parent), ("child", child)):
            if ln not in link_set:
                raise URDFError(f"joint {name!r}: missing {role} link {ln!r}")
        o = el.find("origin")
        xyz = _floats(o.get("xyz") if o is not None else None, 3, [0, 0, 0])
        rpy = _floats(o.get("rpy") if o is not None else None, 3, [0, 0, 0])
        axis = _floats(el.find("axis").get("xyz") if el.find("axis") is not None else None,
                       3, [1, 0, 0])
        lo = hi = 0.0
        if jtype != "fixed":
            nrm = np.linalg.norm(axis)
            if nrm == 0:
                raise URDFError(f"joint {name!r}: zero axis")
            axis = axis / nrm
            lim = el.find("limit")
            if lim is None or lim.get("lower") is None or lim.get("upper") is None:
                raise URDFError(f"joint {name!r}: {jtype} joint requires <limit lower upper>")
            lo, hi = float(lim.get("lower")), float(lim.get("upper"))
            if lo > hi:
                raise URDFError(f"joint {name!r}: lower limit exceeds upper")
        if child in {j.child for j in joints.values()}:
            raise URDFError(f"link {child!r} has more than one parent joint")
        joints[name] = Joint(name, jtype, parent, child,
                             RigidTransform(rpy_matrix(*rpy), xyz), axis, lo, hi)

    parent_joint = {j.child: j for j in joints.values()}
    roots = [l for l in links if l not in parent_joint]
    if len(roots) != 1:
        # every link having a parent means the parent graph closes on itself
        raise URDFError("cycle detected" if not roots else f"multiple roots: {roots}")

    children = {}
    for j in joints.values():
        children.setdefault(j.parent, []).append(j)
    ordered, stack, seen = [], [roots[0]], {roots[0]}
    while stack:
        link = stack.pop()
        for j in reversed(children.get(link, [])):
            if j.child in seen:
                raise URDFError("cycle detected")
            seen.add(j.child)
            ordered.append(j)
            stack.append(j.child)
    if len(ordered) != len(joints):
        raise URDFError("cycle detected")
    # actuated order follows document order, not traversal order
    doc_order = {n: i for i, n in enumerate(joints)}
    ordered = _stable_topological(ordered, doc_order)
    return KinematicModel(root.get("name", "robot"), tuple(links), tuple(ordered),
                          roots[0], parent_joint)


def _stable_topological(joints, doc_order):
    placed, out = set(), []
    pending = sorted(joints, key=lambda j: doc_order[j.name])
    child_of = {j.child for j in joints}
    while pending:
        for j in pending:
            if j.parent not in child_of or j.parent in placed:
                out.append(j)
                placed.add(j.child)
                pending.remove(j)
                break
    return out


def load_urdf(path) -> KinematicModel:
    return parse_urdf(Path(path).read_text())
