"""The grasp objective: wrench tracking plus distance and penetration penalties."""
from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from ..contact import Contact, FrictionCone, cone_edges
from ..force_qp import default_targets
from ..geometry import TriMesh, center_of_mass, convex_hull, signed_distance
from ..nnls import nnls_residuals
from ..strategy import GraspStrategy
from .pose import BimanualGraspPose


@dataclass(frozen=True)
class EnergyWeights:
    kappa_w: float = 1.0
    kappa_con: float = 100.0
    kappa_coll: float = 500.0
    kappa_hh: float = 500.0
    wrench_scale: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be strictly positive")


@dataclass(frozen=True)
class EnergyBreakdown:
    wrench: float
    contact: float
    collision: float
    hand_hand: float
    total: float

    @classmethod
    def combine(cls, weights: EnergyWeights, wrench, contact, collision, hand_hand):
        total = (weights.kappa_w * wrench + weights.kappa_con * contact
                 + weights.kappa_coll * collision + weights.kappa_hh * hand_hand)
        return cls(float(wrench), float(contact), float(collision), float(hand_hand), float(total))

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True, eq=False)
class GraspContext:
    """Everything the objective needs besides the pose.

    ``targets`` are unscaled (J, 6) wrenches in world axes; torque rows are
    in the same normalized units as the grasp maps (scaled by ``alpha``).
    ``table_height`` adds the half-space z >= height to the collision term.
    """

    mesh: TriMesh
    hands: tuple
    strategy: GraspStrategy
    com: np.ndarray
    alpha: float
    cone: FrictionCone = FrictionCone()
    targets: np.ndarray = None
    weights: EnergyWeights = EnergyWeights()
    table_height: float = None
    mass: float = 0.1
    hull: TriMesh = field(default=None, repr=False)

    def __post_init__(self):
        hands = tuple(self.hands) if isinstance(self.hands, (list, tuple)) else (self.hands,) * 2
        object.__setattr__(self, "hands", hands)
        object.__setattr__(self, "strategy", GraspStrategy.parse(self.strategy))
        object.__setattr__(self, "com", np.asarray(self.com, float).reshape(3))
        if self.targets is None:
            object.__setattr__(self, "targets", default_targets(self.mass))
        object.__setattr__(self, "targets", np.atleast_2d(np.asarray(self.targets, float)))
        if self.hull is None:
            object.__setattr__(self, "hull", convex_hull(self.mesh))

    @classmethod
    def build(cls, mesh: TriMesh, hand, strategy, mass: float = 0.1, mu: float = 0.6,
              edge_count: int = 8, weights: EnergyWeights = None, table_height=None,
              targets=None, disturbance: float = 1.0) -> "GraspContext":
        """Context with the mesh's volume centroid as com and alpha = 1 / bounding radius."""
        com = center_of_mass(mesh)
        alpha = 1.0 / mesh.bounding_radius(com)
        if targets is None:
            targets = default_targets(mass, disturbance)
        return cls(mesh, hand, strategy, com, alpha, FrictionCone(mu, edge_count), targets,
                   weights or EnergyWeights(), table_height, mass)


@dataclass(frozen=True, eq=False)
class PoseEvaluation:
    """Per-pose quantities shared by the energy terms and the filters."""

    contact_points: np.ndarray          # (C, 3) active contacts, hand 0 first
    contact_frames: np.ndarray          # (C, 3, 3)
    contact_hands: np.ndarray           # (C,)
    contact_names: tuple
    contact_distance: np.ndarray        # SDF at each active contact
    sphere_centers: tuple               # per hand (S, 3), empty for inactive hands
    sphere_radii: tuple
    sphere_sdf: np.ndarray              # SDF at every active proxy centre
    energy: EnergyBreakdown

    @property
    def contacts(self) -> list:
        return [Contact(p, R, int(h), n) for p, R, h, n in
                zip(self.contact_points, self.contact_frames, self.contact_hands, self.contact_names)]


def _kinematics(pose: BimanualGraspPose, ctx: GraspContext):
    pts, frs, ids, names, centers, radii = [], [], [], [], [], []
    for h in (0, 1):
        hand = ctx.hands[h]
        if not pose.active[h]:
            centers.append(np.zeros((0, 3)))
            radii.append(np.zeros(0))
            continue
        T, q = pose.hand_pose(h)
        mats = hand.link_matrices(T, q)
        pts.append(hand.anchor_points(T, q, pose.strategy, mats))
        frs.append(hand.anchor_frames(T, q, pose.strategy, mats))
        ids += [h] * len(pts[-1])
        names += [a.name for a in hand.anchors[pose.strategy]]
        centers.append(hand.sphere_centers(T, q, mats))
        radii.append(hand.sphere_radii)
    return (np.vstack(pts), np.concatenate(frs), np.array(ids), tuple(names),
            tuple(centers), tuple(radii))


def generator_matrix(points, frames, ctx: GraspContext) -> np.ndarray:
    """(6, C*m) wrenches of every pyramid edge of every contact."""
    E = cone_edges(ctx.cone)
    f = np.einsum("cij,mj->cmi", frames, E)
    tau = ctx.alpha * np.cross((points - ctx.com)[:, None, :], f)
    return np.concatenate([f, tau], axis=2).reshape(-1, 6).T


def wrench_residuals(points, frames, ctx: GraspContext) -> np.ndarray:
    """NNLS residual norm of every scaled target wrench."""
    A = generator_matrix(np.asarray(points, float), np.asarray(frames, float), ctx)
    return nnls_residuals(A, ctx.weights.wrench_scale * ctx.targets)


def table_clearance(points, ctx: GraspContext) -> np.ndarray:
    if ctx.table_height is None:
        return np.full(len(points), np.inf)
    return np.asarray(points)[:, 2] - ctx.table_height


def _hinge2(x) -> float:
    return float(np.sum(np.maximum(0.0, x) ** 2))


def hand_hand_penetration(centers, radii) -> float:
    """Squared-hinge overlap summed over sphere pairs from the two hands."""
    if len(centers[0]) == 0 or len(centers[1]) == 0:
        return 0.0
    d = np.linalg.norm(centers[0][:, None, :] - centers[1][None, :, :], axis=-1)
    return _hinge2(radii[0][:, None] + radii[1][None, :] - d)


def evaluate(pose: BimanualGraspPose, ctx: GraspContext) -> PoseEvaluation:
    pts, frs, ids, names, centers, radii = _kinematics(pose, ctx)
    all_c = np.vstack(centers)
    all_r = np.concatenate(radii)
    sdf = signed_distance(ctx.mesh, np.vstack([pts, all_c]))
    d_contact, d_sphere = sdf[:len(pts)], sdf[len(pts):]
    e_contact = float(np.sum(d_contact ** 2))
    e_coll = _hinge2(all_r - d_sphere) + _hinge2(all_r - table_clearance(all_c, ctx))
    e_hh = hand_hand_penetration(centers, radii) if pose.strategy.bimanual else 0.0
    e_w = float(np.sum(wrench_residuals(pts, frs, ctx) ** 2))
    energy = EnergyBreakdown.combine(ctx.weights, e_w, e_contact, e_coll, e_hh)
    return PoseEvaluation(pts, frs, ids, names, d_contact, centers, radii, d_sphere, energy)


def total_energy(pose: BimanualGraspPose, ctx: GraspContext) -> EnergyBreakdown:
    return evaluate(pose, ctx).energy


def energy_contact(pose, ctx: GraspContext) -> float:
    """Sum of squared signed distances from active contacts to the object."""
    pts = _kinematics(pose, ctx)[0]
    return float(np.sum(signed_distance(ctx.mesh, pts) ** 2))


def energy_collision(pose, ctx: GraspContext) -> float:
    """Squared penetration of hand proxy spheres into the object and the table."""
    centers, radii = _kinematics(pose, ctx)[4:]
    c, r = np.vstack(centers), np.concatenate(radii)
    return _hinge2(r - signed_distance(ctx.mesh, c)) + _hinge2(r - table_clearance(c, ctx))


def energy_hand_hand(pose, ctx: GraspContext) -> float:
    if not pose.strategy.bimanual:
        return 0.0
    centers, radii = _kinematics(pose, ctx)[4:]
    return hand_hand_penetration(centers, radii)


def energy_wrench(pose, ctx: GraspContext) -> float:
    pts, frs = _kinematics(pose, ctx)[:2]
    return float(np.sum(wrench_residuals(pts, frs, ctx) ** 2))
