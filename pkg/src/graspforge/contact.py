"""Hard-finger contact model: friction cones, grasp maps and force closure."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.stats import norm
from scipy.stats.qmc import Halton

from .nnls import nnls

CONE_SLACK = 1e-12


@dataclass(frozen=True)
class FrictionCone:
    mu: float = 0.6
    edge_count: int = 8

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("friction coefficient must be positive")
        if self.edge_count < 3:
            raise ValueError("pyramid needs at least 3 edges")


@dataclass(frozen=True, eq=False)
class Contact:
    """Point contact; ``frame`` maps local to world, local z presses into the object."""

    position: np.ndarray
    frame: np.ndarray
    hand: int = 0
    anchor_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, float).reshape(3))
        R = np.asarray(self.frame, float).reshape(3, 3)
        if np.abs(R.T @ R - np.eye(3)).max() > 1e-8:
            raise ValueError("contact frame must be orthonormal")
        object.__setattr__(self, "frame", R)

    @property
    def normal(self) -> np.ndarray:
        return self.frame[:, 2]


@dataclass(frozen=True, eq=False)
class Wrench:
    force: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "force", np.asarray(self.force, float).reshape(3))
        object.__setattr__(self, "torque", np.asarray(self.torque, float).reshape(3))

    @classmethod
    def from_vector(cls, w) -> "Wrench":
        w = np.asarray(w, float)
        return cls(w[:3], w[3:])

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.force, self.torque])

    def __array__(self, dtype=None, copy=None):
        v = self.vector
        return v if dtype is None else v.astype(dtype)


def cone_contains(f, cone: FrictionCone) -> bool:
    f = np.asarray(f, float)
    return bool(f[2] >= -CONE_SLACK
                and np.hypot(f[0], f[1]) <= cone.mu * abs(f[2]) + CONE_SLACK)


def cone_edges(cone: FrictionCone) -> np.ndarray:
    """(m, 3) unit generators of the inscribed friction pyramid."""
    th = 2 * np.pi * np.arange(cone.edge_count) / cone.edge_count
    e = np.column_stack([cone.mu * np.cos(th), cone.mu * np.sin(th), np.ones_like(th)])
    return e / np.linalg.norm(e, axis=1, keepdims=True)


def grasp_map(contact: Contact, com, alpha: float = 1.0) -> np.ndarray:
    """6x3 map from a local contact force to the object wrench about ``com``.

    Torque rows are scaled by ``alpha`` so force and torque share units.
    """
    d = contact.position - np.asarray(com, float)
    cross = np.array([[0.0, -d[2], d[1]], [d[2], 0.0, -d[0]], [-d[1], d[0], 0.0]])
    return np.vstack([np.eye(3), alpha * cross]) @ contact.frame


def contact_wrench(G: np.ndarray, f) -> Wrench:
    return Wrench.from_vector(np.asarray(G) @ np.asarray(f, float))


def wrench_matrix(maps, cone: FrictionCone) -> np.ndarray:
    """Stack per-contact edge wrenches into a (6, k*m) generator matrix."""
    E = cone_edges(cone).T
    return np.hstack([G @ E for G in maps]) if len(maps) else np.zeros((6, 0))


def direction_design(n: int = 128, seed: int = 0) -> np.ndarray:
    """Deterministic unit directions on the 5-sphere.

    The 12 signed coordinate axes come first; the rest is an unscrambled
    Halton sequence pushed through the normal quantile and normalized.
    """
    axes = np.vstack([np.eye(6), -np.eye(6)])
    if n <= 12:
        return axes[:n]
    u = Halton(d=6, scramble=False).random(n - 12 + 1 + seed)[1 + seed:]
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return np.vstack([axes, g / np.linalg.norm(g, axis=1, keepdims=True)])


@dataclass(frozen=True)
class ClosureConfig:
    """``exact`` adds the hull-based minimum over all directions to the design."""

    epsilon: float = 1e-3
    n_directions: int = 128
    exact: bool = True


@dataclass(frozen=True)
class ClosureResult:
    closed: bool
    margin: float


def support_values(W: np.ndarray, normal_weight: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Maximum of u.w over unit-normal-sum edge combinations, per direction.

    With a single equality constraint and nonnegative coefficients the LP
    optimum sits on one generator, so this is max_k u.w_k / n_k.
    """
    return (directions @ (W / normal_weight)).max(axis=1)


def min_norm_distance(points: np.ndarray) -> float:
    """Distance from the origin to the convex hull of the rows of ``points``."""
    P = np.asarray(points, float)
    scale = max(np.abs(P).max(), 1e-12)
    weight = 1e4 * scale
    # the simplex constraint sum(beta) = 1 enters as a heavily weighted row
    A = np.vstack([P.T, np.full(len(P), weight)])
    b = np.zeros(A.shape[0])
    b[-1] = weight
    beta, _ = nnls(A, b)
    beta /= beta.sum()
    return float(np.linalg.norm(P.T @ beta))


def exact_margin(points: np.ndarray) -> float:
    """min over unit u of max_k u.p_k, for points p_k in R^6.

    Positive: distance from the origin to the nearest hull facet. Otherwise
    minus the distance from the origin to the hull (zero when the origin
    lies on the boundary or the points span less than six dimensions).
    """
    P = np.asarray(points, float)
    if np.linalg.matrix_rank(P, tol=1e-10 * max(np.abs(P).max(), 1e-300)) == P.shape[1]:
        try:
            hull = ConvexHull(P)
            depth = -hull.equations[:, -1]
            if depth.min() > 0:
                return float(depth.min())
        except QhullError:
            pass
    return -min_norm_distance(P)


def force_closure(contacts, cone: FrictionCone, com, alpha: float = 1.0,
                  config: ClosureConfig = None) -> ClosureResult:
    """Force-closure verdict and margin for hard-finger contacts.

    The margin is the smallest, over test directions u, of the largest u.w
    achievable with pyramid forces whose normal components sum to one.
    Directions come from a fixed design; with ``config.exact`` the minimum
    over the whole sphere is taken as well, which catches thin escape cones
    a finite design misses.
    """
    cfg = config or ClosureConfig()
    if not contacts:
        return ClosureResult(False, -np.inf)
    maps = [grasp_map(c, com, alpha) for c in contacts]
    W = wrench_matrix(maps, cone)
    # normal component of every pyramid edge is the same
    nz = cone_edges(cone)[0, 2]
    P = W / nz
    vals = support_values(W, np.full(W.shape[1], nz), direction_design(cfg.n_directions))
    margin = float(vals.min())
    if cfg.exact:
        margin = min(margin, exact_margin(P.T))
    return ClosureResult(bool(margin >= cfg.epsilon), margin)


def bounding_alpha(radius: float) -> float:
    """Torque scale 1/radius that makes force and torque rows comparable."""
    return 1.0 / radius
