"""Lower-level contact-force problem: nonnegative least squares over cone edges."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contact import FrictionCone, Wrench, cone_edges, wrench_matrix
from .nnls import nnls

GRAVITY = 9.81


@dataclass(frozen=True, eq=False)
class ForceSolution:
    """Edge coefficients and the forces and residual they imply.

    ``forces`` and ``residual`` are recomputed from ``beta`` on construction.
    """

    beta: np.ndarray          # (k, m)
    edges: np.ndarray         # (m, 3)
    maps: tuple               # k grasp maps (6, 3)
    target: np.ndarray        # scaled target wrench (6,)
    forces: np.ndarray = field(init=False)
    residual: Wrench = field(init=False)
    residual_norm: float = field(init=False)

    def __post_init__(self):
        beta = np.asarray(self.beta, float)
        forces = beta @ self.edges
        achieved = sum((G @ f for G, f in zip(self.maps, forces)), np.zeros(6))
        r = np.asarray(self.target, float) - achieved
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "forces", forces)
        object.__setattr__(self, "residual", Wrench.from_vector(r))
        object.__setattr__(self, "residual_norm", float(np.linalg.norm(r)))


def _as_vector(w) -> np.ndarray:
    return w.vector if isinstance(w, Wrench) else np.asarray(w, float).reshape(6)


def solve_contact_forces(maps, cone: FrictionCone, target, scale: float = 1.0) -> ForceSolution:
    """Cone-feasible contact forces minimizing ``||scale * target - sum G_i f_i||``."""
    maps = tuple(np.asarray(G, float) for G in maps)
    if not maps:
        raise ValueError("need at least one grasp map")
    edges = cone_edges(cone)
    A = wrench_matrix(maps, cone)
    b = scale * _as_vector(target)
    beta, _ = nnls(A, b)
    return ForceSolution(beta.reshape(len(maps), len(edges)), edges, maps, b)


def residual_norms(A: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Residual norm of the NNLS fit of each row of ``targets`` by ``A``."""
    return np.array([nnls(A, t)[1] for t in targets])


def wrench_tracking_error(maps, cone: FrictionCone, targets, scale: float = 1.0) -> float:
    """Sum over targets of squared NNLS residual norms."""
    targets = np.atleast_2d([_as_vector(t) for t in targets])
    if len(targets) == 0:
        raise ValueError("target wrench set is empty")
    A = wrench_matrix([np.asarray(G, float) for G in maps], cone)
    return float(np.sum(residual_norms(A, scale * targets) ** 2))


def default_targets(mass: float, disturbance: float = 1.0, g: float = GRAVITY) -> np.ndarray:
    """Gravity support plus +-``disturbance`` pure forces along each axis, (7, 6)."""
    t = [np.array([0, 0, mass * g, 0, 0, 0], float)]
    for axis in range(3):
        for sign in (1.0, -1.0):
            w = np.zeros(6)
            w[axis] = sign * disturbance
            t.append(w)
    return np.array(t)
