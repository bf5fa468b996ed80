"""Independent reference computations shared by several test modules.

Everything here is built on scipy.optimize.linprog and plain sampling,
never on the package's own closed forms.
"""
import numpy as np
from scipy.optimize import linprog

from graspforge.contact import Contact
from graspforge.geometry import sample_surface_arrays
from graspforge.kinematics import frame_from_z


def random_surface_contacts(mesh, seed, k_range=(3, 6)):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(k_range[0], k_range[1] + 1))
    pos, nrm = sample_surface_arrays(mesh, k, seed=1000 + seed)
    return [Contact(p, frame_from_z(-n, rng.normal(size=3))) for p, n in zip(pos, nrm)]


def pyramid_generators(contacts, mu, m, com, alpha):
    """Edge wrenches rebuilt from first principles, one column per edge.

    Each edge is scaled to unit normal component.
    """
    cols = []
    for c in contacts:
        d = c.position - com
        for k in range(m):
            th = 2 * np.pi * k / m
            f = c.frame @ np.array([mu * np.cos(th), mu * np.sin(th), 1.0])
            cols.append(np.concatenate([f, alpha * np.cross(d, f)]))
    return np.array(cols).T


def lp_support(P, u):
    """max u.(P beta) over beta >= 0 with sum(beta) = 1, by linprog."""
    n = P.shape[1]
    res = linprog(-(u @ P), A_eq=np.ones((1, n)), b_eq=[1.0], bounds=(0, None), method="highs")
    return -res.fun


def sampled_margin(P, n_dir=4096, seed=0, use_lp=True):
    rng = np.random.default_rng(seed)
    U = rng.normal(size=(n_dir, 6))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    if use_lp:
        return min(lp_support(P, u) for u in U)
    return float((U @ P).max(axis=1).min())


def origin_interior(P):
    """Largest s with 0 = P beta, sum beta = 1, beta >= s; interior iff s > 0 and rank 6."""
    n = P.shape[1]
    if np.linalg.matrix_rank(P) < 6:
        return False
    # variables (beta, s): maximize s
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_eq = np.hstack([np.vstack([P, np.ones((1, n))]), np.zeros((7, 1))])
    b_eq = np.r_[np.zeros(6), 1.0]
    A_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * n + [(None, None)], method="highs")
    return res.status == 0 and -res.fun > 1e-12


def closure_oracle(contacts, mu, m, com, alpha, eps, n_dir=4096, seed=0, use_lp=False):
    """(verdict, sampled margin) from dense direction sampling plus exact membership.

    Without ``use_lp`` each direction's LP is solved by enumerating its
    vertices (the simplex corners), which is exact and far faster.
    """
    P = pyramid_generators(contacts, mu, m, np.asarray(com, float), alpha)
    sm = sampled_margin(P, n_dir, seed, use_lp)
    return bool(sm >= eps and origin_interior(P)), sm
