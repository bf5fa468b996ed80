import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _oracles import random_surface_contacts
from graspforge.contact import Contact, FrictionCone, cone_contains, grasp_map, wrench_matrix
from graspforge.force_qp import (
    default_targets,
    solve_contact_forces,
    wrench_tracking_error,
)
from graspforge.geometry import icosphere
from graspforge.kinematics import frame_from_z
from graspforge.nnls import nnls

CONE = FrictionCone(0.6, 8)
MESH = icosphere(0.04, 2)


def random_instance(seed):
    rng = np.random.default_rng(seed)
    cs = random_surface_contacts(MESH, seed, k_range=(1, 6))
    maps = [grasp_map(c, np.zeros(3), 25.0) for c in cs]
    target = rng.normal(size=6) * rng.choice([0.1, 1.0, 5.0])
    return maps, target, rng


def kkt_residuals(A, b, x):
    g = A.T @ (A @ x - b)
    pos = x > 0
    stationarity = np.abs(g[pos]).max(initial=0.0)
    dual = max(0.0, -g[~pos].min(initial=0.0))
    return stationarity, dual


@pytest.mark.parametrize("seed", range(25))
def test_kkt_and_dominance(seed):
    maps, target, rng = random_instance(seed)
    sol = solve_contact_forces(maps, CONE, target)
    A = wrench_matrix(maps, CONE)
    x = sol.beta.ravel()
    assert (x >= 0).all()
    st_res, dual = kkt_residuals(A, target, x)
    assert st_res <= 1e-8 and dual <= 1e-8
    obj = sol.residual_norm ** 2
    scale = max(x.max(), 1.0)
    trials = rng.exponential(scale, size=(1000, A.shape[1])) * (rng.random((1000, A.shape[1])) < 0.5)
    others = np.linalg.norm(trials @ A.T - target, axis=1) ** 2
    assert obj <= others.min() + 1e-10


def test_forces_inside_cone_and_recomputed():
    maps, target, _ = random_instance(3)
    sol = solve_contact_forces(maps, CONE, target)
    for f in sol.forces:
        assert cone_contains(f, CONE)
    achieved = sum(G @ f for G, f in zip(maps, sol.forces))
    assert np.allclose(sol.residual.vector, target - achieved, atol=1e-14)
    assert sol.residual_norm == pytest.approx(np.linalg.norm(target - achieved), abs=1e-14)


def test_pure_force_at_com():
    lam = 2.5
    G = grasp_map(Contact(np.zeros(3), np.eye(3)), np.zeros(3), 1.0)
    sol = solve_contact_forces([G], CONE, [0, 0, 1, 0, 0, 0], scale=lam)
    assert sol.residual_norm <= 1e-8
    assert np.allclose(sol.forces[0], [0, 0, lam], atol=1e-8)


def test_zero_target():
    maps, _, _ = random_instance(4)
    sol = solve_contact_forces(maps, CONE, np.zeros(6))
    assert np.array_equal(sol.beta, np.zeros_like(sol.beta))
    assert sol.residual_norm == 0.0


def test_tensile_target():
    G = grasp_map(Contact(np.zeros(3), np.eye(3)), np.zeros(3), 1.0)
    sol = solve_contact_forces([G], CONE, [0, 0, -1, 0, 0, 0])
    assert np.array_equal(sol.beta, np.zeros_like(sol.beta))
    assert sol.residual_norm == pytest.approx(1.0, abs=1e-15)
    # dense sampling of the cone image never gets closer than the origin does
    rng = np.random.default_rng(0)
    A = wrench_matrix([G], CONE)
    betas = rng.exponential(1.0, size=(20000, A.shape[1])) * rng.uniform(0, 2, (20000, 1))
    d = np.linalg.norm(betas @ A.T - np.array([0, 0, -1, 0, 0, 0]), axis=1)
    assert d.min() >= 1.0 - 1e-12


def test_deterministic():
    maps, target, _ = random_instance(9)
    a = solve_contact_forces(maps, CONE, target)
    b = solve_contact_forces(maps, CONE, target)
    assert np.array_equal(a.beta, b.beta)


@pytest.mark.parametrize("seed", range(10))
def test_adding_contact_never_hurts(seed):
    maps, target, _ = random_instance(seed)
    extra = grasp_map(random_surface_contacts(MESH, seed + 500, (1, 1))[0], np.zeros(3), 25.0)
    a = solve_contact_forces(maps, CONE, target).residual_norm
    b = solve_contact_forces(maps + [extra], CONE, target).residual_norm
    assert b <= a + 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_interior_targets_exact(seed):
    maps, _, rng = random_instance(seed % 5000)
    A = wrench_matrix(maps, CONE)
    target = A @ rng.uniform(0.1, 2.0, A.shape[1])
    assert solve_contact_forces(maps, CONE, target).residual_norm <= 1e-8


def test_tracking_error_definition():
    maps, _, rng = random_instance(12)
    A = wrench_matrix(maps, CONE)
    reachable = [A @ rng.uniform(0.1, 1.0, A.shape[1]) for _ in range(3)]
    assert wrench_tracking_error(maps, CONE, reachable) <= 1e-12
    assert wrench_tracking_error(maps, CONE, reachable, scale=2.0) <= 1e-12
    bad = rng.normal(size=6)
    r = solve_contact_forces(maps, CONE, bad).residual_norm
    assert wrench_tracking_error(maps, CONE, [bad]) == pytest.approx(r ** 2, rel=1e-12)
    with pytest.raises(ValueError):
        wrench_tracking_error(maps, CONE, [])


def test_default_targets():
    t = default_targets(0.1)
    assert t.shape == (7, 6)
    assert np.allclose(t[0], [0, 0, 0.981, 0, 0, 0])
    assert np.allclose(np.abs(t[1:]).sum(axis=1), 1.0)
    assert np.allclose(t[1:].sum(axis=0), 0.0)


def test_nnls_matches_scipy_reference():
    from scipy.optimize import nnls as reference

    rng = np.random.default_rng(2)
    for _ in range(50):
        A = rng.normal(size=(6, int(rng.integers(2, 40))))
        b = rng.normal(size=6)
        x, r = nnls(A, b)
        xr, rr = reference(A, b)
        assert r == pytest.approx(rr, abs=1e-10)


def test_nnls_empty_columns():
    x, r = nnls(np.zeros((6, 0)), np.ones(6))
    assert x.shape == (0,) and r == pytest.approx(np.sqrt(6))


def test_antipodal_grip_carries_weight():
    cs = [Contact([0.04, 0, 0], frame_from_z([-1, 0, 0])),
          Contact([-0.04, 0, 0], frame_from_z([1, 0, 0]))]
    maps = [grasp_map(c, np.zeros(3), 25.0) for c in cs]
    sol = solve_contact_forces(maps, CONE, default_targets(0.1)[0])
    assert sol.residual_norm <= 1e-8
