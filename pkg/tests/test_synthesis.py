import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from graspforge.geometry import centered_box, convex_hull, signed_distance, signed_distance_bruteforce
from graspforge.kinematics import frame_from_z
from graspforge.strategy import GraspStrategy
from graspforge.synthesis import (
    STANDOFF_BIMANUAL,
    STANDOFF_UNIMANUAL,
    BimanualGraspPose,
    CandidateBatch,
    EnergyBreakdown,
    EnergyWeights,
    GraspContext,
    OptimizerConfig,
    energy_collision,
    energy_contact,
    energy_hand_hand,
    init_grasp,
    optimize_grasp,
    synthesize_batch,
    total_energy,
)
from graspforge.synthesis.energy import hand_hand_penetration
from graspforge.synthesis.optimize import _Chart


@pytest.fixture(scope="module")
def ctx(hand, coarse_sphere):
    return GraspContext.build(coarse_sphere, hand, "WholeHand")


def _palm_normal(hand, pose, h=0):
    return hand.world_palm_normal(pose.wrist(h))


# strategy

def test_strategy_hand_masks():
    assert GraspStrategy.BIMANUAL.active_hands == (True, True)
    for s in ("Pinch2", "Tripod3", "WholeHand"):
        assert sum(GraspStrategy.parse(s).active_hands) == 1
    with pytest.raises(ValueError):
        GraspStrategy.parse("Fist")


# initialization

def test_init_unimanual_standoff(hand, coarse_sphere):
    pose = init_grasp(coarse_sphere, hand, "WholeHand", seed=7)
    n = _palm_normal(hand, pose)
    t = pose.translations[0]
    sample = t + STANDOFF_UNIMANUAL * n
    hull = convex_hull(coarse_sphere)
    # the implied sample lies on the hull and the palm faces it
    assert abs(signed_distance(hull, sample[None])[0]) < 1e-9
    assert np.dot(n, sample - t) > 0
    assert np.linalg.norm(sample - t) == pytest.approx(STANDOFF_UNIMANUAL, abs=1e-9)
    # the palm points into the object: stepping along it goes inside the hull
    assert signed_distance(hull, (sample + 1e-4 * n)[None])[0] < 0


def test_init_bimanual_opposite_sides(hand):
    mesh = centered_box((0.6, 0.55, 0.52))
    hull = convex_hull(mesh)
    for seed in range(5):
        pose = init_grasp(mesh, hand, "Bimanual", seed=seed)
        samples = [pose.translations[h] + STANDOFF_BIMANUAL * _palm_normal(hand, pose, h)
                   for h in (0, 1)]
        for s in samples:
            assert abs(signed_distance(hull, s[None])[0]) < 1e-9
        assert np.dot(samples[0], samples[1]) < 0
        assert samples[0][1] <= samples[1][1]


def test_init_deterministic_and_valid(hand, coarse_sphere):
    for s in ("Pinch2", "Tripod3", "WholeHand", "Bimanual"):
        a = init_grasp(coarse_sphere, hand, s, seed=3)
        b = init_grasp(coarse_sphere, hand, s, seed=3)
        assert a.to_dict() == b.to_dict()
        assert a.is_valid((hand, hand))
        for h in a.active_indices:
            np.testing.assert_array_equal(a.joints[h], hand.q_open[a.strategy])
    c = init_grasp(coarse_sphere, hand, "WholeHand", seed=4)
    assert c.to_dict() != init_grasp(coarse_sphere, hand, "WholeHand", seed=3).to_dict()


def test_init_respects_table(hand, coarse_sphere):
    mesh = coarse_sphere.transformed(None, [0, 0, 0.04])
    for seed in range(10):
        pose = init_grasp(mesh, hand, "WholeHand", seed=seed, table_height=0.0)
        c = hand.sphere_centers(pose.wrist(0), pose.joints[0])
        assert np.all(c[:, 2] - hand.sphere_radii >= 0.0)


def test_pose_round_trip(hand, coarse_sphere):
    pose = init_grasp(coarse_sphere, hand, "Bimanual", seed=1)
    back = BimanualGraspPose.from_dict(pose.to_dict())
    assert back.to_dict() == pose.to_dict()
    np.testing.assert_array_equal(back.rotations, pose.rotations)


# energies

def _plane_box(p_on, normal, size=1.0):
    """Large cube whose +z face lies in the plane through ``p_on`` with outward ``normal``."""
    R = frame_from_z(normal)
    return centered_box((size, size, size)).transformed(
        R, np.asarray(p_on) - R @ np.array([0, 0, size / 2]))


@pytest.mark.parametrize("offset,expected", [(0.0, 0.0), (0.01, 1e-4)])
def test_energy_contact_examples(hand, coarse_sphere, offset, expected):
    pose = init_grasp(coarse_sphere, hand, "Pinch2", seed=2)
    p1, p2 = hand.anchor_points(pose.wrist(0), pose.joints[0], pose.strategy)
    gap = p2 - p1
    u = gap / np.linalg.norm(gap)
    v = np.cross(u, [0.3, -0.2, 0.9])
    v /= np.linalg.norm(v)
    a = offset / np.linalg.norm(gap)
    n = a * u + np.sqrt(1 - a * a) * v
    mesh = _plane_box(p1, n)
    ctx = GraspContext.build(mesh, hand, "Pinch2")
    assert energy_contact(pose, ctx) == pytest.approx(expected, abs=1e-14)


def test_energy_collision_matches_bruteforce(hand, coarse_sphere, ctx):
    pose = init_grasp(coarse_sphere, hand, "WholeHand", seed=5)
    n = _palm_normal(hand, pose)
    pose = pose.replace(0, translation=pose.translations[0] + 0.03 * n)
    c = hand.sphere_centers(pose.wrist(0), pose.joints[0])
    d = signed_distance_bruteforce(coarse_sphere, c)
    expected = float(np.sum(np.maximum(0.0, hand.sphere_radii - d) ** 2))
    assert expected > 0
    assert energy_collision(pose, ctx) == pytest.approx(expected, rel=1e-10)


def test_energy_collision_zero_far_away(hand, coarse_sphere, ctx):
    pose = init_grasp(coarse_sphere, hand, "WholeHand", seed=5)
    n = _palm_normal(hand, pose)
    far = pose.replace(0, translation=pose.translations[0] - 0.5 * n)
    assert energy_collision(far, ctx) == 0.0


def test_energy_collision_monotone_retreat(hand, coarse_sphere, ctx):
    for seed in range(4):
        pose = init_grasp(coarse_sphere, hand, "WholeHand", seed=seed)
        n = _palm_normal(hand, pose)
        vals = [energy_collision(pose.replace(0, translation=pose.translations[0] - s * n), ctx)
                for s in np.linspace(-0.04, 0.05, 31)]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


def test_hand_hand_examples(hand, coarse_sphere):
    c0 = np.array([[0.0, 0.0, 0.0]])
    c1 = np.array([[0.015, 0.0, 0.0]])
    r = np.array([0.01])
    assert hand_hand_penetration((c0, c1), (r, r)) == pytest.approx(0.005 ** 2, abs=1e-18)
    assert hand_hand_penetration((c1, c0), (r, r)) == hand_hand_penetration((c0, c1), (r, r))
    ctx = GraspContext.build(coarse_sphere, hand, "Bimanual")
    pose = init_grasp(coarse_sphere, hand, "Bimanual", seed=0)
    apart = pose.replace(1, translation=pose.translations[0] + [0.0, 0.6, 0.0])
    assert energy_hand_hand(apart, ctx) == 0.0
    swapped = BimanualGraspPose(pose.translations[::-1], pose.rotations[::-1],
                                pose.joints[::-1], pose.strategy)
    assert energy_hand_hand(swapped, ctx) == pytest.approx(energy_hand_hand(pose, ctx), abs=1e-18)
    uni = init_grasp(coarse_sphere, hand, "WholeHand", seed=0)
    assert energy_hand_hand(uni, GraspContext.build(coarse_sphere, hand, "WholeHand")) == 0.0


def test_breakdown_total_and_linearity(hand, coarse_sphere):
    pose = init_grasp(coarse_sphere, hand, "WholeHand", seed=5)
    pose = pose.replace(0, translation=pose.translations[0] + 0.03 * _palm_normal(hand, pose))
    w1 = EnergyWeights()
    w2 = EnergyWeights(kappa_coll=2 * w1.kappa_coll)
    e1 = total_energy(pose, GraspContext.build(coarse_sphere, hand, "WholeHand", weights=w1))
    e2 = total_energy(pose, GraspContext.build(coarse_sphere, hand, "WholeHand", weights=w2))
    for e in (e1, e2):
        assert min(e.wrench, e.contact, e.collision, e.hand_hand) >= 0
    expected = (w1.kappa_w * e1.wrench + w1.kappa_con * e1.contact
                + w1.kappa_coll * e1.collision + w1.kappa_hh * e1.hand_hand)
    assert e1.total == pytest.approx(expected, abs=1e-12)
    assert e2.total - e1.total == pytest.approx(w1.kappa_coll * e1.collision, rel=1e-12)


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        EnergyWeights(kappa_hh=0.0)
    with pytest.raises(ValueError):
        EnergyWeights(wrench_scale=-1.0)


def test_rigid_invariance(hand, coarse_sphere):
    ctx = GraspContext.build(coarse_sphere, hand, "Bimanual")
    rot = Rotation.from_rotvec([0.4, -1.1, 0.7]).as_matrix()
    shift = np.array([0.3, -0.2, 0.5])
    mesh2 = coarse_sphere.transformed(rot, shift)
    # the target wrenches are object-frame loads, so they move with the object
    targets2 = np.hstack([ctx.targets[:, :3] @ rot.T, ctx.targets[:, 3:] @ rot.T])
    ctx2 = GraspContext(mesh2, hand, "Bimanual", rot @ ctx.com + shift, ctx.alpha, ctx.cone,
                        targets2)
    for seed in range(3):
        pose = init_grasp(coarse_sphere, hand, "Bimanual", seed=seed)
        pose = pose.replace(0, translation=pose.translations[0] + 0.025 * _palm_normal(hand, pose))
        moved = BimanualGraspPose(pose.translations @ rot.T + shift, rot @ pose.rotations,
                                  pose.joints, pose.strategy)
        e1, e2 = total_energy(pose, ctx), total_energy(moved, ctx2)
        assert e2.total == pytest.approx(e1.total, abs=1e-6)


# optimizer

def test_fd_gradient_step_consistency(hand, coarse_sphere, ctx):
    cfg = OptimizerConfig()
    for seed in range(3):
        pose = init_grasp(coarse_sphere, hand, "WholeHand", seed=seed)
        chart = _Chart(pose, ctx, cfg)
        g1, g2 = chart.gradient(1.0), chart.gradient(0.5)
        assert np.linalg.norm(g1 - g2) <= 1e-3 * np.linalg.norm(g2)


@pytest.fixture(scope="module")
def pinch_run(hand, coarse_sphere):
    ctx = GraspContext.build(coarse_sphere, hand, "Pinch2")
    cfg = OptimizerConfig(min_step=2e-2)
    pose0 = init_grasp(coarse_sphere, hand, "Pinch2", seed=3)
    return ctx, cfg, pose0, optimize_grasp(pose0, ctx, cfg)


def test_optimizer_history_and_invariants(hand, pinch_run):
    ctx, cfg, pose0, res = pinch_run
    h = res.history
    assert all(b < a for a, b in zip(h, h[1:]))
    assert h[0] == res.initial_energy.total
    assert h[-1] == res.energy.total
    assert res.energy.total < res.initial_energy.total
    assert res.pose.is_valid((hand, hand))
    assert res.energy.total == total_energy(res.pose, ctx).total


def test_optimizer_fixed_point(pinch_run):
    ctx, cfg, _, res = pinch_run
    assert res.converged
    again = optimize_grasp(res.pose, ctx, cfg)
    assert again.converged and again.iterations <= 2
    assert abs(again.energy.total - res.energy.total) <= 1e-10


def test_batch_sorted_and_order_independent(hand, coarse_sphere):
    ctx = GraspContext.build(coarse_sphere, hand, "Pinch2")
    cfg = OptimizerConfig(max_iterations=3)
    a = synthesize_batch(ctx, 3, seeds=[5, 1, 9], config=cfg)
    b = synthesize_batch(ctx, 3, seeds=[9, 5, 1], config=cfg)
    assert len(a) == 3
    assert a.to_dict() == b.to_dict()
    totals = [c.energy.total for c in a]
    assert totals == sorted(totals)
    assert CandidateBatch.from_dict(a.to_dict()).to_dict() == a.to_dict()
    assert sorted(c.seed for c in a) == [1, 5, 9]
    with pytest.raises(ValueError):
        synthesize_batch(ctx, 0)


def test_batch_independent_of_jobs(hand, coarse_sphere):
    ctx = GraspContext.build(coarse_sphere, hand, "Pinch2")
    cfg = OptimizerConfig(max_iterations=2)
    a = synthesize_batch(ctx, 2, seeds=[3, 4], config=cfg, jobs=1)
    b = synthesize_batch(ctx, 2, seeds=[3, 4], config=cfg, jobs=2)
    assert a.to_dict() == b.to_dict()


def test_breakdown_dict_round_trip():
    e = EnergyBreakdown.combine(EnergyWeights(), 1.0, 2.0, 3.0, 4.0)
    assert EnergyBreakdown(**e.to_dict()) == e
    assert e.total == 1.0 + 200.0 + 1500.0 + 2000.0
