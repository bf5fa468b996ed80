"""
Grasp synthesis on a small sphere
=================================

Build the energy context for a 4 cm icosphere resting on a table, draw a few
initial hand placements, optimize them and look at what the energy terms do.
Run with ``python notebooks/01_grasp_synthesis.py``; it takes about half a minute.
"""

import numpy as np

from graspforge.contact import force_closure
from graspforge.fixtures import fixture_path
from graspforge.geometry import load_mesh
from graspforge.kinematics import load_hand
from graspforge.synthesis import GraspContext, evaluate, init_grasp, optimize_grasp

# the sphere's centre sits one radius above the table
mesh = load_mesh(fixture_path("meshes/icosphere_r004_s3.obj")).transformed(None, [0, 0, 0.04])
hand = load_hand(fixture_path("hand.json"))
ctx = GraspContext.build(mesh, hand, "WholeHand", mass=0.1, mu=0.6, table_height=0.0)
print("centre of mass", ctx.com, "torque scale", ctx.alpha)

# %%
# Initial placements sit a fixed standoff outside the convex hull with the
# palm facing the object and the fingers open.
poses = [init_grasp(mesh, hand, "WholeHand", seed, table_height=0.0, hull=ctx.hull)
         for seed in range(3)]
for p in poses:
    print("wrist", np.round(p.translations[0], 3))

# %%
# Optimizing drives the fingertip anchors onto the surface while the
# collision, table and wrench terms keep the grasp physical.
for seed, p in enumerate(poses):
    res = optimize_grasp(p, ctx)
    e0, e1 = res.initial_energy, res.energy
    print(f"seed {seed}: {res.iterations} iterations, "
          f"contact {e0.contact:.2e} -> {e1.contact:.2e}, total {e0.total:.3g} -> {e1.total:.3g}")

# %%
# The energy history never goes up: every accepted step strictly decreases it.
h = np.array(res.history)
print("monotone:", bool(np.all(np.diff(h) < 0)), "steps:", len(h) - 1)

# %%
# Force closure of the optimized contacts, with the exact margin.
contacts = evaluate(res.pose, ctx).contacts
closure = force_closure(contacts, ctx.cone, ctx.com, ctx.alpha)
print("closed:", closure.closed, "margin:", closure.margin)
