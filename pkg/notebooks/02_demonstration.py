"""
From candidates to a recorded demonstration
===========================================

Synthesize a small batch, filter it, pick the grasp closest to the arms' home
poses, then plan and validate the Pregrasp, Grasp, Squeeze and Lift stages and
write the result as a dataset. About a minute on one core.
"""

import tempfile
from pathlib import Path

from graspforge.demo import DemoRecord, build_demo, read_dataset, write_dataset
from graspforge.fixtures import fixture_path
from graspforge.geometry import load_mesh
from graspforge.kinematics import load_arms, load_hand
from graspforge.scene import Scene
from graspforge.selection import filter_batch, select_preferred
from graspforge.synthesis import GraspContext, synthesize_batch

mesh = load_mesh(fixture_path("meshes/icosphere_r004_s3.obj")).transformed(None, [0, 0, 0.04])
hand = load_hand(fixture_path("hand.json"))
arms = load_arms(fixture_path("arm.json"))
ctx = GraspContext.build(mesh, hand, "WholeHand", mass=0.1, mu=0.6, table_height=0.0)
scene = Scene({"sphere": mesh}, 0.0)

# %%
# Four candidates are enough to see the filters at work.
batch = synthesize_batch(ctx, 4, seeds=[0, 1, 2, 3])
report = filter_batch(batch, ctx, arms, scene, "sphere")
for entry in report.entries:
    failed = [name for name in ("physical", "reachable", "collision_free")
              if not getattr(entry, name)]
    print(entry.seed, "pass" if entry.passed else "fail", failed)
print("physical pass rate", report.physical_pass_rate)

# %%
# Among the survivors, prefer the grasp nearest the arms' resting palm poses.
best = select_preferred(batch, report, [a.home_pose() for a in arms])
grasp = batch[best].pose
demo = build_demo(grasp, ctx, arms, scene, "sphere", report.entries[best].arm_joints)
print(len(demo.waypoints), "waypoints;", demo.validation)

# %%
# Counting waypoints per stage shows where the motion happens.
for stage in ("Pregrasp", "Grasp", "Squeeze", "Lift"):
    print(stage, sum(w.stage.value == stage for w in demo.waypoints))

# %%
# Records round-trip bit for bit through the JSONL dataset.
rec = DemoRecord("sphere", 0.1, "WholeHand", grasp, tuple(demo.waypoints), demo.validation,
                 {"demo": {}}, grasp_seed=batch[best].seed)
out = Path(tempfile.mkdtemp()) / "dataset"
write_dataset([rec], out)
(back,) = read_dataset(out)
print("identical after reading back:", back.to_json() == rec.to_json())
