"""Regenerate the shipped fixture meshes, URDFs and metadata.

    python scripts/make_fixtures.py
"""
import json
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

from graspforge.geometry import centered_box, cylinder, icosphere, save_mesh, unit_cube

ROOT = Path(__file__).resolve().parents[1] / "src" / "graspforge" / "fixtures"

# finger geometry (m): proximal, middle, distal lengths and proxy radii
FINGER_LENGTHS = (0.045, 0.030, 0.025)
THUMB_LENGTHS = (0.040, 0.030, 0.025)
RADII = (0.009, 0.0085, 0.008)
LIMITS = ((-0.3, 1.6), (0.0, 1.8), (0.0, 1.5))
FINGERS = {
    # name: (root xyz in palm frame, yaw)
    "thumb": ((-0.005, -0.045, -0.009), -np.pi / 2),
    "index": ((0.045, -0.025, -0.009), 0.0),
    "middle": ((0.045, 0.0, -0.009), 0.0),
    "ring": ((0.045, 0.025, -0.009), 0.0),
}
SEGMENTS = ("proximal", "middle", "distal")


def fmt(v):
    return " ".join(repr(float(x)) for x in v)


def hand_urdf():
    out = ['<?xml version="1.0"?>', '<robot name="gf_hand12">', '  <link name="palm"/>']
    for finger, (xyz, yaw) in FINGERS.items():
        lengths = THUMB_LENGTHS if finger == "thumb" else FINGER_LENGTHS
        parent = "palm"
        origin = (xyz, (0.0, 0.0, yaw))
        for k, seg in enumerate(SEGMENTS):
            link = f"{finger}_{seg}"
            lo, hi = LIMITS[k]
            out.append(f'  <link name="{link}"/>')
            out += [
                f'  <joint name="{finger}_j{k + 1}" type="revolute">',
                f'    <parent link="{parent}"/>',
                f'    <child link="{link}"/>',
                f'    <origin xyz="{fmt(origin[0])}" rpy="{fmt(origin[1])}"/>',
                '    <axis xyz="0 -1 0"/>',
                f'    <limit lower="{lo}" upper="{hi}" effort="5" velocity="3"/>',
                '  </joint>',
            ]
            parent = link
            origin = ((lengths[k], 0.0, 0.0), (0.0, 0.0, 0.0))
    out.append("</robot>")
    return "\n".join(out) + "\n"


def hand_meta():
    spheres = {"palm": []}
    for x in (-0.03, 0.0, 0.03):
        for y in (-0.022, 0.022):
            spheres["palm"].append([x, y, -0.016, 0.016])
    spheres["palm"].append([-0.06, 0.0, -0.02, 0.025])  # wrist block behind the palm
    for finger in FINGERS:
        lengths = THUMB_LENGTHS if finger == "thumb" else FINGER_LENGTHS
        for k, seg in enumerate(SEGMENTS):
            L, r = lengths[k], RADII[k]
            pts = (0.3 * L, 0.75 * L) if k < 2 else (0.3 * L, 0.68 * L)
            spheres[f"{finger}_{seg}"] = [[p, 0.0, 0.0, r] for p in pts]

    def tip(finger):
        L = (THUMB_LENGTHS if finger == "thumb" else FINGER_LENGTHS)[2]
        return {"name": f"{finger}_tip", "link": f"{finger}_distal",
                "offset": [0.68 * L, 0.0, RADII[2]], "normal": [0, 0, 1]}

    def pad(finger):
        L = (THUMB_LENGTHS if finger == "thumb" else FINGER_LENGTHS)[1]
        return {"name": f"{finger}_pad", "link": f"{finger}_middle",
                "offset": [0.5 * L, 0.0, RADII[1]], "normal": [0, 0, 1]}

    palm = {"name": "palm_center", "link": "palm", "offset": [0.0, 0.0, 0.0], "normal": [0, 0, 1]}
    anchors = {
        "Pinch2": [tip("thumb"), tip("index")],
        "Tripod3": [tip("thumb"), tip("index"), tip("middle")],
        "WholeHand": [palm, tip("thumb"), tip("index"), tip("middle"), tip("ring")],
        "Bimanual": [palm, tip("thumb"), tip("index"), tip("ring")],
    }
    tuck = [1.4, 1.6, 1.2]
    q_open = {
        "Pinch2": [0.6, 0.4, 0.3] + [0.5, 0.4, 0.3] + tuck + tuck,
        "Tripod3": [0.6, 0.4, 0.3] + [0.5, 0.4, 0.3] * 2 + tuck,
        "WholeHand": [0.3, 0.2, 0.1] + [0.2, 0.2, 0.1] * 3,
        "Bimanual": [0.1, 0.1, 0.0] + [0.0, 0.0, 0.0] * 3,
    }
    squeeze = {
        "Pinch2": ["thumb_j2", "thumb_j3", "index_j2", "index_j3"],
        "Tripod3": ["thumb_j2", "thumb_j3", "index_j2", "index_j3", "middle_j2", "middle_j3"],
        "WholeHand": [f"{f}_j{k}" for f in FINGERS for k in (2, 3)],
        "Bimanual": [f"{f}_j{k}" for f in FINGERS for k in (2, 3)],
    }
    return {
        "name": "gf_hand12",
        "urdf": "hand.urdf",
        "palm_link": "palm",
        "palm_offset": {"xyz": [0, 0, 0], "rpy": [0, 0, 0]},
        "palm_normal": [0, 0, 1],
        "span": 0.12,
        "spheres": spheres,
        "anchors": anchors,
        "q_open": q_open,
        "squeeze_joints": squeeze,
        "frames": {
            "palm": "origin at the palm center on the palm surface; x toward the fingers, "
                    "z out of the palm toward the object; thumb on the -y side",
            "fingers": "each segment frame sits on its joint axis, x along the segment; "
                       "positive joint values flex toward +z",
        },
    }


ARM_JOINTS = [
    # name, parent, child, xyz, axis, limits
    ("shoulder_pan", "base_link", "shoulder", (0, 0, 0.1625), (0, 0, 1), (-2 * np.pi, 2 * np.pi)),
    ("shoulder_lift", "shoulder", "upper_arm", (0, 0, 0), (0, 1, 0), (-np.pi, np.pi)),
    ("elbow", "upper_arm", "forearm", (0, 0, 0.425), (0, 1, 0), (-2.9, 2.9)),
    ("wrist_1", "forearm", "wrist_1", (0, 0, 0.3922), (0, 0, 1), (-2 * np.pi, 2 * np.pi)),
    ("wrist_2", "wrist_1", "wrist_2", (0, 0, 0), (0, 1, 0), (-2.9, 2.9)),
    ("wrist_3", "wrist_2", "flange", (0, 0, 0.0328), (0, 0, 1), (-2 * np.pi, 2 * np.pi)),
]


def arm_urdf():
    links = ["base_link"] + [j[2] for j in ARM_JOINTS]
    out = ['<?xml version="1.0"?>', '<robot name="gf_arm6">']
    out += [f'  <link name="{l}"/>' for l in links]
    for name, parent, child, xyz, axis, (lo, hi) in ARM_JOINTS:
        out += [
            f'  <joint name="{name}" type="revolute">',
            f'    <parent link="{parent}"/>',
            f'    <child link="{child}"/>',
            f'    <origin xyz="{fmt(xyz)}" rpy="0 0 0"/>',
            f'    <axis xyz="{fmt(axis)}"/>',
            f'    <limit lower="{lo!r}" upper="{hi!r}" effort="150" velocity="3.14"/>',
            '  </joint>',
        ]
    out.append("</robot>")
    return "\n".join(out) + "\n"


def arm_meta(home_right, home_left):
    tool_R = np.array([[0, 0, 1], [0, -1, 0], [1, 0, 0]], float)
    rpy = Rotation.from_matrix(tool_R).as_euler("xyz").tolist()
    return {
        "name": "gf_arm6",
        "urdf": "arm.urdf",
        "flange": "flange",
        "reach": 0.85,
        "tool": {"xyz": [0.0, 0.0, 0.06], "rpy": rpy},
        "mounts": [
            {"name": "right", "xyz": [-0.4, -0.3, 0.0], "rpy": [0, 0, 0], "home": home_right},
            {"name": "left", "xyz": [-0.4, 0.3, 0.0], "rpy": [0, 0, 0], "home": home_left},
        ],
        "frames": {
            "flange": "z along the last wrist axis; the palm center sits 0.06 m along it",
            "home": "hands above the table in front of the arms, palms facing down",
        },
    }


def main():
    mesh_dir = ROOT / "meshes"
    mesh_dir.mkdir(parents=True, exist_ok=True)
    save_mesh(unit_cube(), mesh_dir / "unit_cube.obj")
    for k in (1, 2, 3):
        save_mesh(icosphere(0.04, k, name=f"icosphere_r004_s{k}"), mesh_dir / f"icosphere_r004_s{k}.obj")
    save_mesh(centered_box((0.6, 0.55, 0.52), name="large_box"), mesh_dir / "large_box.obj")
    save_mesh(centered_box((0.05, 0.05, 0.05), name="distractor_cube"), mesh_dir / "distractor_cube.obj")
    c = cylinder(0.03, 0.1, 32)
    save_mesh(c.transformed(translation=(0, 0, -0.05)), mesh_dir / "cylinder.obj")
    (ROOT / "hand.urdf").write_text(hand_urdf())
    (ROOT / "hand.json").write_text(json.dumps(hand_meta(), indent=1) + "\n")
    (ROOT / "arm.urdf").write_text(arm_urdf())

    # home: palm 0.3 m above the table, palm facing down, fingers pointing +x
    from graspforge.kinematics import RigidTransform, load_arms
    (ROOT / "arm.json").write_text(json.dumps(arm_meta([0.0] * 6, [0.0] * 6), indent=1) + "\n")
    homes = []
    target_R = np.array([[1, 0, 0], [0, -1, 0], [0, 0, -1]], float)
    for rig, y in zip(load_arms(ROOT / "arm.json"), (-0.2, 0.2)):
        seed = np.array([0.0, 0.6, 1.5, 0.0, 1.0, 0.0])
        res = rig.solve(RigidTransform(target_R, [-0.1, y, 0.3]), seed)
        assert res.success, res
        homes.append([round(float(v), 6) for v in res.q])
    (ROOT / "arm.json").write_text(json.dumps(arm_meta(*homes), indent=1) + "\n")
    print("fixtures written to", ROOT)


if __name__ == "__main__":
    main()
