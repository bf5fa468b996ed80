from .arm import ArmRig, load_arms
from .fk import JointLengthError, forward_kinematics, link_matrices, point_jacobian
from .hand import Anchor, HandModel, contact_frames, load_hand
from .ik import IKConfig, IKResult, ik_solve
from .model import Joint, KinematicModel, URDFError, load_urdf, parse_urdf
from .transforms import (
    RigidTransform,
    axis_angle_matrix,
    frame_from_z,
    orthonormalize,
    rpy_matrix,
    skew,
    so3_exp,
    so3_log,
)

__all__ = [
    "ArmRig", "load_arms", "JointLengthError", "forward_kinematics", "link_matrices",
    "point_jacobian", "Anchor", "HandModel", "contact_frames", "load_hand", "IKConfig",
    "IKResult", "ik_solve", "Joint", "KinematicModel", "URDFError", "load_urdf", "parse_urdf",
    "RigidTransform", "axis_angle_matrix", "frame_from_z", "orthonormalize", "rpy_matrix",
    "skew", "so3_exp", "so3_log",
]
