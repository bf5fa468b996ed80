"""Demonstration generation: stage targets, planning, lift validation and the dataset."""
from .pipeline import (DemoConfig, DemoResult, build_demo, lift_displacement, lifted_contacts,
                       revalidate, validate_from_waypoints, wrist_fk_error)
from .plan import (MERGE_THRESHOLD, RESOLUTION, PlanFailure, RobotRig, Waypoint, interpolate,
                   merge_small_steps, plan_segment, waypoints_from_path)
from .record import (SCHEMA_VERSION, DatasetError, DatasetVersionError, DemoRecord,
                     append_records, read_dataset, write_dataset)
from .stages import (LIFT_HEIGHT, PREGRASP_OFFSET, SQUEEZE_DELTA, HandTarget, Stage,
                     squeeze_joints, stage_targets)
from .validate import MIN_LIFT, RESIDUAL_LIMIT, LiftValidation, gravity_residual, validate_lift

__all__ = [
    "DemoConfig", "DemoResult", "build_demo", "lift_displacement", "lifted_contacts",
    "validate_from_waypoints", "revalidate", "wrist_fk_error", "MERGE_THRESHOLD", "RESOLUTION", "PlanFailure", "RobotRig",
    "Waypoint", "interpolate", "merge_small_steps", "plan_segment", "waypoints_from_path",
    "SCHEMA_VERSION", "DatasetError", "DatasetVersionError", "DemoRecord", "append_records",
    "read_dataset", "write_dataset", "LIFT_HEIGHT", "PREGRASP_OFFSET", "SQUEEZE_DELTA",
    "HandTarget", "Stage", "squeeze_joints", "stage_targets", "MIN_LIFT", "RESIDUAL_LIMIT",
    "LiftValidation", "gravity_residual", "validate_lift",
]
