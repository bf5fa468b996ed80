"""Grasp synthesis: hull initialization and descent on the grasp objective."""
from .energy import (
    EnergyBreakdown,
    EnergyWeights,
    GraspContext,
    PoseEvaluation,
    energy_collision,
    energy_contact,
    energy_hand_hand,
    energy_wrench,
    evaluate,
    total_energy,
    generator_matrix,
    wrench_residuals,
)
from .optimize import (
    Candidate,
    CandidateBatch,
    OptimizeResult,
    OptimizerConfig,
    optimize_grasp,
    run_candidate,
    synthesize_batch,
)
from .pose import STANDOFF_BIMANUAL, STANDOFF_UNIMANUAL, BimanualGraspPose, init_grasp

__all__ = [
    "EnergyBreakdown", "EnergyWeights", "GraspContext", "PoseEvaluation", "energy_collision",
    "energy_contact", "energy_hand_hand", "energy_wrench", "evaluate", "total_energy",
    "wrench_residuals", "generator_matrix", "Candidate", "CandidateBatch", "OptimizeResult", "OptimizerConfig",
    "optimize_grasp", "run_candidate", "synthesize_batch", "STANDOFF_BIMANUAL",
    "STANDOFF_UNIMANUAL", "BimanualGraspPose", "init_grasp",
]
