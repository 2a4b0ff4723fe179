"""Quantum-jump simulation of two leaking Bose-Einstein condensates.

Detected atoms of unknown origin build up a relative phase between two
condensates that start in number states.  The package follows that process
exactly in the two-mode Fock basis and compares it with closed-form
approximations.
"""

from .coherent import ModePair, OverlapResult, atomic_coherent_state, max_overlap, overlap_kernel, overlap_with, phase_state
from .fock import (
    FockStateError,
    TwoModeFockState,
    VacuumError,
    ZeroNormError,
    apply_collision_phase,
    apply_interference_jump,
    apply_loss_jump,
    expect_adag_b,
    mode_occupations,
    norm_sq,
    normalize,
    number_state,
)
from .jump import FringeStats, detection_density, fringe_stats, sample_position
from .trajectory import (
    DetectionEvent,
    EnsembleCurve,
    SimConfig,
    equal_position_state,
    run_ensemble,
    run_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "DetectionEvent",
    "EnsembleCurve",
    "FockStateError",
    "FringeStats",
    "ModePair",
    "OverlapResult",
    "SimConfig",
    "TwoModeFockState",
    "VacuumError",
    "ZeroNormError",
    "apply_collision_phase",
    "apply_interference_jump",
    "apply_loss_jump",
    "atomic_coherent_state",
    "detection_density",
    "equal_position_state",
    "expect_adag_b",
    "fringe_stats",
    "max_overlap",
    "mode_occupations",
    "norm_sq",
    "normalize",
    "number_state",
    "overlap_kernel",
    "overlap_with",
    "phase_state",
    "run_ensemble",
    "run_trajectory",
    "sample_position",
]
