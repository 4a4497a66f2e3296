from .kernel import BACKEND
from .core import (
    PccParams,
    PccState,
    Phase1Outcome,
    SegmentationResult,
    init_state,
    run_phase1,
    run_phase2,
    segment,
    step_particle,
    transition_probabilities,
)

__all__ = [
    "BACKEND",
    "PccParams",
    "PccState",
    "Phase1Outcome",
    "SegmentationResult",
    "init_state",
    "run_phase1",
    "run_phase2",
    "segment",
    "step_particle",
    "transition_probabilities",
]
