"""Geometric phases of conserved-operator eigenframes.

The package builds cyclic frames from the eigenvectors of a conserved
operator, transports them around one period, and extracts total, dynamic
and geometric phases, including the non-Abelian holonomy of degenerate
levels. Everything numerical runs on its own kernels (jit-compiled when
numba is available, pure numpy otherwise, switchable with the
GEOMPHASE_PURE environment variable).
"""

from ._kernels import USING_NUMBA, warmup
from .errors import (
    BranchCutError,
    ConfigError,
    DegeneracySplitError,
    DegenerateMixingError,
    GeomPhaseError,
    GridTooCoarseError,
    HermiticityError,
    NonCyclicError,
    NonCyclicWarning,
    RankDeficiencyError,
    SkewHermiticityError,
    TrackingAmbiguityError,
    UnitarityError,
)
from .linalg import (
    Frame,
    circular_distance,
    eigh,
    group_degenerate,
    matrix_log_unitary,
    mod_2pi,
    overlap_matrix,
    polar_unitary,
    unitary_eigenphases,
    unitary_exp,
)
from .models import (
    ActionRingBlock,
    OperatorFamily,
    RotatingRingBlock,
    SpinHalf,
    StaticRingBlock,
    assemble_blocks,
    constant_family,
    coupling_matrix,
    trig_family,
)
from .evolution import (
    PhaseReport,
    Trajectory,
    aa_phase,
    cyclic_defect,
    dynamic_phase,
    energy_expectation,
    evolve,
    total_phase,
)
from .invariants import (
    decompose_state,
    eigenvalue_drift,
    invariance_residual,
    transport_error,
)
from .holonomy import (
    EigenframeSource,
    FramePath,
    berry_phase,
    connection_samples,
    gauge_transform,
    holonomy_report,
    phase_matrix,
    random_phase_gauge,
    random_unitary_gauge,
    sample_frames,
    wilson_loop,
)
from .action import TorusPath, as_frame_path, torus_connection, torus_path, torus_phase
from .ringstate import RingState, assembled_evolve, blockwise_evolve, ring_inner
from .experiments import EXPERIMENTS

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "warmup",
    "GeomPhaseError",
    "HermiticityError",
    "SkewHermiticityError",
    "UnitarityError",
    "BranchCutError",
    "RankDeficiencyError",
    "GridTooCoarseError",
    "DegeneracySplitError",
    "TrackingAmbiguityError",
    "DegenerateMixingError",
    "NonCyclicError",
    "NonCyclicWarning",
    "ConfigError",
    "Frame",
    "mod_2pi",
    "circular_distance",
    "overlap_matrix",
    "eigh",
    "group_degenerate",
    "unitary_exp",
    "unitary_eigenphases",
    "matrix_log_unitary",
    "polar_unitary",
    "OperatorFamily",
    "trig_family",
    "constant_family",
    "SpinHalf",
    "coupling_matrix",
    "StaticRingBlock",
    "RotatingRingBlock",
    "ActionRingBlock",
    "assemble_blocks",
    "Trajectory",
    "PhaseReport",
    "evolve",
    "energy_expectation",
    "dynamic_phase",
    "cyclic_defect",
    "total_phase",
    "aa_phase",
    "invariance_residual",
    "eigenvalue_drift",
    "transport_error",
    "decompose_state",
    "FramePath",
    "EigenframeSource",
    "sample_frames",
    "connection_samples",
    "phase_matrix",
    "wilson_loop",
    "berry_phase",
    "gauge_transform",
    "random_phase_gauge",
    "random_unitary_gauge",
    "holonomy_report",
    "TorusPath",
    "torus_path",
    "as_frame_path",
    "torus_phase",
    "torus_connection",
    "RingState",
    "ring_inner",
    "blockwise_evolve",
    "assembled_evolve",
    "EXPERIMENTS",
]
