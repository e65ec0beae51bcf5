"""Flooding-time simulation and analysis for geometric Markovian evolving
graphs: mobile nodes on a grid, disk-graph snapshots, flood-everything
broadcast. The heavy lifting lives in the C++ core (_megflood)."""

from ._megflood import (
    AlmostIncreasingResult,
    AlmostIncreasingSpec,
    ComponentReport,
    DegenerateGeometry,
    FitSummary,
    FloodTrace,
    InsufficientData,
    LemmaReport,
    StepRecord,
    TrialResult,
    WorldConfig,
    connected_components,
    fit_scaling,
    flood,
    gamma_size,
    minimal_spreading_sequence,
    move_offsets,
    run_sweep_json,
    sample_stationary,
    simulate_almost_increasing,
    snapshot_stats,
    stationary_probabilities,
    sweep_csv,
    transition_matrix,
    verify_boundary_lemma,
    verify_boundary_lemma_sampled,
    verify_spreading_lemma,
)

__all__ = [
    "AlmostIncreasingResult",
    "AlmostIncreasingSpec",
    "ComponentReport",
    "DegenerateGeometry",
    "FitSummary",
    "FloodTrace",
    "InsufficientData",
    "LemmaReport",
    "StepRecord",
    "TrialResult",
    "WorldConfig",
    "connected_components",
    "fit_scaling",
    "flood",
    "gamma_size",
    "minimal_spreading_sequence",
    "move_offsets",
    "run_sweep_json",
    "sample_stationary",
    "simulate_almost_increasing",
    "snapshot_stats",
    "stationary_probabilities",
    "sweep_csv",
    "transition_matrix",
    "verify_boundary_lemma",
    "verify_boundary_lemma_sampled",
    "verify_spreading_lemma",
]

__version__ = "0.1.0"
