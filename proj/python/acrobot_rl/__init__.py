"""Tabular model-based reinforcement learning for acrobot energy control."""

from ._core import (
    AcrobotParams,
    CalibrationReport,
    Discretization,
    ServoCommand,
    ServoModel,
    SimState,
    StudyConfig,
    catalog,
    discretize,
    estimate_cexp,
    find_study,
    hamiltonian,
    moving_average,
    parse_config,
    render_svg,
    run_study,
    scaled_hamiltonian,
    separatrix_velocity,
    serialize_config,
    simulate_calibration,
    state_count,
    step_rk4,
    theta_accel,
    train,
)

__all__ = [
    "AcrobotParams",
    "CalibrationReport",
    "Discretization",
    "ServoCommand",
    "ServoModel",
    "SimState",
    "StudyConfig",
    "catalog",
    "discretize",
    "estimate_cexp",
    "find_study",
    "hamiltonian",
    "moving_average",
    "parse_config",
    "render_svg",
    "run_study",
    "scaled_hamiltonian",
    "separatrix_velocity",
    "serialize_config",
    "simulate_calibration",
    "state_count",
    "step_rk4",
    "theta_accel",
    "train",
]
