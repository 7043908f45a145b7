"""Energy-efficient radio resource management for federated edge learning."""

__version__ = "0.1.0"

from .bandwidth import DualSolveReport, gamma_of_nu, solve_p1, uniform_baseline
from .errors import (
    BracketError,
    ConfigError,
    DimensionError,
    DomainError,
    EnergyOverflowError,
    InfeasibleScheduleError,
    RRMError,
)
from .joint import JointConfig, JointResult, solve_joint
from .model import Allocation, Device, SystemParams, allowed_upload_time, total_objective, upload_energy
from .numerics import RootBracket, bisect_decreasing, lambert_w0
from .scheduling import PriorityResult, priority, schedule_all
from .sim import ScenarioConfig, SweepResult, generate_population, run_sweep_allocation, run_sweep_joint

__all__ = [
    "Allocation", "BracketError", "ConfigError", "Device", "DimensionError", "DomainError",
    "DualSolveReport", "EnergyOverflowError", "InfeasibleScheduleError", "JointConfig",
    "JointResult", "PriorityResult", "RRMError", "RootBracket", "ScenarioConfig", "SweepResult",
    "SystemParams", "allowed_upload_time", "bisect_decreasing", "gamma_of_nu",
    "generate_population", "lambert_w0", "priority", "run_sweep_allocation", "run_sweep_joint",
    "schedule_all", "solve_joint", "solve_p1", "total_objective", "uniform_baseline",
    "upload_energy",
]
