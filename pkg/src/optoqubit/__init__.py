"""Steady-state quantum correlations of an optomechanical cavity whose mirror
is softened by a perturbatively coupled qubit."""

from .dynamics import build_diffusion, build_drift, stability, stability_map, threshold_coupling
from .lyapunov import integrate_moments, solve_lyapunov
from .measures import CorrelationReport, invariants, report
from .params import QubitSpec, ReducedParams, SystemSpec, baseline, mean_thermal_occupation, qubit_induced_coupling, reduce
from .steadystate import solve_fixed_points
from .sweeps import SweepConfig, find_onset, run_point

__all__ = [
    "CorrelationReport",
    "QubitSpec",
    "ReducedParams",
    "SweepConfig",
    "SystemSpec",
    "baseline",
    "build_diffusion",
    "build_drift",
    "find_onset",
    "integrate_moments",
    "invariants",
    "mean_thermal_occupation",
    "qubit_induced_coupling",
    "reduce",
    "report",
    "run_point",
    "solve_fixed_points",
    "solve_lyapunov",
    "stability",
    "stability_map",
    "threshold_coupling",
]
