"""Pulsed-drive mechanical squeezing simulator for linearized optomechanics."""

from .params import (
    EffectiveModel,
    GaussianState,
    SqueezingReport,
    SystemParams,
    load_preset,
    thermal_initial_state,
    validate_params,
)
from .schedule import PulseSchedule, four_pulse_schedule, freeze_schedule, perturb_schedule
from .dynamics import run_schedule, squeezing_report
from .analytics import effective_model, effective_sigma, squeezing_limit
from .wigner import WignerField, wigner_marginal
from .meanfield import MeanFieldState, ParametricSpec, integrate_meanfield, parametric_simulation
from .cli import MonteCarloResult, SweepResult, montecarlo_errors, run_figure, sweep_min_variance

__all__ = [
    "EffectiveModel",
    "GaussianState",
    "MeanFieldState",
    "MonteCarloResult",
    "ParametricSpec",
    "PulseSchedule",
    "SqueezingReport",
    "SweepResult",
    "SystemParams",
    "WignerField",
    "effective_model",
    "effective_sigma",
    "four_pulse_schedule",
    "freeze_schedule",
    "integrate_meanfield",
    "load_preset",
    "montecarlo_errors",
    "perturb_schedule",
    "parametric_simulation",
    "run_figure",
    "run_schedule",
    "squeezing_limit",
    "squeezing_report",
    "sweep_min_variance",
    "thermal_initial_state",
    "validate_params",
    "wigner_marginal",
]
