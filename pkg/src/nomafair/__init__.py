"""Minimum-power equal-rate and energy-efficient power allocation for downlink NOMA."""

__version__ = "0.1.0"

from .channel import ChannelRealization, Fading, PlacementSpec, pathloss_gain, realize_channels
from .eeopt import EeSolution, dinkelbach_fixed_rate, dinkelbach_joint, ee_max_oracle, ee_of_rate
from .erpa import ErpaSolution, min_power_closed_form, min_power_numeric, solve_erpa
from .errors import (BracketError, BudgetExceededError, ConfigError, ConvergenceError,
                     DegenerateChannelError, DomainError, NomaError)
from .fairness import FairnessReport, it_fairness, jain_index
from .rates import Allocation, PowerModel, ica_allocation
from .simulator import ExperimentConfig, Scenario, Strategy, Sweep, SweepKind, re_tradeoff, run_experiment

__all__ = [
    "Allocation", "BracketError", "BudgetExceededError", "ChannelRealization", "ConfigError",
    "ConvergenceError", "DegenerateChannelError", "DomainError", "EeSolution", "ErpaSolution",
    "ExperimentConfig", "Fading", "FairnessReport", "NomaError", "PlacementSpec", "PowerModel",
    "Scenario", "Strategy", "Sweep", "SweepKind", "dinkelbach_fixed_rate", "dinkelbach_joint",
    "ee_max_oracle", "ee_of_rate", "ica_allocation", "it_fairness", "jain_index",
    "min_power_closed_form", "min_power_numeric", "pathloss_gain", "re_tradeoff",
    "realize_channels", "run_experiment", "solve_erpa",
]
