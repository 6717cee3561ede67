"""Sum-rate distribution and outage of large-intelligent-surface uplinks.

Monte Carlo simulation of the matched-filter uplink next to its closed-form
Gaussian approximation.
"""
__version__ = "0.1.0"

from .asymptotics import (
    LyapunovDiagnostic,
    SumRateDistribution,
    UnitAsymptotics,
    interference_moments,
    rate_linearisation,
    lyapunov_ratio,
    outage_probability,
    p_bar,
    q_function,
    scaling_check,
    sumrate_distribution,
)
from .config import ConfigError, SystemConfig, load_config, parse_config
from .scenario import Scenario
from .simulation import TrialSamples, compare, empirical_outage, empirical_pdf, normality_test, run_trials

__all__ = [
    "ConfigError", "LyapunovDiagnostic", "Scenario", "SumRateDistribution", "SystemConfig", "TrialSamples",
    "UnitAsymptotics", "compare", "empirical_outage", "empirical_pdf", "interference_moments", "rate_linearisation",
    "load_config", "lyapunov_ratio", "normality_test", "outage_probability", "p_bar", "parse_config",
    "q_function", "run_trials", "scaling_check", "sumrate_distribution",
]
