"""
Quantum battery toolkit - Experiments Package
"""

from .base_experiment import BaseExperiment
from .brickwall_experiment import BrickwallExperiment
from .config_models import (
    BrickwallConfig,
    CsykChargeConfig,
    ExperimentConfig,
    Scenario,
    XxzChargeConfig,
    XyPulsedConfig,
    load_config,
)
from .csyk_experiment import CsykChargeExperiment
from .records import ExperimentOutput, PmaxRecord
from .xxz_experiment import XxzChargeExperiment
from .xy_pulsed_experiment import XyPulsedExperiment

__all__ = [
    'BaseExperiment',
    'XxzChargeExperiment',
    'CsykChargeExperiment',
    'BrickwallExperiment',
    'XyPulsedExperiment',
    'ExperimentConfig',
    'XxzChargeConfig',
    'CsykChargeConfig',
    'BrickwallConfig',
    'XyPulsedConfig',
    'Scenario',
    'load_config',
    'ExperimentOutput',
    'PmaxRecord',
]
