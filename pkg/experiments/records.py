"""
Result containers returned by the scenario runners.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from experiments.config_models import ExperimentConfig, Scenario
from simulation.observables import RunRecord


@dataclass(frozen=True)
class PmaxRecord:
    """Best average charging power of one (gamma, h) grid point."""

    h: float
    gamma: float
    initial_sre: float
    p_max: float
    argmax_k: int


@dataclass
class ExperimentOutput:
    """
    Everything one run produces.

    Time-resolved scenarios fill ``record``; the pulsed sweep fills ``pmax``.
    ``config`` is the effective config, with the master seed resolved.
    """

    scenario: Scenario
    config: ExperimentConfig
    record: Optional[RunRecord] = None
    pmax: List[PmaxRecord] = field(default_factory=list)
    fits: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def seed(self) -> Optional[int]:
        return self.config.master_seed
