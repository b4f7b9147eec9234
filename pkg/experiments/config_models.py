"""
Per-run configuration schemas for the scenario runners.
"""
from enum import Enum
from typing import Any, Dict, List, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from simulation.evolution import GateFamily, LayerParity
from simulation.models import GateKind, SpinUnit
from utils.config import config


class Scenario(str, Enum):
    XXZ = "xxz"
    CSYK = "csyk"
    BRICKWALL = "brickwall"
    XY_PULSED = "xy-pulsed"


class ExperimentConfig(BaseModel):
    """Fields shared by every scenario; dumped verbatim into the sidecar."""

    model_config = ConfigDict(extra="forbid")

    scenario: Scenario
    n_sites: int = Field(8, description="Total number of spins N")
    J: float = Field(1.0, description="Interaction scale J (energy units)")
    master_seed: Optional[int] = Field(None, ge=0, description="Master seed; drawn from entropy when omitted")
    unit: SpinUnit = SpinUnit.HALF
    output_dir: Optional[str] = None
    threads: int = Field(default_factory=lambda: config.threads, ge=1)

    @field_validator("n_sites")
    @classmethod
    def _even_chain(cls, value: int) -> int:
        if value < 2 or value % 2:
            raise ValueError(f"N must be an even integer >= 2, got {value}")
        return value

    @property
    def n_b(self) -> int:
        return self.n_sites // 2


class XxzChargeConfig(ExperimentConfig):
    scenario: Scenario = Scenario.XXZ
    delta: float = Field(1.0, description="XXZ anisotropy (dimensionless)")
    t_max: float = Field(20.0, gt=0, description="Final time (units 1/J)")
    dt: float = Field(default_factory=lambda: config.default_dt, gt=0, description="Time step (units 1/J)")
    with_sre: bool = True


class CsykChargeConfig(ExperimentConfig):
    scenario: Scenario = Scenario.CSYK
    t_max: float = Field(10.0, gt=0, description="Final time (units 1/J)")
    dt: float = Field(default_factory=lambda: config.default_dt, gt=0, description="Time step (units 1/J)")
    n_disorder: int = Field(default_factory=lambda: config.csyk_samples, ge=1, le=1000)
    growth_window: List[float] = Field(default_factory=lambda: [0.1, 1.0],
                                       description="Power-law fit window (units 1/J)")
    with_sre: bool = True

    @field_validator("n_sites")
    @classmethod
    def _csyk_minimum(cls, value: int) -> int:
        if value < 4:
            raise ValueError(f"cSYK needs N >= 4, got {value}")
        return value

    @field_validator("growth_window")
    @classmethod
    def _window(cls, value: List[float]) -> List[float]:
        if len(value) != 2 or not 0 < value[0] < value[1]:
            raise ValueError(f"growth window must be [t_min, t_max] with 0 < t_min < t_max, got {value}")
        return value


class BrickwallConfig(ExperimentConfig):
    scenario: Scenario = Scenario.BRICKWALL
    gate_family: GateFamily = GateFamily.HAAR
    gate_kind: GateKind = Field(GateKind.ISING, description="Generator for Hamiltonian gates")
    tau: float = Field(1.0, gt=0, description="Gate duration for Hamiltonian gates (units 1/J)")
    depth: int = Field(50, ge=1, description="Number of layers")
    n_circuits: int = Field(20, ge=1, description="Independent circuit realizations")
    first_layer_parity: LayerParity = LayerParity.ODD
    tableau_only: bool = False
    with_sre: bool = True

    @model_validator(mode="after")
    def _tableau_needs_clifford(self) -> "BrickwallConfig":
        if self.tableau_only and self.gate_family is not GateFamily.CLIFFORD:
            raise ValueError("tableau-only runs need gate_family 'clifford'")
        return self


class XyPulsedConfig(ExperimentConfig):
    scenario: Scenario = Scenario.XY_PULSED
    J_prime: float = Field(1.0, gt=0, description="XY coupling J' (energy units)")
    gammas: List[float] = Field(default_factory=lambda: [0.2, 1.0], description="Anisotropies")
    h_min: float = Field(0.0, ge=0, description="Smallest field h = h'/J'")
    h_max: float = Field(2.0, ge=0, description="Largest field h = h'/J'")
    h_step: float = Field(0.02, gt=0, description="Field step")
    k_max: int = Field(64, ge=1, description="Number of pulses")

    @field_validator("gammas")
    @classmethod
    def _gammas(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("at least one gamma is required")
        return value

    @model_validator(mode="after")
    def _field_range(self) -> "XyPulsedConfig":
        if self.h_max < self.h_min:
            raise ValueError(f"h_max={self.h_max} is below h_min={self.h_min}")
        return self

    def h_grid(self) -> List[float]:
        count = int(round((self.h_max - self.h_min) / self.h_step)) + 1
        return [round(self.h_min + i * self.h_step, 12) for i in range(count)]


CONFIG_MODELS: Dict[Scenario, Type[ExperimentConfig]] = {
    Scenario.XXZ: XxzChargeConfig,
    Scenario.CSYK: CsykChargeConfig,
    Scenario.BRICKWALL: BrickwallConfig,
    Scenario.XY_PULSED: XyPulsedConfig,
}


def load_config(data: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Validate a scenario config, letting non-None overrides win over file values.

    Args:
        data: Parsed config JSON; must carry ``scenario`` unless the override does
        overrides: Inline values (e.g. CLI flags)

    Returns:
        The scenario's config model
    """
    merged = dict(data)
    merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
    if "scenario" not in merged:
        raise ValueError("config is missing the 'scenario' field")
    model = CONFIG_MODELS[Scenario(merged["scenario"])]
    return model.model_validate(merged)
