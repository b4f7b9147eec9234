"""
Base experiment class for the scenario runners.
"""
import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Sequence, Tuple, Type

import numpy as np
from pydantic import ValidationError

from experiments.config_models import ExperimentConfig
from experiments.records import ExperimentOutput
from simulation.errors import InvalidArgumentError, SizeLimitError
from simulation.hilbert import StateVector, total_magnetization
from simulation.observables import observe
from utils.config import config


class BaseExperiment(ABC):
    """Base class for all scenario runners."""

    config_model: Type[ExperimentConfig] = ExperimentConfig

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description
        self.runner_config = config.get_runner_config()
        self.size_limits = self.runner_config["size_limits"]
        self.logger = logging.getLogger(f"experiment.{name}")

    @abstractmethod
    def run(self, exp_config: ExperimentConfig) -> ExperimentOutput:
        """
        Execute one run; raises on invalid input or size violations.

        Args:
            exp_config: Validated scenario config

        Returns:
            ExperimentOutput with the effective config stamped in
        """
        pass

    def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Validate a raw config dictionary and run it, reporting failures as data.

        Args:
            input_data: Dictionary of config fields for this scenario

        Returns:
            Dictionary containing:
                - output: ExperimentOutput of the run
                - config: effective config as JSON-compatible values
            or ``error`` and ``error_type`` (config, size or runtime)
        """
        self.log_processing_start(input_data)

        try:
            exp_config = self.config_model.model_validate(input_data)
        except ValidationError as e:
            self.logger.error(f"Invalid configuration: {e}")
            return {"error": f"Invalid configuration: {e}", "error_type": "config"}

        try:
            output = self.run(exp_config)
        except SizeLimitError as e:
            self.logger.error(f"Size limit exceeded: {e}")
            return {"error": str(e), "error_type": "size"}
        except InvalidArgumentError as e:
            self.logger.error(f"Invalid argument: {e}")
            return {"error": str(e), "error_type": "config"}
        except Exception as e:
            self.logger.error(f"Error in {self.name}: {e}")
            return {"error": f"{self.name} failed: {e}", "error_type": "runtime"}

        result = {"output": output, "config": output.config.model_dump(mode="json")}
        self.log_processing_complete(result)
        return result

    def resolve_seed(self, exp_config: ExperimentConfig) -> ExperimentConfig:
        """Copy of the config with an entropy-derived master seed when none was given."""
        if exp_config.master_seed is not None:
            return exp_config
        seed = int(np.random.SeedSequence().entropy % (2 ** 63))
        self.logger.info(f"No master seed given, using entropy-derived seed {seed}")
        return exp_config.model_copy(update={"master_seed": seed})

    def check_size(self, n_sites: int, limit_name: str) -> None:
        limit = self.size_limits[limit_name]
        if n_sites > limit:
            raise SizeLimitError(
                f"{self.name} is limited to N <= {limit} ({limit_name}), got N={n_sites}",
                n_sites=n_sites,
                limit=limit,
            )

    def workers(self, exp_config: ExperimentConfig) -> int:
        return max(1, int(exp_config.threads))

    def measure_states(self, states: Sequence[StateVector], battery_h: np.ndarray, e0: float,
                       with_sre: bool, threads: int = 1) -> Dict[str, np.ndarray]:
        """
        W, E and M2 of every state, evaluated in parallel and collected in order.

        Args:
            states: States along a trajectory
            battery_h: Battery energy diagonal
            e0: Initial battery energy
            with_sre: Compute M2 (else report zeros)
            threads: Worker threads over states

        Returns:
            Dictionary with ``W``, ``E`` and ``M2`` arrays
        """
        def measure(state: StateVector) -> Tuple[float, float, float]:
            return observe(state, battery_h, e0, with_sre=with_sre)

        if threads > 1 and len(states) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(measure, states))
        else:
            values = [measure(state) for state in states]
        columns = np.array(values, dtype=float).reshape(len(states), 3)
        return {"W": columns[:, 0], "E": columns[:, 1], "M2": columns[:, 2]}

    @staticmethod
    def conserved_columns(hamiltonian, states: Sequence[StateVector]) -> Dict[str, np.ndarray]:
        """Total magnetization and <H_t> along a trajectory."""
        return {
            "mz_total": np.array([total_magnetization(state) for state in states]),
            "energy_total": np.array([
                float(np.vdot(state.amplitudes, hamiltonian @ state.amplitudes).real) for state in states
            ]),
        }

    def log_processing_start(self, input_data: Dict[str, Any]):
        """Log the start of processing."""
        self.logger.info(f"Starting {self.name} run")
        self.logger.debug(f"Input config keys: {list(input_data.keys())}")

    def log_processing_complete(self, output_data: Dict[str, Any]):
        """Log the completion of processing."""
        self.logger.info(f"Completed {self.name} run")
        self.logger.debug(f"Output keys: {list(output_data.keys())}")

    def get_experiment_info(self) -> Dict[str, str]:
        """Get information about this runner."""
        return {
            "name": self.name,
            "description": self.description,
            "type": self.__class__.__name__,
            "scenario": self.config_model.model_fields["scenario"].default.value,
        }
