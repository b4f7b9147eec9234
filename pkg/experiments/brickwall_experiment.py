"""
BrickwallExperiment - Charging by brick-wall random unitary circuits.
"""
import math
from typing import Any, Dict, List, Optional

import numpy as np

from experiments.base_experiment import BaseExperiment
from experiments.config_models import BrickwallConfig
from experiments.records import ExperimentOutput
from simulation.analysis import MIN_FIT_POINTS, fit_tanh_power, tail_mean
from simulation.errors import InvalidArgumentError, SizeLimitError
from simulation.evolution import (
    CircuitSpec,
    GateFamily,
    GateSource,
    run_brickwall,
    run_clifford_tableau,
)
from simulation.hilbert import StateVector, domain_wall_state, total_magnetization
from simulation.models import build_battery_h
from simulation.observables import RunRecord, battery_energy, disorder_average
from simulation.stabilizer import StabilizerTableau, asymptotic_ergotropy, clifford_ergotropy

SATURATION_FRACTION = 0.9


class BrickwallExperiment(BaseExperiment):
    """Runner for brick-wall circuits of Haar, U(1), Clifford or Hamiltonian gates."""

    config_model = BrickwallConfig

    def __init__(self):
        super().__init__(
            name="Brickwall",
            description="Battery charging by layered random two-site gates"
        )

    def run(self, exp_config: BrickwallConfig) -> ExperimentOutput:
        """
        Average per-layer W, E and M2 over independent circuits.

        Clifford runs also record the battery stabilizer rank and the
        rank-formula ergotropy; beyond the state-vector cap they switch to
        tableau-only simulation with M2 reported as 0.

        Args:
            exp_config: Brick-wall scenario config

        Returns:
            ExperimentOutput with the circuit-averaged record and family diagnostics
        """
        exp_config = self.resolve_seed(exp_config)
        family = GateFamily(exp_config.gate_family)
        tableau_only = self._use_tableau_only(exp_config)
        if tableau_only:
            self.check_size(exp_config.n_sites, "tableau")
            run_one = self._tableau_circuit(exp_config)
        else:
            self.check_size(exp_config.n_sites, "sre" if exp_config.with_sre else "statevector")
            run_one = self._statevector_circuit(exp_config)

        self.logger.info(f"Running {exp_config.n_circuits} {family.value} circuits, "
                         f"N={exp_config.n_sites}, depth={exp_config.depth}"
                         f"{' (tableau only)' if tableau_only else ''}")
        average = disorder_average(run_one, exp_config.n_circuits, exp_config.master_seed,
                                   threads=self.workers(exp_config))
        record = average.mean

        diagnostics: Dict[str, Any] = {"tableau_only": tableau_only}
        fits: Dict[str, Any] = {}
        if family is GateFamily.CLIFFORD:
            diagnostics.update(self._clifford_diagnostics(exp_config, record))
        else:
            diagnostics["E_late"] = tail_mean(record.E)
            if exp_config.with_sre:
                diagnostics["M2_sat"] = tail_mean(record.M2)
        if self._gate_source(exp_config, None).conserves_magnetization:
            diagnostics["magnetization_drift"] = max(
                float(np.max(np.abs(s.extra["mz_total"] - s.extra["mz_total"][0]))) for s in average.samples
            )
        if family is GateFamily.U1_HAAR and exp_config.with_sre:
            fits.update(self._u1_saturation(exp_config, record, diagnostics))

        record.diagnostics.update(diagnostics)
        return ExperimentOutput(exp_config.scenario, exp_config, record=record, fits=fits,
                                diagnostics=diagnostics)

    def _use_tableau_only(self, exp_config: BrickwallConfig) -> bool:
        if exp_config.tableau_only:
            return True
        cap = self.size_limits["sre" if exp_config.with_sre else "statevector"]
        if exp_config.n_sites <= cap:
            return False
        if GateFamily(exp_config.gate_family) is GateFamily.CLIFFORD:
            self.logger.info(f"N={exp_config.n_sites} exceeds the state-vector cap {cap}; using the tableau")
            return True
        raise SizeLimitError(
            f"{exp_config.gate_family.value} circuits are limited to N <= {cap}, got N={exp_config.n_sites}",
            n_sites=exp_config.n_sites,
            limit=cap,
        )

    def _gate_source(self, exp_config: BrickwallConfig, rng: Optional[np.random.Generator]) -> GateSource:
        return GateSource(exp_config.gate_family, rng, kind=exp_config.gate_kind,
                          J=exp_config.J, tau=exp_config.tau)

    def _statevector_circuit(self, exp_config: BrickwallConfig):
        n_b = exp_config.n_b
        unit = exp_config.unit
        clifford = GateFamily(exp_config.gate_family) is GateFamily.CLIFFORD
        psi0 = domain_wall_state(n_b)
        battery_h = build_battery_h(n_b, unit)
        e0 = battery_energy(psi0, battery_h)
        layers = np.arange(exp_config.depth + 1, dtype=float)

        def run_one(rng: np.random.Generator, index: int) -> RunRecord:
            circuit = CircuitSpec(exp_config.n_sites, exp_config.depth, self._gate_source(exp_config, rng),
                               exp_config.first_layer_parity)
            tableau = StabilizerTableau.domain_wall(n_b) if clifford else None
            ranks: List[int] = [n_b]
            battery_mz: List[int] = [-n_b]

            def track(layer: int, state: StateVector, tab) -> None:
                ranks.append(tab.battery_rank())
                battery_mz.append(tab.total_magnetization(range(n_b, exp_config.n_sites)))

            states = [psi0] + run_brickwall(circuit, psi0, tableau=tableau, on_layer=track if clifford else None)
            series = self.measure_states(states, battery_h, e0, exp_config.with_sre)
            extra = {"mz_total": np.array([total_magnetization(state) for state in states])}
            if clifford:
                extra.update(_rank_columns(n_b, ranks, battery_mz, unit.scale))
            self.logger.debug(f"Circuit {index} finished")
            return RunRecord.from_series(layers, series["W"], series["E"], series["M2"],
                                         seed=exp_config.master_seed,
                                         parameters=_parameters(exp_config),
                                         unit=unit, extra=extra)

        return run_one

    def _tableau_circuit(self, exp_config: BrickwallConfig):
        n_b = exp_config.n_b
        scale = exp_config.unit.scale
        battery_sites = range(n_b, exp_config.n_sites)
        layers = np.arange(exp_config.depth + 1, dtype=float)

        def run_one(rng: np.random.Generator, index: int) -> RunRecord:
            circuit = CircuitSpec(exp_config.n_sites, exp_config.depth, self._gate_source(exp_config, rng),
                               exp_config.first_layer_parity)
            tableau = StabilizerTableau.domain_wall(n_b)
            ranks: List[int] = [tableau.battery_rank()]
            battery_mz: List[int] = [tableau.total_magnetization(battery_sites)]
            total_mz: List[int] = [tableau.total_magnetization()]

            def track(layer: int, tab: StabilizerTableau) -> None:
                ranks.append(tab.battery_rank())
                battery_mz.append(tab.total_magnetization(battery_sites))
                total_mz.append(tab.total_magnetization())

            run_clifford_tableau(circuit, tableau, on_layer=track)
            columns = _rank_columns(n_b, ranks, battery_mz, scale)
            W = columns["W_pauli"] * scale
            self.logger.debug(f"Tableau circuit {index} finished")
            return RunRecord.from_series(layers, W, columns["E_rank"], np.zeros_like(W),
                                         seed=exp_config.master_seed,
                                         parameters=_parameters(exp_config),
                                         unit=exp_config.unit,
                                         extra={"mz_total": np.array(total_mz, dtype=float), **columns})

        return run_one

    def _clifford_diagnostics(self, exp_config: BrickwallConfig, record: RunRecord) -> Dict[str, Any]:
        n_b = exp_config.n_b
        scale = exp_config.unit.scale
        final_rank = int(round(float(record.extra["rank"][-1])))
        diagnostics = {
            "E_after_layer_1": float(record.E[1]) if len(record) > 1 else 0.0,
            "E_plateau": tail_mean(record.E),
            "E_rank_plateau": tail_mean(record.extra["E_rank"]),
            "W_pauli_plateau": tail_mean(record.extra["W_pauli"]),
            "final_mean_rank": float(record.extra["rank"][-1]),
            "asymptotic_E": asymptotic_ergotropy(n_b, final_rank) * scale,
        }
        self.logger.info(f"Clifford plateau E={diagnostics['E_plateau']:.4f}, "
                         f"rank-limited asymptote {diagnostics['asymptotic_E']:.4f}")
        return diagnostics

    def _u1_saturation(self, exp_config: BrickwallConfig, record: RunRecord,
                       diagnostics: Dict[str, Any]) -> Dict[str, Any]:
        n_sites = exp_config.n_sites
        m2_sat = tail_mean(record.M2)
        reference = math.log2(math.comb(n_sites, n_sites // 2))
        diagnostics["M2_sat"] = m2_sat
        diagnostics["log2_binomial"] = reference
        diagnostics["M2_sat_relative_deviation"] = abs(m2_sat - reference) / reference

        crossed = np.nonzero(record.M2 >= SATURATION_FRACTION * m2_sat)[0]
        end = max(int(crossed[0]) + 1 if crossed.size else len(record), MIN_FIT_POINTS)
        try:
            fit = fit_tanh_power(record.E[:end], record.M2[:end])
        except InvalidArgumentError as e:
            self.logger.warning(f"Pre-saturation fit skipped: {e}")
            return {}
        if not fit.converged:
            self.logger.warning("Pre-saturation tanh-power fit did not converge")
        return {"tanh_power": fit.as_dict()}


def _rank_columns(n_b: int, ranks: List[int], battery_mz: List[int], scale: float) -> Dict[str, np.ndarray]:
    """Rank-formula ergotropy and sigma_z-unit work from per-layer rank and battery magnetization."""
    ranks_array = np.array(ranks, dtype=float)
    mz = np.array(battery_mz, dtype=float)
    return {
        "rank": ranks_array,
        "E_rank": np.array([clifford_ergotropy(n_b, r, m) for r, m in zip(ranks, battery_mz)]) * scale,
        "W_pauli": mz + n_b,
    }


def _parameters(exp_config: BrickwallConfig) -> Dict[str, Any]:
    return {
        "N": exp_config.n_sites,
        "depth": exp_config.depth,
        "gate_family": GateFamily(exp_config.gate_family).value,
        "n_circuits": exp_config.n_circuits,
    }
