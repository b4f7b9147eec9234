"""
CsykChargeExperiment - Disorder-averaged charging through a complex SYK charger.
"""
from typing import Any, Dict

import numpy as np

from experiments.base_experiment import BaseExperiment
from experiments.config_models import CsykChargeConfig
from experiments.records import ExperimentOutput
from simulation.analysis import (
    fit_master_curve,
    fit_tanh_sum,
    growth_exponent,
    master_curve_rescale,
    tail_mean,
)
from simulation.errors import InvalidArgumentError
from simulation.evolution import Propagator, magnetization_sector, time_grid
from simulation.hilbert import domain_wall_state
from simulation.models import ModelFamily, build_battery_h, build_charging_h
from simulation.observables import RunRecord, battery_energy, disorder_average


class CsykChargeExperiment(BaseExperiment):
    """Runner for the all-to-all cSYK charger, averaged over coupling draws."""

    config_model = CsykChargeConfig

    def __init__(self):
        super().__init__(
            name="CsykCharge",
            description="Disorder-averaged charging dynamics with a complex SYK charger"
        )

    def run(self, exp_config: CsykChargeConfig) -> ExperimentOutput:
        """
        Average W, E and M2 over independent coupling realizations.

        Args:
            exp_config: cSYK scenario config

        Returns:
            ExperimentOutput with the averaged record, growth exponents and fits
        """
        exp_config = self.resolve_seed(exp_config)
        self.check_size(exp_config.n_sites, "sre" if exp_config.with_sre else "statevector")

        n_b = exp_config.n_b
        times = time_grid(exp_config.t_max, exp_config.dt)
        psi0 = domain_wall_state(n_b)
        sector = magnetization_sector(psi0)
        battery_h = build_battery_h(n_b, exp_config.unit)
        e0 = battery_energy(psi0, battery_h)
        parameters = {"N": exp_config.n_sites, "J": exp_config.J, "n_disorder": exp_config.n_disorder}

        def realization(rng: np.random.Generator, index: int) -> RunRecord:
            hamiltonian = build_charging_h(ModelFamily.CSYK, n_b, exp_config.unit, J=exp_config.J,
                                           rng=rng, sparse=True)
            states = Propagator(hamiltonian, sector=sector).evolve(psi0, times)
            series = self.measure_states(states, battery_h, e0, exp_config.with_sre)
            self.logger.debug(f"Realization {index} propagated")
            return RunRecord.from_series(
                times, series["W"], series["E"], series["M2"],
                seed=exp_config.master_seed,
                parameters=parameters,
                unit=exp_config.unit,
                extra=self.conserved_columns(hamiltonian, states),
            )

        self.logger.info(f"Averaging {exp_config.n_disorder} realizations at N={exp_config.n_sites}")
        average = disorder_average(realization, exp_config.n_disorder, exp_config.master_seed,
                                   threads=self.workers(exp_config))
        record = average.mean

        diagnostics: Dict[str, Any] = {
            "magnetization_drift": max(
                float(np.max(np.abs(s.extra["mz_total"] - s.extra["mz_total"][0]))) for s in average.samples
            ),
            "energy_drift": max(
                float(np.max(np.abs(s.extra["energy_total"] - s.extra["energy_total"][0]))) for s in average.samples
            ),
        }
        fits = self._fits(exp_config, record, diagnostics)
        record.diagnostics.update(diagnostics)
        return ExperimentOutput(exp_config.scenario, exp_config, record=record, fits=fits,
                                diagnostics=diagnostics)

    def _fits(self, exp_config: CsykChargeConfig, record: RunRecord,
              diagnostics: Dict[str, Any]) -> Dict[str, Any]:
        t_min, t_max = (value / exp_config.J for value in exp_config.growth_window)
        fits: Dict[str, Any] = {}
        for name in ("M2", "E"):
            try:
                fit = growth_exponent(record.times, getattr(record, name), t_min, t_max)
            except InvalidArgumentError as e:
                self.logger.warning(f"No growth exponent for {name}: {e}")
                continue
            fits[f"growth_{name}"] = fit.as_dict()
            diagnostics[f"exponent_{name}"] = float(fit.parameters[1])

        if not exp_config.with_sre:
            return fits

        try:
            tanh_fit = fit_tanh_sum(record.E, record.M2)
        except InvalidArgumentError as e:
            self.logger.warning(f"tanh-sum fit skipped: {e}")
        else:
            if not tanh_fit.converged:
                self.logger.warning("tanh-sum fit did not converge")
            fits["tanh_sum"] = tanh_fit.as_dict()

        m2_sat = tail_mean(record.M2)
        diagnostics["M2_sat"] = m2_sat
        if m2_sat > 0:
            E_scaled, M2_scaled = master_curve_rescale(record, m2_sat, exp_config.n_sites)
            record.extra["E_scaled"] = E_scaled
            record.extra["M2_scaled"] = M2_scaled
            fits["master_curve"] = fit_master_curve(E_scaled, M2_scaled).as_dict()
        return fits
