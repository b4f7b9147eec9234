"""
XyPulsedExperiment - Pulsed Clifford charging from the XY-chain ground state.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from experiments.base_experiment import BaseExperiment
from experiments.config_models import XyPulsedConfig
from experiments.records import ExperimentOutput, PmaxRecord
from simulation.errors import SizeLimitError
from simulation.evolution import pulsed_charge
from simulation.hilbert import StateVector, hermitian_eig
from simulation.models import build_xy
from simulation.observables import sre_fast

DEGENERACY_TOLERANCE = 1e-10
SRE_MATCH = 0.05
POWER_CONTRAST = 0.20
LOW_SRE_FRACTION = 0.25
MAX_XY_SITES = 12


class XyPulsedExperiment(BaseExperiment):
    """Runner for the P_max sweep over field and anisotropy."""

    config_model = XyPulsedConfig

    def __init__(self):
        super().__init__(
            name="XyPulsed",
            description="Maximum average charging power of pi/4 pulses applied to XY ground states"
        )

    def run(self, exp_config: XyPulsedConfig) -> ExperimentOutput:
        """
        Sweep (gamma, h), recording the initial SRE and P_max = max_k W(k)/k.

        Args:
            exp_config: Pulsed-XY scenario config

        Returns:
            ExperimentOutput with one PmaxRecord per grid point (gamma-major order)
        """
        exp_config = self.resolve_seed(exp_config)
        self.check_size(exp_config.n_sites, "sre")
        if exp_config.n_sites > MAX_XY_SITES:
            raise SizeLimitError(f"the pulsed sweep is limited to N <= {MAX_XY_SITES}, got N={exp_config.n_sites}",
                                 n_sites=exp_config.n_sites, limit=MAX_XY_SITES)

        grid = [(gamma, h) for gamma in exp_config.gammas for h in exp_config.h_grid()]
        self.logger.info(f"Sweeping {len(grid)} (gamma, h) points at N={exp_config.n_sites}")

        def point(job: Tuple[float, float]) -> PmaxRecord:
            return self._grid_point(exp_config, *job)

        threads = self.workers(exp_config)
        if threads > 1 and len(grid) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(point, grid))
        else:
            records = [point(job) for job in grid]

        diagnostics = {
            f"gamma={gamma:g}": self._sweep_diagnostics([r for r in records if r.gamma == gamma])
            for gamma in exp_config.gammas
        }
        return ExperimentOutput(exp_config.scenario, exp_config, pmax=records, diagnostics=diagnostics)

    def ground_state(self, hamiltonian: np.ndarray, gamma: float, h: float) -> Tuple[StateVector, float]:
        """Lowest eigenpair of the XY chain; a degenerate gap is logged, not resolved."""
        spectrum = hermitian_eig(hamiltonian)
        if spectrum.gap() < DEGENERACY_TOLERANCE:
            self.logger.warning(f"Degenerate XY ground state at gamma={gamma}, h={h}; using the returned vector")
        state = StateVector.from_amplitudes(spectrum.ground_state(), normalize=True)
        return state, float(spectrum.eigenvalues[0])

    def _grid_point(self, exp_config: XyPulsedConfig, gamma: float, h: float) -> PmaxRecord:
        hamiltonian = build_xy(exp_config.n_sites, exp_config.J_prime, gamma, h * exp_config.J_prime)
        psi_gs, e_gs = self.ground_state(hamiltonian, gamma, h)

        initial_sre = sre_fast(psi_gs).value
        # W(k) is measured against the ground-state energy of the same chain
        work = np.array([
            float(np.vdot(state.amplitudes, hamiltonian @ state.amplitudes).real) - e_gs
            for state in pulsed_charge(psi_gs, exp_config.k_max)
        ])
        power = work / np.arange(1, exp_config.k_max + 1)
        best = int(np.argmax(power))
        self.logger.debug(f"gamma={gamma}, h={h}: M2={initial_sre:.4f}, P_max={power[best]:.4f}")
        return PmaxRecord(h=h, gamma=gamma, initial_sre=initial_sre, p_max=float(power[best]), argmax_k=best + 1)

    def _sweep_diagnostics(self, records: List[PmaxRecord]) -> Dict[str, Any]:
        sre = np.array([r.initial_sre for r in records])
        p_max = np.array([r.p_max for r in records])
        peak = int(np.argmax(sre))
        best = int(np.argmax(p_max))
        witness = non_injective_pair(records)
        return {
            "h_at_max_sre": records[peak].h,
            "max_initial_sre": float(sre[peak]),
            "h_at_max_power": records[best].h,
            "max_power": float(p_max[best]),
            "sre_at_max_power_fraction": float(sre[best] / sre[peak]) if sre[peak] > 0 else 0.0,
            "max_power_at_low_sre": bool(sre[best] < LOW_SRE_FRACTION * sre[peak]),
            "non_injective_witness": witness,
        }


def non_injective_pair(records: List[PmaxRecord]) -> Optional[Dict[str, float]]:
    """
    First pair of grid points whose initial SRE agree within 5% while P_max
    differs by more than 20%, or None.
    """
    for i, first in enumerate(records):
        for second in records[i + 1:]:
            sre_scale = max(first.initial_sre, second.initial_sre)
            power_scale = max(first.p_max, second.p_max)
            if sre_scale <= 0 or power_scale <= 0:
                continue
            if (abs(first.initial_sre - second.initial_sre) <= SRE_MATCH * sre_scale
                    and abs(first.p_max - second.p_max) > POWER_CONTRAST * power_scale):
                return {"h_a": first.h, "h_b": second.h, "sre_a": first.initial_sre,
                        "sre_b": second.initial_sre, "p_max_a": first.p_max, "p_max_b": second.p_max}
    return None
