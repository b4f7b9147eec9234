"""
Closed-form oracle checks shared by the test-suite and the ``selftest`` command.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from simulation.analysis import fit_power_law, perturbative_predictions, two_qubit_trajectory
from simulation.evolution import (
    CircuitSpec,
    GateFamily,
    GateSource,
    Propagator,
    magnetization_sector,
    run_brickwall,
)
from simulation.hilbert import StateVector, domain_wall_state, magnetization_profile, partial_trace_battery
from simulation.models import ModelFamily, SpinUnit, build_battery_h, build_charging_h
from simulation.observables import (
    battery_energy,
    block_state_model,
    ergotropy,
    sre_fast,
    sre_naive,
    state_ergotropy,
    steady_ergotropy_exact,
    stored_work,
)
from simulation.stabilizer import StabilizerTableau, asymptotic_ergotropy, clifford_ergotropy

logger = logging.getLogger(__name__)


@dataclass
class OracleResult:
    name: str
    passed: bool
    detail: str


def _random_state(n_sites: int, rng: np.random.Generator) -> StateVector:
    raw = rng.normal(size=2 ** n_sites) + 1j * rng.normal(size=2 ** n_sites)
    return StateVector.from_amplitudes(raw, normalize=True)


def check_two_qubit_exactness(points: int = 200, t_max: float = 2 * math.pi) -> OracleResult:
    """N=2 XXZ charging against the exact W(t) and M2(t)."""
    times = np.linspace(0.0, t_max, points)
    battery_h = build_battery_h(1, SpinUnit.HALF)
    psi0 = domain_wall_state(1)
    states = Propagator(build_charging_h(ModelFamily.XXZ, 1)).evolve(psi0, times)
    expected = two_qubit_trajectory(times)
    e0 = float(battery_h[0])
    worst_w = max(abs(stored_work(s, battery_h, e0) - w) for s, w in zip(states, expected["W"]))
    closed_m2 = -np.log2(0.5 * (1 + np.sin(times) ** 4 + np.cos(times) ** 4))
    worst_m2 = max(abs(sre_fast(s).value - m) for s, m in zip(states, closed_m2))
    passed = worst_w < 1e-9 and worst_m2 < 1e-9
    return OracleResult("two_qubit_exactness", passed, f"max|dW|={worst_w:.2e}, max|dM2|={worst_m2:.2e}")


def check_perturbative_window(sizes: Sequence[int] = (4, 6, 8), J: float = 1.0, t_max: float = 0.3,
                              dt: float = 0.05) -> OracleResult:
    """Short-time domain-wall dynamics against the two-level prediction."""
    times = dt * np.arange(int(round(t_max / dt)) + 1)
    worst = {"W": 0.0, "M2": 0.0, "E": 0.0}
    for n_sites in sizes:
        n_b = n_sites // 2
        psi0 = domain_wall_state(n_b)
        battery_h = build_battery_h(n_b, SpinUnit.HALF)
        e0 = battery_energy(psi0, battery_h)
        hamiltonian = build_charging_h(ModelFamily.XXZ, n_b, J=J, sparse=True)
        states = Propagator(hamiltonian, sector=magnetization_sector(psi0)).evolve(psi0, times)
        for t, state in zip(times, states):
            prediction = perturbative_predictions(J, t)
            worst["W"] = max(worst["W"], abs(stored_work(state, battery_h, e0) - prediction.W))
            worst["M2"] = max(worst["M2"], abs(sre_fast(state).value - prediction.M2))
            worst["E"] = max(worst["E"], state_ergotropy(state, battery_h))
    passed = worst["W"] < 5e-3 and worst["M2"] < 5e-3 and worst["E"] < 1e-3
    detail = ", ".join(f"max {key}={value:.2e}" for key, value in worst.items())
    return OracleResult("perturbative_window", passed, detail)


def check_sre_dual(samples: int = 100, sizes: Sequence[int] = (2, 3, 4, 5, 6), seed: int = 7) -> OracleResult:
    """Fast and naive SRE agree on random states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        for n_sites in sizes:
            state = _random_state(n_sites, rng)
            worst = max(worst, abs(sre_fast(state).value - sre_naive(state).value))
    return OracleResult("sre_dual", worst < 1e-9, f"max|fast-naive|={worst:.2e}")


def check_tableau_equivalence(circuits: int = 50, n_sites: int = 10, depth: int = 20, seed: int = 11) -> OracleResult:
    """Tableau and state-vector Clifford runs agree on magnetizations, rank and ergotropy; M2 stays 0."""
    n_b = n_sites // 2
    battery_h = build_battery_h(n_b, SpinUnit.PAULI)
    master = np.random.SeedSequence(seed)
    mismatches: List[str] = []
    for index, child in enumerate(master.spawn(circuits)):
        circuit = CircuitSpec(n_sites, depth, GateSource(GateFamily.CLIFFORD, np.random.default_rng(child)))
        tableau = StabilizerTableau.domain_wall(n_b)

        def compare(layer: int, state: StateVector, tab: StabilizerTableau) -> None:
            profile = magnetization_profile(state)
            if not np.allclose(profile, tab.magnetizations(), atol=1e-9):
                mismatches.append(f"circuit {index} layer {layer}: magnetization")
            rho = partial_trace_battery(state)
            rank = tab.battery_rank()
            support = int(np.count_nonzero(rho.eigenvalues() > 1e-9))
            if support != 2 ** (n_b - rank):
                mismatches.append(f"circuit {index} layer {layer}: rank")
            mz = float(np.sum(profile[n_b:]))
            if abs(ergotropy(rho, battery_h) - clifford_ergotropy(n_b, rank, round(mz))) > 1e-9:
                mismatches.append(f"circuit {index} layer {layer}: ergotropy")
            if sre_fast(state).value > 1e-9:
                mismatches.append(f"circuit {index} layer {layer}: magic")

        run_brickwall(circuit, domain_wall_state(n_b), record_each_layer=False, tableau=tableau, on_layer=compare)
    detail = "all layers agree" if not mismatches else "; ".join(mismatches[:3])
    return OracleResult("tableau_equivalence", not mismatches, detail)


def check_asymptotic_convergence() -> OracleResult:
    """Rank proposition approaches the exact flat-spectrum ergotropy."""
    gaps = {
        n_b: abs(asymptotic_ergotropy(n_b, n_b // 2) - clifford_ergotropy(n_b, n_b // 2, 0.0)) / n_b
        for n_b in (16, 32, 64, 128)
    }
    values = list(gaps.values())
    decreasing = all(a > b for a, b in zip(values, values[1:]))
    passed = gaps[32] < 0.08 and gaps[64] < 0.05 and decreasing
    return OracleResult("asymptotic_convergence", passed,
                        ", ".join(f"n_b={n}: {g:.4f}" for n, g in gaps.items()))


def check_block_state() -> OracleResult:
    """
    Exact steady-state ergotropy values and sub-linear growth.

    The exponent window [0.5, 0.7] brackets the exact block-state slope over
    N in {8, ..., 20} (about 0.63). The Gaussian sqrt(N/4 pi) estimate
    overstates the sector variance by a factor of two and drops the passive
    rearrangement, so it sits well above the exact values at these sizes
    (N=16: 0.466 vs 1.128) and is not a target here.
    """
    exact = {n: steady_ergotropy_exact(block_state_model(n)) for n in (4, 8, 12, 16, 20)}
    fit = fit_power_law([8, 12, 16, 20], [exact[n] for n in (8, 12, 16, 20)])
    passed = (
        abs(exact[4] - 1.0 / 6.0) < 1e-12
        and abs(exact[8] - 0.3) < 1e-12
        and 0.5 <= fit.parameters[1] <= 0.7
    )
    return OracleResult("block_state", passed,
                        f"E(4)={exact[4]:.6f}, E(8)={exact[8]:.6f}, exponent={fit.parameters[1]:.3f}")


def check_clifford_ergotropy_example() -> OracleResult:
    value = clifford_ergotropy(3, 1, 0.0)
    return OracleResult("clifford_ergotropy", abs(value - 1.5) < 1e-12, f"E(n_b=3, r=1)={value}")


ORACLES: Dict[str, Callable[[], OracleResult]] = {
    "two_qubit_exactness": check_two_qubit_exactness,
    "perturbative_window": check_perturbative_window,
    "sre_dual": check_sre_dual,
    "tableau_equivalence": check_tableau_equivalence,
    "asymptotic_convergence": check_asymptotic_convergence,
    "block_state": check_block_state,
    "clifford_ergotropy": check_clifford_ergotropy_example,
}


def run_oracle_suite(names: Optional[Sequence[str]] = None) -> List[OracleResult]:
    """Run the named oracles (all by default); failures are reported, not raised."""
    results = []
    for name in names or list(ORACLES):
        try:
            result = ORACLES[name]()
        except Exception as e:
            logger.error(f"Oracle {name} raised: {e}")
            result = OracleResult(name, False, f"raised {type(e).__name__}: {e}")
        logger.info(f"Oracle {result.name}: {'pass' if result.passed else 'FAIL'} ({result.detail})")
        results.append(result)
    return results
