"""
Curve fitting, curve collapse and closed-form predictions used to read the
charging runs.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.optimize import minimize

from simulation.errors import InvalidArgumentError
from simulation.observables import RunRecord

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 8
POLISH_ROUNDS = 6
NELDER_MEAD_OPTIONS = {"xatol": 1e-13, "fatol": 1e-18, "maxiter": 40000, "maxfev": 80000}


@dataclass
class FitResult:
    """Best-fit parameters with the residual and restart bookkeeping."""

    parameters: np.ndarray
    residual_sse: float
    converged: bool
    restarts_used: int
    names: Tuple[str, ...] = ()
    extras: Dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "parameters": {name: float(value) for name, value in zip(self.names, self.parameters)},
            "residual_sse": float(self.residual_sse),
            "converged": bool(self.converged),
            "restarts_used": int(self.restarts_used),
            **{key: float(value) for key, value in self.extras.items()},
        }


def _validate_series(E: Sequence[float], M2: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    E = np.asarray(E, dtype=float)
    M2 = np.asarray(M2, dtype=float)
    if E.shape != M2.shape or E.ndim != 1:
        raise InvalidArgumentError("E and M2 must be 1-D arrays of equal length")
    if E.size < MIN_FIT_POINTS:
        raise InvalidArgumentError(f"at least {MIN_FIT_POINTS} points are needed, got {E.size}")
    return E, M2


def _simplex_fit(objective: Callable[[np.ndarray], float], starts: Sequence[np.ndarray]) -> Tuple[np.ndarray, float, bool, int]:
    """
    Nelder-Mead from every start, then repeated restarts from the best point.

    The winner is the lowest objective; ties go to the earliest start.
    """
    best_x, best_value, best_success = None, math.inf, False
    restarts = 0
    for start in starts:
        result = minimize(objective, np.asarray(start, dtype=float), method="Nelder-Mead",
                          options=NELDER_MEAD_OPTIONS)
        restarts += 1
        if result.fun < best_value:
            best_x, best_value, best_success = result.x, float(result.fun), bool(result.success)
    for _ in range(POLISH_ROUNDS):
        result = minimize(objective, best_x, method="Nelder-Mead", options=NELDER_MEAD_OPTIONS)
        restarts += 1
        if result.fun <= best_value:
            improved = best_value - float(result.fun)
            best_x, best_value, best_success = result.x, float(result.fun), bool(result.success)
            if improved <= 1e-18:
                break
    return np.asarray(best_x), best_value, best_success, restarts


def _linear_amplitudes(basis: np.ndarray, target: np.ndarray) -> np.ndarray:
    amplitudes, *_ = np.linalg.lstsq(basis, target, rcond=None)
    return amplitudes


def tanh_sum(E: np.ndarray, A: float, B: float, C: float, D: float) -> np.ndarray:
    return A * np.tanh(B * E) + C * np.tanh(D * E ** 2)


def fit_tanh_sum(E: Sequence[float], M2: Sequence[float]) -> FitResult:
    """
    Least-squares fit of M2 = A tanh(B E) + C tanh(D E^2).

    A log-spaced grid of (B, D) starts seeds the simplex; for each start the
    linear amplitudes (A, C) are solved exactly first.

    Args:
        E: Ergotropy samples
        M2: SRE samples

    Returns:
        FitResult over (A, B, C, D) with the B/D ratio in ``extras``
    """
    E, M2 = _validate_series(E, M2)
    names = ("A", "B", "C", "D")
    if np.var(M2) < 1e-14:
        logger.warning("Constant M2 series; tanh-sum fit not attempted")
        return FitResult(np.zeros(4), 0.0, False, 0, names)

    def objective(params: np.ndarray) -> float:
        residual = tanh_sum(E, *params) - M2
        return float(np.dot(residual, residual))

    scale = 1.0 / max(np.max(np.abs(E)), 1e-12)
    starts = []
    for b in np.logspace(-1, 1, 4) * scale:
        for d in np.logspace(-1, 1, 4) * scale ** 2:
            basis = np.column_stack([np.tanh(b * E), np.tanh(d * E ** 2)])
            a, c = _linear_amplitudes(basis, M2)
            starts.append(np.array([a, b, c, d]))

    params, sse, success, restarts = _simplex_fit(objective, starts)
    ratio = params[1] / params[3] if params[3] != 0 else math.inf
    result = FitResult(params, sse, success, restarts, names, {"B_over_D": ratio})
    logger.debug(f"tanh-sum fit: params={params.tolist()}, sse={sse:.3e}")
    return result


def tanh_power(E: np.ndarray, a1: float, a2: float, a3: float) -> np.ndarray:
    return a1 * np.tanh(a2 * np.clip(E, 0.0, None) ** a3)


def fit_tanh_power(E: Sequence[float], M2: Sequence[float]) -> FitResult:
    """Least-squares fit of M2 = a1 tanh(a2 E^a3) with a2, a3 > 0."""
    E, M2 = _validate_series(E, M2)
    names = ("a1", "a2", "a3")
    if np.var(M2) < 1e-14:
        logger.warning("Constant M2 series; tanh-power fit not attempted")
        return FitResult(np.zeros(3), 0.0, False, 0, names)

    def unpack(params: np.ndarray) -> Tuple[float, float, float]:
        return params[0], math.exp(params[1]), math.exp(params[2])

    def objective(params: np.ndarray) -> float:
        a1, a2, a3 = unpack(params)
        if not (np.isfinite(a2) and np.isfinite(a3)):
            return math.inf
        residual = tanh_power(E, a1, a2, a3) - M2
        return float(np.dot(residual, residual))

    scale = max(np.max(np.abs(E)), 1e-12)
    starts = []
    for a3 in (0.5, 1.0, 2.0, 4.0):
        for a2 in np.logspace(-1, 1, 4) / scale ** a3:
            basis = np.tanh(a2 * np.clip(E, 0.0, None) ** a3)[:, None]
            a1 = float(_linear_amplitudes(basis, M2)[0])
            starts.append(np.array([a1, math.log(a2), math.log(a3)]))

    params, sse, success, restarts = _simplex_fit(objective, starts)
    a1, a2, a3 = unpack(params)
    return FitResult(np.array([a1, a2, a3]), sse, success, restarts, names)


def fit_power_law(N_values: Sequence[float], y: Sequence[float]) -> FitResult:
    """y = a1 N^a2 by linear least squares in log-log space."""
    N_values = np.asarray(N_values, dtype=float)
    y = np.asarray(y, dtype=float)
    if N_values.shape != y.shape or N_values.size < 2:
        raise InvalidArgumentError("power-law fit needs two equal-length arrays with >= 2 points")
    if np.any(N_values <= 0) or np.any(y <= 0):
        raise InvalidArgumentError("power-law fit needs strictly positive data")
    slope, intercept = np.polyfit(np.log(N_values), np.log(y), 1)
    residual = np.log(y) - (intercept + slope * np.log(N_values))
    return FitResult(np.array([math.exp(intercept), slope]), float(np.dot(residual, residual)),
                     True, 1, ("a1", "a2"))


def growth_exponent(times: Sequence[float], values: Sequence[float],
                    t_min: float, t_max: float) -> FitResult:
    """Power-law exponent of ``values`` over [t_min, t_max]; nonpositive samples are dropped."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (times >= t_min) & (times <= t_max) & (times > 0) & (values > 0)
    if np.count_nonzero(mask) < 2:
        raise InvalidArgumentError(f"fewer than two positive samples in [{t_min}, {t_max}]")
    return fit_power_law(times[mask], values[mask])


# Rescaling and collapse ------------------------------------------------------------

def tail_mean(values: Sequence[float], fraction: float = 0.2) -> float:
    """Mean of the final ``fraction`` of a series."""
    values = np.asarray(values, dtype=float)
    count = max(1, int(math.ceil(fraction * values.size)))
    return float(np.mean(values[-count:]))


def master_curve_rescale(record: RunRecord, m2_sat: Optional[float], N: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    (E / sqrt(N), M2 / M2_sat); M2_sat defaults to the tail mean of M2.
    """
    if m2_sat is None:
        m2_sat = tail_mean(record.M2)
    if m2_sat <= 0:
        raise InvalidArgumentError(f"saturation value must be positive, got {m2_sat}")
    return record.E / math.sqrt(N), record.M2 / m2_sat


def fit_master_curve(E_scaled: Sequence[float], M2_scaled: Sequence[float]) -> FitResult:
    """M2~ = a1 tanh(E~) + a2 tanh(E~^2), linear in (a1, a2)."""
    E_scaled = np.asarray(E_scaled, dtype=float)
    M2_scaled = np.asarray(M2_scaled, dtype=float)
    basis = np.column_stack([np.tanh(E_scaled), np.tanh(E_scaled ** 2)])
    coefficients = _linear_amplitudes(basis, M2_scaled)
    residual = basis @ coefficients - M2_scaled
    return FitResult(coefficients, float(np.dot(residual, residual)), True, 1, ("a1", "a2"))


def collapse_deviation(curve_a: Tuple[Sequence[float], Sequence[float]],
                       curve_b: Tuple[Sequence[float], Sequence[float]]) -> float:
    """Maximum vertical gap between two curves over their common abscissa range."""
    xa, ya = (np.asarray(v, dtype=float) for v in curve_a)
    xb, yb = (np.asarray(v, dtype=float) for v in curve_b)
    order_a, order_b = np.argsort(xa, kind="stable"), np.argsort(xb, kind="stable")
    xa, ya, xb, yb = xa[order_a], ya[order_a], xb[order_b], yb[order_b]
    low, high = max(xa[0], xb[0]), min(xa[-1], xb[-1])
    if low >= high:
        raise InvalidArgumentError("curves share no abscissa range")
    grid = np.union1d(xa, xb)
    grid = grid[(grid >= low) & (grid <= high)]
    return float(np.max(np.abs(np.interp(grid, xa, ya) - np.interp(grid, xb, yb))))


# Closed forms ----------------------------------------------------------------------

class PerturbativePrediction(NamedTuple):
    p: float
    W: float
    M2: float
    E: float
    valid: bool


def two_qubit_sre_of_work(W):
    """M2 = -log2[1 - 4W(1-W)(1-2W)^2] for the two-site charger/battery."""
    W = np.asarray(W, dtype=float)
    value = -np.log2(1.0 - 4.0 * W * (1.0 - W) * (1.0 - 2.0 * W) ** 2)
    return float(value) if value.ndim == 0 else value


def perturbative_predictions(J: float, t: float) -> PerturbativePrediction:
    """Two-level domain-wall prediction (p, W, M2, E); valid for J t <= 1."""
    valid = abs(J * t) <= 1.0
    if not valid:
        logger.warning(f"J*t = {J * t:.3f} is outside the perturbative window")
    p = math.sin(J * t / 2.0) ** 2
    return PerturbativePrediction(p=p, W=p, M2=two_qubit_sre_of_work(p), E=0.0, valid=valid)


def two_qubit_trajectory(times: Sequence[float], J: float = 1.0) -> Dict[str, np.ndarray]:
    """Exact N=2 charging curves W(t), M2(t), E(t)."""
    times = np.asarray(times, dtype=float)
    p = np.sin(J * times / 2.0) ** 2
    # The battery qubit is diag(1-p, p); ergotropy appears once it is inverted
    ergotropy = np.clip(2.0 * p - 1.0, 0.0, None)
    return {"t": times, "W": p, "M2": two_qubit_sre_of_work(p), "E": ergotropy}


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 3:
        raise InvalidArgumentError("pearson needs two equal-length arrays with >= 3 points")
    if np.var(x) == 0 or np.var(y) == 0:
        raise InvalidArgumentError("pearson is undefined for constant input")
    return float(stats.pearsonr(x, y)[0])


def onset_time(times: Sequence[float], E: Sequence[float], threshold: float = 1e-6) -> Optional[float]:
    """First grid time with E above ``threshold``, or None."""
    above = np.nonzero(np.asarray(E, dtype=float) > threshold)[0]
    return float(np.asarray(times, dtype=float)[above[0]]) if above.size else None
