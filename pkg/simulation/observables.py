"""
Work, ergotropy, stabilizer Renyi entropy, averages and the steady-state
block model for the charger + battery chain.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from simulation.errors import InvalidArgumentError, SizeLimitError, UnitMismatchError
from simulation.hilbert import DensityMatrix, StateVector, battery_populations, partial_trace_battery
from simulation.models import SpinUnit, build_battery_h
from utils.config import config

logger = logging.getLogger(__name__)


# Pauli strings ---------------------------------------------------------------------

_I_POWERS = np.array([1, 1j, -1, -1j])


def _popcount(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    counts = np.zeros(values.shape, dtype=np.int64)
    while np.any(values):
        counts += values & 1
        values = values >> 1
    return counts


@dataclass(frozen=True)
class PauliString:
    """Hermitian Pauli i^{|x & z|} X^x Z^z on an N-site chain (site i <-> bit i)."""

    n_sites: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        limit = 1 << self.n_sites
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise InvalidArgumentError("Pauli masks exceed the chain length")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a label such as 'XIZY'; the first character is site 0."""
        x_mask = z_mask = 0
        for site, char in enumerate(label.upper()):
            if char not in "IXYZ":
                raise InvalidArgumentError(f"unknown Pauli letter {char!r}")
            if char in "XY":
                x_mask |= 1 << site
            if char in "ZY":
                z_mask |= 1 << site
        return cls(len(label), x_mask, z_mask)

    @property
    def label(self) -> str:
        letters = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        return "".join(
            letters[((self.x_mask >> site) & 1, (self.z_mask >> site) & 1)] for site in range(self.n_sites)
        )

    @property
    def phase(self) -> complex:
        return 1j ** bin(self.x_mask & self.z_mask).count("1")

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """P |psi> in O(2^N)."""
        indices = np.arange(amplitudes.size)
        signs = 1 - 2 * (_popcount(indices & self.z_mask) & 1)
        result = np.empty_like(amplitudes)
        result[indices ^ self.x_mask] = self.phase * signs * amplitudes
        return result

    def expectation(self, state: StateVector) -> float:
        return float(np.real(np.vdot(state.amplitudes, self.apply(state.amplitudes))))

    def matrix(self) -> np.ndarray:
        return np.array([self.apply(column) for column in np.eye(2 ** self.n_sites, dtype=complex)]).T


# Work and ergotropy ----------------------------------------------------------------

def battery_energy(state: StateVector, battery_h: np.ndarray) -> float:
    """Tr(H_B rho_B) with ``battery_h`` the battery-basis diagonal."""
    return float(np.dot(battery_populations(state), battery_h))


def stored_work(state: StateVector, battery_h: np.ndarray, e0: float) -> float:
    """W = Tr[H_B rho(t)] - Tr[H_B rho(0)]."""
    return battery_energy(state, battery_h) - e0


def passive_energy(eigvals_desc: Sequence[float], battery_levels_asc: Sequence[float]) -> float:
    """Pair the largest populations with the lowest levels."""
    populations = np.asarray(eigvals_desc, dtype=float)
    levels = np.asarray(battery_levels_asc, dtype=float)
    if populations.shape != levels.shape:
        raise InvalidArgumentError(
            f"spectrum has {populations.size} entries but the battery has {levels.size} levels"
        )
    if np.any(np.diff(populations) > 1e-12) or np.any(np.diff(levels) < -1e-12):
        raise InvalidArgumentError("populations must be nonincreasing and levels nondecreasing")
    return float(np.dot(populations, levels))


def ergotropy_from_spectrum(populations: np.ndarray, energy: float, battery_h: np.ndarray) -> float:
    """Mean energy minus the passive energy of the given eigenvalues."""
    ordered = np.sort(np.asarray(populations, dtype=float))[::-1]
    return float(energy - passive_energy(ordered, np.sort(battery_h)))


def ergotropy(rho_B: DensityMatrix, battery_h: np.ndarray) -> float:
    """
    Maximal extractable work via the passive-state construction.

    Args:
        rho_B: Battery density matrix
        battery_h: Diagonal of H_B in the battery basis

    Returns:
        Tr(rho H_B) - Tr(passive(rho) H_B)
    """
    battery_h = np.asarray(battery_h, dtype=float)
    if rho_B.dim != battery_h.size:
        raise InvalidArgumentError(f"rho has dimension {rho_B.dim}, H_B has {battery_h.size} levels")
    energy = float(np.dot(np.real(np.diag(rho_B.entries)), battery_h))
    return ergotropy_from_spectrum(rho_B.eigenvalues(), energy, battery_h)


def state_ergotropy(state: StateVector, battery_h: np.ndarray) -> float:
    return ergotropy(partial_trace_battery(state), battery_h)


# Stabilizer Renyi entropy ----------------------------------------------------------

class SreMethod(str, Enum):
    NAIVE = "naive"
    FAST = "fast"


@dataclass(frozen=True)
class SreResult:
    alpha: float
    value: float
    method: SreMethod


def _check_alpha(alpha: float) -> None:
    if alpha < 0:
        raise InvalidArgumentError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 1:
        raise InvalidArgumentError("alpha = 1 is not supported")


def _moment(values: np.ndarray, alpha: float) -> float:
    magnitudes = np.abs(values)
    if alpha == 0:
        return float(np.count_nonzero(magnitudes > 1e-12))
    return float(np.sum(magnitudes ** (2.0 * alpha)))


def _sre_from_moment(total: float, n_sites: int, alpha: float) -> float:
    return float(math.log2(total / 2 ** n_sites) / (1.0 - alpha))


def sre_naive(state: StateVector, alpha: float = 2.0, max_sites: Optional[int] = None) -> SreResult:
    """
    Reference SRE: enumerate all 4^N Pauli strings and apply each one.

    Raises:
        SizeLimitError: beyond the naive enumeration cap
    """
    _check_alpha(alpha)
    limit = config.max_sites_naive_sre if max_sites is None else max_sites
    if state.n_sites > limit:
        raise SizeLimitError(f"naive SRE is limited to N <= {limit}, got {state.n_sites}",
                             n_sites=state.n_sites, limit=limit)
    dim = state.dim
    expectations = np.empty(dim * dim)
    for x_mask in range(dim):
        for z_mask in range(dim):
            expectations[x_mask * dim + z_mask] = PauliString(state.n_sites, x_mask, z_mask).expectation(state)
    value = _sre_from_moment(_moment(expectations, alpha), state.n_sites, alpha)
    return SreResult(alpha=alpha, value=value, method=SreMethod.NAIVE)


def walsh_hadamard(rows: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis of a 2-D array."""
    chunk, dim = rows.shape
    data = rows.copy()
    half = 1
    while half < dim:
        view = data.reshape(chunk, -1, 2, half)
        upper = view[:, :, 0, :] + view[:, :, 1, :]
        lower = view[:, :, 0, :] - view[:, :, 1, :]
        data = np.stack([upper, lower], axis=2).reshape(chunk, dim)
        half *= 2
    return data


def pauli_spectrum_chunk(amplitudes: np.ndarray, x_masks: np.ndarray) -> np.ndarray:
    """
    <P> for every z and the given x masks; row r holds x = x_masks[r].

    Uses f_x(s) = conj(psi(s ^ x)) psi(s) whose Walsh-Hadamard transform at z
    is <X^x Z^z>; the i^{|x & z|} phase then makes each value real.
    """
    dim = amplitudes.size
    indices = np.arange(dim)
    shifted = np.conj(amplitudes[indices[None, :] ^ x_masks[:, None]])
    transformed = walsh_hadamard(shifted * amplitudes[None, :])
    overlap = _popcount(x_masks[:, None] & indices[None, :])
    return np.real(_I_POWERS[overlap % 4] * transformed)


def sre_fast(state: StateVector, alpha: float = 2.0, max_sites: Optional[int] = None,
             threads: int = 1) -> SreResult:
    """
    SRE through one Walsh-Hadamard transform per x mask, O(N 4^N).

    Args:
        state: Pure state
        alpha: Renyi index (not 1)
        max_sites: Size cap (defaults to the configured SRE cap)
        threads: Worker threads over x-mask chunks; the reduction order is fixed

    Returns:
        SreResult in bits
    """
    _check_alpha(alpha)
    limit = config.max_sites_sre if max_sites is None else max_sites
    if state.n_sites > limit:
        raise SizeLimitError(f"SRE is limited to N <= {limit}, got {state.n_sites}",
                             n_sites=state.n_sites, limit=limit)
    dim = state.dim
    chunk = max(1, min(dim, (1 << 20) // dim))
    starts = list(range(0, dim, chunk))
    amplitudes = state.amplitudes

    def partial(start: int) -> float:
        masks = np.arange(start, min(start + chunk, dim))
        return _moment(pauli_spectrum_chunk(amplitudes, masks), alpha)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(partial, starts))
    else:
        partials = [partial(start) for start in starts]
    value = _sre_from_moment(math.fsum(partials), state.n_sites, alpha)
    return SreResult(alpha=alpha, value=value, method=SreMethod.FAST)


def pauli_norm_sum(state: StateVector) -> float:
    """Sum over all Paulis of <P>^2 (equals 2^N for pure states)."""
    masks = np.arange(state.dim)
    return float(np.sum(pauli_spectrum_chunk(state.amplitudes, masks) ** 2))


def stabilizer_renyi_entropy(state: StateVector, alpha: float = 2.0, threads: int = 1) -> float:
    return sre_fast(state, alpha, threads=threads).value


# Time and disorder averages --------------------------------------------------------

def time_average(times: Sequence[float], values: Sequence[float]) -> np.ndarray:
    """Running (1/t) int_0^t X dt' by the trapezoidal rule; the t=0 entry is X(0)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1 or times.size == 0:
        raise InvalidArgumentError("times and values must be 1-D arrays of equal length")
    if times[0] != 0 or np.any(np.diff(times) <= 0):
        raise InvalidArgumentError("times must start at 0 and increase strictly")
    integral = cumulative_trapezoid(values, times, initial=0.0)
    averages = np.empty_like(values)
    averages[0] = values[0]
    averages[1:] = integral[1:] / times[1:]
    return averages


@dataclass
class RunRecord:
    """Per-time W, E, M2 with running averages and run metadata."""

    times: np.ndarray
    W: np.ndarray
    E: np.ndarray
    M2: np.ndarray
    avgW: np.ndarray
    avgE: np.ndarray
    avgM2: np.ndarray
    seed: Optional[int] = None
    parameters: Dict[str, Any] = field(default_factory=dict)
    unit: SpinUnit = SpinUnit.HALF
    extra: Dict[str, np.ndarray] = field(default_factory=dict)
    stream_indices: List[int] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        length = len(self.times)
        for name in ("W", "E", "M2", "avgW", "avgE", "avgM2"):
            array = np.asarray(getattr(self, name), dtype=float)
            if array.shape != (length,):
                raise InvalidArgumentError(f"{name} has {array.size} entries, expected {length}")
            setattr(self, name, array)
        self.times = np.asarray(self.times, dtype=float)
        self.unit = SpinUnit(self.unit)
        for name, column in self.extra.items():
            if len(column) != length:
                raise InvalidArgumentError(f"extra column {name} has {len(column)} entries, expected {length}")

    @classmethod
    def from_series(cls, times: Sequence[float], W: Sequence[float], E: Sequence[float],
                    M2: Sequence[float], **metadata) -> "RunRecord":
        """Build a record, computing the running time averages."""
        return cls(
            times=np.asarray(times, dtype=float),
            W=np.asarray(W, dtype=float),
            E=np.asarray(E, dtype=float),
            M2=np.asarray(M2, dtype=float),
            avgW=time_average(times, W),
            avgE=time_average(times, E),
            avgM2=time_average(times, M2),
            **metadata,
        )

    def __len__(self) -> int:
        return len(self.times)


def ensure_same_unit(*records: RunRecord) -> SpinUnit:
    """Common unit of the records; mixing conventions is an error."""
    units = {SpinUnit(record.unit) for record in records}
    if len(units) > 1:
        raise UnitMismatchError(f"records use different unit conventions: {sorted(u.value for u in units)}")
    return units.pop() if units else SpinUnit.HALF


@dataclass
class DisorderAverage:
    mean: RunRecord
    stderr: Dict[str, np.ndarray]
    samples: List[RunRecord] = field(default_factory=list, repr=False)


def spawn_generators(master_seed: int, n_streams: int) -> List[np.random.Generator]:
    """Independent per-trajectory generators split from one master seed."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(master_seed).spawn(n_streams)]


def disorder_average(run: Callable[[np.random.Generator, int], RunRecord], n_samples: int,
                     master_seed: int, threads: int = 1) -> DisorderAverage:
    """
    Pointwise mean and standard error of W, E, M2 over independent realizations.

    Args:
        run: Callable (generator, stream index) -> RunRecord for one realization
        n_samples: Number of realizations
        master_seed: Seed split into one stream per realization
        threads: Worker threads; results are collected in stream order

    Returns:
        DisorderAverage with the mean record, standard errors and the samples
    """
    if n_samples < 1:
        raise InvalidArgumentError(f"n_samples must be >= 1, got {n_samples}")
    generators = spawn_generators(master_seed, n_samples)
    jobs = list(zip(generators, range(n_samples)))
    if threads > 1 and n_samples > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(lambda job: run(*job), jobs))
    else:
        samples = [run(*job) for job in jobs]
    for index, _ in enumerate(samples):
        logger.debug(f"Realization {index + 1}/{n_samples} complete")

    ensure_same_unit(*samples)
    times = samples[0].times
    stacked = {name: np.vstack([getattr(s, name) for s in samples]) for name in ("W", "E", "M2")}
    means = {name: np.mean(values, axis=0) for name, values in stacked.items()}
    if n_samples > 1:
        stderr = {name: np.std(values, axis=0, ddof=1) / np.sqrt(n_samples) for name, values in stacked.items()}
    else:
        stderr = {name: np.zeros_like(values[0]) for name, values in stacked.items()}

    extra = {}
    for name in samples[0].extra:
        extra[name] = np.mean(np.vstack([s.extra[name] for s in samples]), axis=0)
    extra.update({f"{name}_stderr": values for name, values in stderr.items()})

    mean = RunRecord.from_series(
        times, means["W"], means["E"], means["M2"],
        seed=master_seed,
        parameters=dict(samples[0].parameters),
        unit=samples[0].unit,
        extra=extra,
        stream_indices=list(range(n_samples)),
    )
    return DisorderAverage(mean=mean, stderr=stderr, samples=samples)


# Steady-state block model ----------------------------------------------------------

@dataclass(frozen=True)
class BlockStateModel:
    """Sector weights p_m and dimensions d_m of the saturated battery state."""

    n_sites: int
    m_values: np.ndarray
    weights: np.ndarray
    dimensions: np.ndarray

    @property
    def n_b(self) -> int:
        return self.n_sites // 2

    def populations(self) -> np.ndarray:
        """Diagonal of rho_B^sat over the 2^{n_b} battery basis states."""
        counts = _popcount(np.arange(2 ** self.n_b))
        return (self.weights / self.dimensions)[counts]


def block_state_model(n_sites: int) -> BlockStateModel:
    """
    Weights p_m = C(n_b, n_b/2 + m) C(n_b, n_b/2 - m) / C(N, N/2) of the
    half-filled chain's battery sectors (half-integer m for odd n_b).
    """
    if n_sites < 2 or n_sites % 2:
        raise InvalidArgumentError(f"block model needs an even N >= 2, got {n_sites}")
    n_b = n_sites // 2
    total = math.comb(n_sites, n_b)
    k_values = np.arange(n_b + 1)
    weights = np.array([math.comb(n_b, k) * math.comb(n_b, n_b - k) / total for k in k_values])
    dimensions = np.array([math.comb(n_b, k) for k in k_values], dtype=float)
    return BlockStateModel(
        n_sites=n_sites,
        m_values=k_values - n_b / 2.0,
        weights=weights,
        dimensions=dimensions,
    )


def steady_ergotropy_exact(model: BlockStateModel) -> float:
    """Passive-state ergotropy of the block-diagonal steady state in the half-spin unit."""
    battery_h = build_battery_h(model.n_b, SpinUnit.HALF)
    populations = model.populations()
    energy = float(np.dot(populations, battery_h))
    return ergotropy_from_spectrum(populations, energy, battery_h)


def steady_ergotropy_abs_m(model: BlockStateModel) -> float:
    """sum_m |m| p_m."""
    return float(np.dot(np.abs(model.m_values), model.weights))


def steady_ergotropy_gauss(n_sites: float) -> float:
    """Gaussian-sector estimate sqrt(N / 4 pi)."""
    if n_sites < 4:
        raise InvalidArgumentError(f"N must be >= 4, got {n_sites}")
    return float(math.sqrt(n_sites / (4.0 * math.pi)))


def observe(state: StateVector, battery_h: np.ndarray, e0: float, with_sre: bool = True,
            threads: int = 1) -> Tuple[float, float, float]:
    """(W, E, M2) of one state; M2 is 0 when skipped."""
    work = stored_work(state, battery_h, e0)
    extractable = state_ergotropy(state, battery_h)
    magic = stabilizer_renyi_entropy(state, threads=threads) if with_sre else 0.0
    return work, extractable, magic
