"""
Basis conventions, state containers and local observables for the
charger + battery spin chain.

All modules index the 2^N computational basis the same way: site ``i`` is
bit ``i`` of the basis index (site 0 least significant), a set bit is a spin
up (sigma_z = +1), and sites ``0..n_b-1`` form the charger while sites
``n_b..N-1`` form the battery.
"""
import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from simulation.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-10


@dataclass(frozen=True)
class BasisConvention:
    """Single authoritative record of the basis ordering."""

    bit_order: str = "little"
    down_bit: int = 0
    up_bit: int = 1
    charger_first: bool = True

    def spin(self, index: int, site: int) -> int:
        """Return +1 / -1 for the spin of ``site`` in basis state ``index``."""
        return 1 if (index >> site) & 1 == self.up_bit else -1

    def charger_sites(self, n_b: int) -> range:
        return range(0, n_b)

    def battery_sites(self, n_b: int) -> range:
        return range(n_b, 2 * n_b)

    def charger_mask(self, n_b: int) -> int:
        return (1 << n_b) - 1


BASIS = BasisConvention()

# Single-site operators in the (down, up) = (bit 0, bit 1) ordering.
IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of an N-site chain."""

    n_sites: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.n_sites < 1:
            raise InvalidArgumentError(f"n_sites must be positive, got {self.n_sites}")
        if amplitudes.size != 2 ** self.n_sites:
            raise InvalidArgumentError(
                f"expected {2 ** self.n_sites} amplitudes for N={self.n_sites}, got {amplitudes.size}"
            )
        norm_sq = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm_sq - 1.0) > NORM_TOLERANCE:
            raise InvalidArgumentError(f"state is not normalized: |psi|^2 = {norm_sq:.12g}")
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray, normalize: bool = False) -> "StateVector":
        """Build a state from raw amplitudes, optionally normalizing them."""
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n_sites = int(round(np.log2(amplitudes.size)))
        if normalize:
            norm = np.linalg.norm(amplitudes)
            if norm == 0:
                raise InvalidArgumentError("cannot normalize the zero vector")
            amplitudes = amplitudes / norm
        return cls(n_sites, amplitudes)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_b(self) -> int:
        return self.n_sites // 2

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: "StateVector") -> "StateVector":
        """Product state with ``self`` on the low sites and ``other`` on the high sites."""
        return StateVector(self.n_sites + other.n_sites, np.kron(other.amplitudes, self.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray = field(repr=False)
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidArgumentError(f"density matrix must be square, got shape {entries.shape}")
        if self.validate:
            _check_density(entries)
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.entries, self.entries)))

    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.entries)


def _check_density(entries: np.ndarray) -> None:
    if np.max(np.abs(entries - entries.conj().T), initial=0.0) > 1e-12:
        raise InvalidArgumentError("density matrix is not Hermitian")
    trace = np.trace(entries).real
    if abs(trace - 1.0) > NORM_TOLERANCE:
        raise InvalidArgumentError(f"density matrix trace is {trace:.12g}, expected 1")
    smallest = scipy.linalg.eigvalsh(entries)[0]
    if smallest < -NORM_TOLERANCE:
        raise InvalidArgumentError(f"density matrix has negative eigenvalue {smallest:.3e}")


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues and matching eigenvector columns."""

    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors))

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        vectors = self.eigenvectors
        return (vectors * self.eigenvalues) @ vectors.conj().T

    def ground_state(self) -> np.ndarray:
        return np.array(self.eigenvectors[:, 0])

    def gap(self) -> float:
        if self.dim < 2:
            return float("inf")
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def basis_state(bits: Sequence[int]) -> StateVector:
    """Product state with ``bits[i]`` the occupation of site ``i``."""
    n_sites = len(bits)
    if n_sites < 1:
        raise InvalidArgumentError("at least one site is required")
    index = 0
    for site, bit in enumerate(bits):
        if bit not in (0, 1):
            raise InvalidArgumentError(f"bit values must be 0 or 1, got {bit!r}")
        index |= int(bit) << site
    amplitudes = np.zeros(2 ** n_sites, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(n_sites, amplitudes)


def domain_wall_state(n_b: int) -> StateVector:
    """
    Charger fully excited, battery in its ground state.

    Args:
        n_b: Number of battery spins (the chain has 2 * n_b sites)

    Returns:
        Basis state with the charger bits set
    """
    if n_b < 1:
        raise InvalidArgumentError(f"n_b must be >= 1, got {n_b}")
    return basis_state([1] * n_b + [0] * n_b)


def _check_site(n_sites: int, site: int) -> None:
    if not 0 <= site < n_sites:
        raise InvalidArgumentError(f"site {site} out of range for N={n_sites}")


def site_bits(n_sites: int, site: int) -> np.ndarray:
    """Occupation (0/1) of ``site`` for every basis index."""
    return (np.arange(2 ** n_sites) >> site) & 1


def local_magnetization(state: StateVector, site: int) -> float:
    """Expectation value of sigma_z on ``site``."""
    _check_site(state.n_sites, site)
    signs = 2 * site_bits(state.n_sites, site) - 1
    return float(np.dot(state.probabilities(), signs))


def magnetization_profile(state: StateVector) -> np.ndarray:
    """<sigma_z^i> for every site."""
    probabilities = state.probabilities()
    indices = np.arange(state.dim)
    return np.array(
        [np.dot(probabilities, 2 * ((indices >> site) & 1) - 1) for site in range(state.n_sites)]
    )


def total_magnetization(state: StateVector) -> float:
    return float(np.sum(magnetization_profile(state)))


def battery_magnetizations(state: StateVector) -> np.ndarray:
    n_b = _require_even(state.n_sites)
    return magnetization_profile(state)[n_b:]


def _require_even(n_sites: int) -> int:
    if n_sites % 2:
        raise InvalidArgumentError(f"charger/battery split needs an even number of sites, got {n_sites}")
    return n_sites // 2


def battery_block(state: StateVector) -> np.ndarray:
    """Amplitudes arranged as ``psi[b, c]`` (battery index, charger index)."""
    n_b = _require_even(state.n_sites)
    return state.amplitudes.reshape(2 ** n_b, 2 ** n_b)


def battery_populations(state: StateVector) -> np.ndarray:
    """Diagonal of the battery reduced state, without forming the full matrix."""
    return np.sum(np.abs(battery_block(state)) ** 2, axis=1)


def partial_trace_battery(state: StateVector) -> DensityMatrix:
    """
    Reduced density matrix of the battery after tracing out the charger.

    Args:
        state: Pure state of the full chain (even number of sites)

    Returns:
        Battery density matrix in the battery basis (bit j <-> site n_b + j)
    """
    block = battery_block(state)
    rho = block @ block.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def battery_local_magnetization(rho: DensityMatrix, local_site: int) -> float:
    """<sigma_z> of battery site ``n_b + local_site`` evaluated from the reduced state."""
    n_b = int(round(np.log2(rho.dim)))
    _check_site(n_b, local_site)
    signs = 2 * site_bits(n_b, local_site) - 1
    return float(np.dot(np.real(np.diag(rho.entries)), signs))


MatrixLike = Union[DensityMatrix, np.ndarray]


def hermitian_eig(matrix: MatrixLike) -> Spectrum:
    """
    Dense Hermitian diagonalization with ascending eigenvalues.

    Args:
        matrix: DensityMatrix or square Hermitian array

    Returns:
        Spectrum with orthonormal eigenvector columns
    """
    entries = matrix.entries if isinstance(matrix, DensityMatrix) else np.asarray(matrix)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {entries.shape}")
    scale = max(1.0, float(np.max(np.abs(entries), initial=0.0)))
    if np.max(np.abs(entries - entries.conj().T), initial=0.0) > HERMITIAN_TOLERANCE * scale:
        raise InvalidArgumentError("matrix is not Hermitian")
    eigenvalues, eigenvectors = scipy.linalg.eigh(entries)
    return Spectrum(eigenvalues, eigenvectors)


def site_operator(single: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a 2x2 operator on ``site`` of an ``n_sites`` chain (dense)."""
    _check_site(n_sites, site)
    left = np.eye(2 ** (n_sites - 1 - site), dtype=complex)
    right = np.eye(2 ** site, dtype=complex)
    return np.kron(np.kron(left, single), right)


def apply_two_site(amplitudes: np.ndarray, gate: np.ndarray, site_a: int, site_b: int) -> np.ndarray:
    """
    Apply a 4x4 gate to sites (a, b); the gate's local index is bit_a + 2 * bit_b.

    Returns a new amplitude array; the input is left untouched.
    """
    n_sites = int(round(np.log2(amplitudes.size)))
    if site_a == site_b:
        raise InvalidArgumentError("two-site gate needs distinct sites")
    _check_site(n_sites, site_a)
    _check_site(n_sites, site_b)
    axis_a, axis_b = n_sites - 1 - site_a, n_sites - 1 - site_b
    tensor = np.moveaxis(amplitudes.reshape((2,) * n_sites), (axis_b, axis_a), (0, 1))
    rest_shape = tensor.shape[2:]
    updated = (gate @ tensor.reshape(4, -1)).reshape((2, 2) + rest_shape)
    return np.moveaxis(updated, (0, 1), (axis_b, axis_a)).reshape(-1)


def apply_single_site(amplitudes: np.ndarray, gate: np.ndarray, site: int) -> np.ndarray:
    """Apply a 2x2 gate to one site; returns a new amplitude array."""
    n_sites = int(round(np.log2(amplitudes.size)))
    _check_site(n_sites, site)
    axis = n_sites - 1 - site
    tensor = np.moveaxis(amplitudes.reshape((2,) * n_sites), axis, 0)
    rest_shape = tensor.shape[1:]
    updated = (gate @ tensor.reshape(2, -1)).reshape((2,) + rest_shape)
    return np.moveaxis(updated, 0, axis).reshape(-1)


def sector_indices(n_sites: int, n_up: int) -> np.ndarray:
    """Basis indices with exactly ``n_up`` spins up, ascending."""
    if not 0 <= n_up <= n_sites:
        raise InvalidArgumentError(f"n_up must lie in [0, {n_sites}], got {n_up}")
    indices = np.arange(2 ** n_sites)
    counts = np.zeros(indices.size, dtype=np.int64)
    for site in range(n_sites):
        counts += (indices >> site) & 1
    return indices[counts == n_up]


def state_sector(state: StateVector, tolerance: float = 1e-14) -> int:
    """Number of up spins shared by every populated basis state, or -1 if mixed."""
    populated = np.nonzero(state.probabilities() > tolerance)[0]
    counts = {bin(int(index)).count("1") for index in populated}
    return counts.pop() if len(counts) == 1 else -1
