"""
Stabilizer tableau simulation, the two-qubit Clifford group, and the
rank-determined ergotropy formulas for Clifford-charged batteries.

Paulis here use the computational convention: Z acts as diag(+1, -1) on the
bit value, so physical sigma_z = -Z and the all-down chain is stabilized by
+Z on every site. Every Pauli is stored in its Hermitian form
i^{|x & z|} X^x Z^z and a sign bit.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from simulation.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)

CLIFFORD2_ORDER = 11520
SYMPLECTIC2_ORDER = 720


def single_pauli(x: int, z: int) -> np.ndarray:
    """Hermitian single-qubit Pauli i^{xz} X^x Z^z."""
    matrix = np.linalg.matrix_power(_X, x) @ np.linalg.matrix_power(_Z, z)
    return (1j ** (x * z)) * matrix


def _code_bits(code: int) -> Tuple[int, int, int, int]:
    return code & 1, (code >> 1) & 1, (code >> 2) & 1, (code >> 3) & 1


def two_site_pauli(code: int) -> np.ndarray:
    """4x4 Pauli for local code x_a + 2 z_a + 4 x_b + 8 z_b (site a on the low bit)."""
    x_a, z_a, x_b, z_b = _code_bits(code)
    return np.kron(single_pauli(x_b, z_b), single_pauli(x_a, z_a))


PAULIS_2Q = np.array([two_site_pauli(code) for code in range(16)])


def _symplectic_product(code_a: int, code_b: int) -> int:
    xa1, za1, xa2, za2 = _code_bits(code_a)
    xb1, zb1, xb2, zb2 = _code_bits(code_b)
    return (xa1 * zb1 + za1 * xb1 + xa2 * zb2 + za2 * xb2) % 2


def identify_pauli(matrix: np.ndarray) -> Tuple[int, int]:
    """
    Decompose a matrix that should be a signed two-qubit Pauli.

    Returns:
        Tuple of (code, sign bit) with sign bit 1 meaning -P

    Raises:
        InvalidArgumentError: if the matrix is not +-P for a Hermitian Pauli P
    """
    coefficients = np.einsum("kab,ab->k", PAULIS_2Q.conj(), matrix) / 4.0
    code = int(np.argmax(np.abs(coefficients)))
    value = coefficients[code]
    if abs(abs(value) - 1.0) > 1e-9 or abs(value.imag) > 1e-9:
        raise InvalidArgumentError("matrix is not a signed Hermitian Pauli")
    return code, int(value.real < 0)


def conjugation_table(unitary: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Images (code, sign bit) of all 16 local Paulis under U P U^dagger."""
    images = np.zeros(16, dtype=np.int64)
    flips = np.zeros(16, dtype=np.uint8)
    for code in range(16):
        images[code], flips[code] = identify_pauli(unitary @ PAULIS_2Q[code] @ unitary.conj().T)
    return images, flips


def _cnot() -> np.ndarray:
    matrix = np.zeros((4, 4), dtype=complex)
    for bit_a in (0, 1):
        for bit_b in (0, 1):
            matrix[bit_a + 2 * (bit_b ^ bit_a), bit_a + 2 * bit_b] = 1.0
    return matrix


GENERATORS_2Q = {
    "H_a": np.kron(_I2, _H),
    "H_b": np.kron(_H, _I2),
    "S_a": np.kron(_I2, _S),
    "S_b": np.kron(_S, _I2),
    "CNOT": _cnot(),
}


@dataclass(frozen=True)
class _CliffordGroupTables:
    representatives: np.ndarray
    images: np.ndarray
    flips: np.ndarray
    frame_flips: np.ndarray
    keys: Dict[Tuple[int, int, int, int], int]


@lru_cache(maxsize=1)
def clifford_group_tables() -> _CliffordGroupTables:
    """
    Enumerate Sp(4, F2) by closure over H, S and CNOT.

    One unitary representative is stored per symplectic image, keyed by the
    unsigned images of X_a, Z_a, X_b, Z_b.
    """
    identity = np.eye(4, dtype=complex)
    representatives: List[np.ndarray] = [identity]
    keys = {(1, 2, 4, 8): 0}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for generator in GENERATORS_2Q.values():
            candidate = generator @ current
            images, _ = conjugation_table(candidate)
            key = tuple(int(images[code]) for code in (1, 2, 4, 8))
            if key not in keys:
                keys[key] = len(representatives)
                representatives.append(candidate)
                queue.append(candidate)
    if len(representatives) != SYMPLECTIC2_ORDER:
        raise RuntimeError(f"symplectic enumeration produced {len(representatives)} elements")

    tables = [conjugation_table(rep) for rep in representatives]
    frame_flips = np.array(
        [[_symplectic_product(frame, code) for code in range(16)] for frame in range(16)],
        dtype=np.uint8,
    )
    logger.debug("Enumerated the two-qubit symplectic group")
    return _CliffordGroupTables(
        representatives=np.array(representatives),
        images=np.array([images for images, _ in tables]),
        flips=np.array([flips for _, flips in tables]),
        frame_flips=frame_flips,
        keys=keys,
    )


@dataclass(frozen=True)
class Clifford2:
    """
    Two-qubit Clifford element U = R_s P_f with R_s a symplectic representative
    and P_f a Pauli frame; carries both the 4x4 matrix and the Pauli image table.
    """

    symplectic_index: int
    frame_index: int
    matrix: np.ndarray = field(repr=False)
    images: np.ndarray = field(repr=False)
    flips: np.ndarray = field(repr=False)

    @classmethod
    def from_indices(cls, symplectic_index: int, frame_index: int) -> "Clifford2":
        tables = clifford_group_tables()
        if not 0 <= symplectic_index < SYMPLECTIC2_ORDER or not 0 <= frame_index < 16:
            raise InvalidArgumentError("Clifford indices out of range")
        matrix = tables.representatives[symplectic_index] @ PAULIS_2Q[frame_index]
        flips = tables.flips[symplectic_index] ^ tables.frame_flips[frame_index]
        return cls(symplectic_index, frame_index, matrix, tables.images[symplectic_index], flips)

    @classmethod
    def identity(cls) -> "Clifford2":
        return cls.from_indices(clifford_group_tables().keys[(1, 2, 4, 8)], 0)

    @classmethod
    def from_matrix(cls, unitary: np.ndarray) -> "Clifford2":
        """Locate a Clifford unitary in the enumeration (up to global phase)."""
        images, flips = conjugation_table(unitary)
        tables = clifford_group_tables()
        index = tables.keys[tuple(int(images[code]) for code in (1, 2, 4, 8))]
        needed = flips ^ tables.flips[index]
        for frame in range(16):
            if np.array_equal(tables.frame_flips[frame], needed):
                return cls.from_indices(index, frame)
        raise InvalidArgumentError("unitary is not a two-qubit Clifford")

    def conjugate(self, code: int) -> Tuple[int, int]:
        return int(self.images[code]), int(self.flips[code])

    @property
    def element_index(self) -> int:
        return 16 * self.symplectic_index + self.frame_index


def sample_clifford2(rng: np.random.Generator) -> Clifford2:
    """Uniform draw from the 11520-element two-qubit Clifford group (mod phase)."""
    symplectic_index = int(rng.integers(SYMPLECTIC2_ORDER))
    frame_index = int(rng.integers(16))
    return Clifford2.from_indices(symplectic_index, frame_index)


# GF(2) helpers ---------------------------------------------------------------------

def gf2_row_reduce(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray, List[Tuple[int, int]]]:
    """
    Row-reduce a binary matrix.

    Returns:
        (reduced, transform, pivots) with reduced = transform @ matrix (mod 2)
        and pivots a list of (row, column)
    """
    reduced = np.array(matrix, dtype=np.uint8) % 2
    rows, columns = reduced.shape
    transform = np.eye(rows, dtype=np.uint8)
    pivots: List[Tuple[int, int]] = []
    row = 0
    for column in range(columns):
        if row >= rows:
            break
        candidates = np.nonzero(reduced[row:, column])[0]
        if candidates.size == 0:
            continue
        pivot = row + int(candidates[0])
        if pivot != row:
            reduced[[row, pivot]] = reduced[[pivot, row]]
            transform[[row, pivot]] = transform[[pivot, row]]
        targets = np.nonzero(reduced[:, column])[0]
        targets = targets[targets != row]
        reduced[targets] ^= reduced[row]
        transform[targets] ^= transform[row]
        pivots.append((row, column))
        row += 1
    return reduced, transform, pivots


def gf2_rank(matrix: np.ndarray) -> int:
    return len(gf2_row_reduce(matrix)[2])


def _phase_exponent(x1: np.ndarray, z1: np.ndarray, x2: np.ndarray, z2: np.ndarray) -> np.ndarray:
    """Power of i picked up by the product P1 P2 of Hermitian Paulis, summed over the last axis."""
    x1, z1, x2, z2 = (np.asarray(a, dtype=np.int64) for a in (x1, z1, x2, z2))
    g = np.where(
        (x1 == 1) & (z1 == 1), z2 - x2,
        np.where(x1 == 1, z2 * (2 * x2 - 1), np.where(z1 == 1, x2 * (1 - 2 * z2), 0)),
    )
    return np.sum(g, axis=-1)


def _rowsum(x: np.ndarray, z: np.ndarray, signs: np.ndarray, targets: np.ndarray, pivot: int) -> None:
    """Replace each target row by (pivot row) * (target row), tracking the sign."""
    exponent = (
        2 * signs[targets].astype(np.int64)
        + 2 * int(signs[pivot])
        + _phase_exponent(x[pivot][None, :], z[pivot][None, :], x[targets], z[targets])
    )
    signs[targets] = ((exponent % 4) // 2).astype(np.uint8)
    x[targets] ^= x[pivot]
    z[targets] ^= z[pivot]


# Tableau ---------------------------------------------------------------------------

class StabilizerTableau:
    """
    N stabilizer generators over GF(2) with sign bits.

    Trajectory-local and mutable: gates update the rows in place.
    """

    def __init__(self, x_bits: np.ndarray, z_bits: np.ndarray, signs: np.ndarray, validate: bool = True):
        self.x_bits = np.array(x_bits, dtype=np.uint8)
        self.z_bits = np.array(z_bits, dtype=np.uint8)
        self.signs = np.array(signs, dtype=np.uint8)
        self.n_sites = self.x_bits.shape[1]
        if self.x_bits.shape != (self.n_sites, self.n_sites) or self.z_bits.shape != self.x_bits.shape:
            raise InvalidArgumentError("tableau needs N x N x and z blocks")
        if validate:
            self.check_invariants()

    @classmethod
    def from_basis_state(cls, bits: Sequence[int]) -> "StabilizerTableau":
        """Product basis state: generator i is (-1)^{bit_i} Z_i."""
        n_sites = len(bits)
        if n_sites < 1:
            raise InvalidArgumentError("at least one site is required")
        return cls(
            np.zeros((n_sites, n_sites), dtype=np.uint8),
            np.eye(n_sites, dtype=np.uint8),
            np.array(bits, dtype=np.uint8),
            validate=False,
        )

    @classmethod
    def domain_wall(cls, n_b: int) -> "StabilizerTableau":
        if n_b < 1:
            raise InvalidArgumentError(f"n_b must be >= 1, got {n_b}")
        return cls.from_basis_state([1] * n_b + [0] * n_b)

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.x_bits, self.z_bits, self.signs, validate=False)

    def check_invariants(self) -> None:
        """Rows commute pairwise and are independent."""
        x = self.x_bits.astype(np.int64)
        z = self.z_bits.astype(np.int64)
        products = (x @ z.T + z @ x.T) % 2
        if np.any(products):
            raise InvalidArgumentError("stabilizer generators do not commute")
        if gf2_rank(np.hstack([self.x_bits, self.z_bits])) != self.n_sites:
            raise InvalidArgumentError("stabilizer generators are not independent")

    def _check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise InvalidArgumentError(f"site {site} out of range for N={self.n_sites}")

    def apply_clifford2(self, gate: Clifford2, site_a: int, site_b: int) -> "StabilizerTableau":
        """
        Conjugate every generator through a two-qubit Clifford acting on (a, b).

        The gate's local index convention matches ``hilbert.apply_two_site``.
        """
        self._check_site(site_a)
        self._check_site(site_b)
        if site_a == site_b:
            raise InvalidArgumentError("two-qubit gate needs distinct sites")
        codes = (
            self.x_bits[:, site_a].astype(np.int64)
            + 2 * self.z_bits[:, site_a]
            + 4 * self.x_bits[:, site_b]
            + 8 * self.z_bits[:, site_b]
        )
        images = gate.images[codes]
        self.signs ^= gate.flips[codes]
        self.x_bits[:, site_a] = images & 1
        self.z_bits[:, site_a] = (images >> 1) & 1
        self.x_bits[:, site_b] = (images >> 2) & 1
        self.z_bits[:, site_b] = (images >> 3) & 1
        return self

    def canonical_form(self) -> "StabilizerTableau":
        """
        Equivalent generator set in reduced row-echelon form over (x | z),
        x columns first, with signs tracked through every row product.
        """
        x = self.x_bits.copy()
        z = self.z_bits.copy()
        signs = self.signs.copy()
        n_sites = self.n_sites
        row = 0
        for column in range(2 * n_sites):
            if row >= n_sites:
                break
            block = x if column < n_sites else z
            site = column % n_sites
            candidates = np.nonzero(block[row:, site])[0]
            if candidates.size == 0:
                continue
            pivot = row + int(candidates[0])
            if pivot != row:
                for array in (x, z, signs):
                    array[[row, pivot]] = array[[pivot, row]]
            targets = np.nonzero(block[:, site])[0]
            targets = targets[targets != row]
            if targets.size:
                _rowsum(x, z, signs, targets, row)
            row += 1
        return StabilizerTableau(x, z, signs, validate=False)

    @staticmethod
    def _pinned_values(canonical: "StabilizerTableau") -> np.ndarray:
        """Physical <sigma_z> per site read off a canonical tableau."""
        values = np.zeros(canonical.n_sites, dtype=np.int64)
        free = ~np.any(canonical.x_bits, axis=0)
        z_only = ~np.any(canonical.x_bits, axis=1)
        # Z_site is in the group iff some z-only row is exactly Z_site
        single = z_only & (canonical.z_bits.sum(axis=1) == 1)
        for row in np.nonzero(single)[0]:
            site = int(np.argmax(canonical.z_bits[row]))
            values[site] = 1 if canonical.signs[row] else -1
        missing = free & (values == 0)
        if np.any(missing):
            raise RuntimeError(f"sites {np.nonzero(missing)[0].tolist()} commute with the group but are not pinned")
        return values

    def z_expectation(self, site: int) -> int:
        """
        Physical <sigma_z> of ``site``: +1 or -1 when the site is pinned, 0 otherwise.
        """
        self._check_site(site)
        if np.any(self.x_bits[:, site]):
            return 0
        return int(self._pinned_values(self.canonical_form())[site])

    def magnetizations(self) -> np.ndarray:
        return self._pinned_values(self.canonical_form())

    def total_magnetization(self, sites: Optional[Sequence[int]] = None) -> int:
        values = self.magnetizations()
        return int(values.sum() if sites is None else values[list(sites)].sum())

    def battery_rank(self) -> int:
        """Number r of independent generators supported on the battery."""
        if self.n_sites % 2:
            raise InvalidArgumentError(f"charger/battery split needs an even number of sites, got {self.n_sites}")
        n_b = self.n_sites // 2
        charger = np.hstack([self.x_bits[:, :n_b], self.z_bits[:, :n_b]])
        return 2 * n_b - gf2_rank(charger)


def battery_rank(tab: StabilizerTableau) -> int:
    return tab.battery_rank()


def z_expectation(tab: StabilizerTableau, site: int) -> int:
    return tab.z_expectation(site)


def apply_clifford2(tab: StabilizerTableau, gate: Clifford2, sites: Tuple[int, int]) -> StabilizerTableau:
    return tab.apply_clifford2(gate, sites[0], sites[1])


# Rank-determined ergotropy ---------------------------------------------------------

def _check_rank(n_b: int, r: int) -> None:
    if n_b < 1:
        raise InvalidArgumentError(f"n_b must be >= 1, got {n_b}")
    if not 0 <= r <= n_b:
        raise InvalidArgumentError(f"rank must lie in [0, {n_b}], got {r}")


def passive_filling_level(n_b: int, r: int) -> int:
    """Smallest k* whose cumulative degeneracy covers the 2^{n_b - r} support."""
    _check_rank(n_b, r)
    support = 2 ** (n_b - r)
    cumulative = 0
    for k in range(n_b + 1):
        cumulative += math.comb(n_b, k)
        if cumulative >= support:
            return k
    return n_b


def clifford_passive_energy(n_b: int, r: int) -> Fraction:
    """Exact passive energy of the flat 2^{n_b - r} spectrum, sigma_z units."""
    _check_rank(n_b, r)
    support = 2 ** (n_b - r)
    k_star = passive_filling_level(n_b, r)
    filled = sum(math.comb(n_b, k) for k in range(k_star))
    energy = sum(math.comb(n_b, k) * (2 * k - n_b) for k in range(k_star))
    energy += (support - filled) * (2 * k_star - n_b)
    return Fraction(energy, support)


def clifford_ergotropy(n_b: int, r: int, total_mz: float) -> float:
    """
    Ergotropy of a stabilizer battery state from its rank and magnetization.

    Args:
        n_b: Battery size
        r: Battery stabilizer rank
        total_mz: Sum of battery <sigma_z> (the mean energy in sigma_z units)

    Returns:
        total_mz minus the flat-spectrum passive energy
    """
    _check_rank(n_b, r)
    if abs(total_mz) > n_b + 1e-9:
        raise InvalidArgumentError(f"|total_mz| must not exceed n_b={n_b}, got {total_mz}")
    return float(total_mz - float(clifford_passive_energy(n_b, r)))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1 - x) * math.log2(1 - x))


def inverse_binary_entropy(y: float, tolerance: float = 1e-12) -> float:
    """Branch of the binary-entropy inverse on [0, 1/2], by bisection."""
    if not 0.0 <= y <= 1.0:
        raise InvalidArgumentError(f"binary entropy values lie in [0, 1], got {y}")
    low, high = 0.0, 0.5
    while high - low > tolerance:
        middle = 0.5 * (low + high)
        if binary_entropy(middle) < y:
            low = middle
        else:
            high = middle
    return 0.5 * (low + high)


def asymptotic_ergotropy(n_b: int, r_inf: int) -> float:
    """Large-n_b ergotropy n_b [1 - 2 G^{-1}(1 - r/n_b)] fixed by the final rank."""
    _check_rank(n_b, r_inf)
    if r_inf == n_b:
        return float(n_b)
    if r_inf == 0:
        return 0.0
    return float(n_b * (1.0 - 2.0 * inverse_binary_entropy(1.0 - r_inf / n_b)))
