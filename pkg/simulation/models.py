"""
Hamiltonian builders for the battery, the charger and every charging model.

Matrices act on the little-endian basis described in ``simulation.hilbert``.
Builders return dense arrays by default; ``sparse=True`` returns a CSR matrix
so that large chains can be reduced to a magnetization sector before any
dense algebra happens.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp

from simulation.errors import InvalidArgumentError
from simulation.hilbert import (
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
)

logger = logging.getLogger(__name__)

Matrix = Union[np.ndarray, sp.csr_matrix]


class SpinUnit(str, Enum):
    """Coefficient multiplying sigma_z in the battery and charger Hamiltonians."""

    HALF = "half"
    PAULI = "pauli"

    @property
    def scale(self) -> float:
        return 0.5 if self is SpinUnit.HALF else 1.0


class ModelFamily(str, Enum):
    BATTERY = "battery"
    CHARGER_Z = "charger_z"
    CHARGER_X = "charger_x"
    XXZ = "xxz"
    CSYK = "csyk"
    XY = "xy"
    GATE2 = "gate2"


class GateKind(str, Enum):
    ISING = "ising"
    XX = "xx"
    HEISENBERG = "heisenberg"


# Sparse single-site helpers ----------------------------------------------------

def _sparse_site(single: np.ndarray, site: int, n_sites: int) -> sp.csr_matrix:
    left = sp.identity(2 ** (n_sites - 1 - site), dtype=complex, format="csr")
    right = sp.identity(2 ** site, dtype=complex, format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(single)), right, format="csr")


def _sparse_bond(op_a: np.ndarray, op_b: np.ndarray, site_a: int, site_b: int, n_sites: int) -> sp.csr_matrix:
    return (_sparse_site(op_a, site_a, n_sites) @ _sparse_site(op_b, site_b, n_sites)).tocsr()


def _finish(matrix: sp.spmatrix, sparse: bool) -> Matrix:
    matrix = sp.csr_matrix(matrix)
    return matrix if sparse else matrix.toarray()


def _spin_signs(n_sites: int) -> np.ndarray:
    """Matrix of shape (2^n, n) holding 2*bit - 1 for every basis index and site."""
    indices = np.arange(2 ** n_sites)[:, None]
    return 2 * ((indices >> np.arange(n_sites)[None, :]) & 1) - 1


# Battery and charger -----------------------------------------------------------

def build_battery_h(n_b: int, unit: SpinUnit = SpinUnit.HALF) -> np.ndarray:
    """
    Diagonal of H_B = unit.scale * sum_i sigma_z^i in the battery basis.

    Args:
        n_b: Number of battery spins
        unit: Energy unit convention

    Returns:
        Real vector of length 2^n_b (battery bit j <-> chain site n_b + j)
    """
    if n_b < 1:
        raise InvalidArgumentError(f"n_b must be >= 1, got {n_b}")
    return SpinUnit(unit).scale * _spin_signs(n_b).sum(axis=1).astype(float)


def battery_energy_diagonal(n_b: int, unit: SpinUnit = SpinUnit.HALF) -> np.ndarray:
    """H_B embedded in the full 2n_b-site chain (battery occupies the high bits)."""
    return np.repeat(build_battery_h(n_b, unit), 2 ** n_b)


def charger_energy_diagonal(n_b: int, unit: SpinUnit = SpinUnit.HALF) -> np.ndarray:
    """H_C = unit.scale * sum over charger sites of sigma_z, on the full chain."""
    return np.tile(build_battery_h(n_b, unit), 2 ** n_b)


def battery_levels(n_b: int, unit: SpinUnit = SpinUnit.HALF) -> np.ndarray:
    """Ascending battery levels expanded with their degeneracies."""
    return np.sort(build_battery_h(n_b, unit))


def build_charger_x(n_sites: int, sparse: bool = False) -> Matrix:
    """H_C = sum_i sigma_x^i on every site (pulsed protocol driving term)."""
    if n_sites < 1:
        raise InvalidArgumentError(f"n_sites must be >= 1, got {n_sites}")
    total = sp.csr_matrix((2 ** n_sites, 2 ** n_sites), dtype=complex)
    for site in range(n_sites):
        total = total + _sparse_site(SIGMA_X, site, n_sites)
    return _finish(total, sparse)


def total_sz(n_sites: int) -> np.ndarray:
    """Diagonal of M_z = sum_i sigma_z^i."""
    return _spin_signs(n_sites).sum(axis=1).astype(float)


# Interactions --------------------------------------------------------------------

def build_xxz(n_sites: int, J: float = 1.0, delta: float = 1.0, sparse: bool = False) -> Matrix:
    """
    Open-chain XXZ coupling -J sum_i [S_x S_x + S_y S_y + delta S_z S_z] with S = sigma / 2.

    Args:
        n_sites: Chain length N (>= 2)
        J: Exchange coupling
        delta: Anisotropy (1 is the isotropic point)
        sparse: Return CSR instead of a dense array

    Returns:
        Hermitian matrix of dimension 2^N
    """
    if n_sites < 2:
        raise InvalidArgumentError(f"XXZ chain needs at least 2 sites, got {n_sites}")
    total = sp.csr_matrix((2 ** n_sites, 2 ** n_sites), dtype=complex)
    for site in range(n_sites - 1):
        bond = (
            _sparse_bond(SIGMA_X, SIGMA_X, site, site + 1, n_sites)
            + _sparse_bond(SIGMA_Y, SIGMA_Y, site, site + 1, n_sites)
            + delta * _sparse_bond(SIGMA_Z, SIGMA_Z, site, site + 1, n_sites)
        )
        total = total + (-J / 4.0) * bond
    return _finish(total, sparse)


def build_xy(n_sites: int, J_prime: float = 1.0, gamma: float = 0.0, h_prime: float = 0.0,
             sparse: bool = False) -> Matrix:
    """Anisotropic XY chain (J'/4) sum [(1+g) XX + (1-g) YY] + (h'/2) sum Z, open boundary."""
    if n_sites < 2:
        raise InvalidArgumentError(f"XY chain needs at least 2 sites, got {n_sites}")
    total = sp.csr_matrix((2 ** n_sites, 2 ** n_sites), dtype=complex)
    for site in range(n_sites - 1):
        total = total + (J_prime / 4.0) * (
            (1 + gamma) * _sparse_bond(SIGMA_X, SIGMA_X, site, site + 1, n_sites)
            + (1 - gamma) * _sparse_bond(SIGMA_Y, SIGMA_Y, site, site + 1, n_sites)
        )
    total = total + sp.diags((h_prime / 2.0) * total_sz(n_sites)).astype(complex)
    return _finish(total, sparse)


def dimensionless_field(h_prime: float, J_prime: float) -> float:
    """h = h' / J'."""
    if J_prime == 0:
        raise InvalidArgumentError("J' must be nonzero to define h = h'/J'")
    return h_prime / J_prime


def build_gate2_h(kind: GateKind, J_ij: float) -> np.ndarray:
    """Two-site gate generator for the Hamiltonian-generated circuit families."""
    if J_ij < 0:
        raise InvalidArgumentError(f"J_ij must be nonnegative, got {J_ij}")
    kind = GateKind(kind)
    terms = [np.kron(SIGMA_X, SIGMA_X)]
    if kind in (GateKind.XX, GateKind.HEISENBERG):
        terms.append(np.kron(SIGMA_Y, SIGMA_Y))
    if kind is GateKind.HEISENBERG:
        terms.append(np.kron(SIGMA_Z, SIGMA_Z))
    return J_ij * sum(terms)


# Complex SYK ---------------------------------------------------------------------

@dataclass(frozen=True)
class CsykCouplings:
    """
    Complex couplings J_{ij,kl} over ordered pairs i<j, k<l.

    ``matrix[a, b]`` holds J for pair ``pairs[a]`` (creation) and ``pairs[b]``
    (annihilation); it is Hermitian so J_{kl,ij} = conj(J_{ij,kl}).
    """

    n_sites: int
    pairs: Tuple[Tuple[int, int], ...]
    matrix: np.ndarray = field(repr=False)
    variance: float = 1.0

    def value(self, i: int, j: int, k: int, l: int) -> complex:
        """J_{ij,kl} for any index order, applying the antisymmetry relations."""
        if i == j or k == l:
            return 0j
        sign = 1
        if i > j:
            i, j, sign = j, i, -sign
        if k > l:
            k, l, sign = l, k, -sign
        index = {pair: position for position, pair in enumerate(self.pairs)}
        return sign * complex(self.matrix[index[(i, j)], index[(k, l)]])

    @property
    def values(self) -> Dict[Tuple[int, int, int, int], complex]:
        return {
            (i, j, k, l): complex(self.matrix[a, b])
            for a, (i, j) in enumerate(self.pairs)
            for b, (k, l) in enumerate(self.pairs)
        }


def ordered_pairs(n_sites: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(n_sites) for j in range(i + 1, n_sites)]


def sample_csyk_couplings(n_sites: int, J: float, rng: np.random.Generator) -> CsykCouplings:
    """
    Draw couplings on the canonical set (i,j) <= (k,l); the rest follow by symmetry.

    Diagonal pairs are real with variance J^2, off-diagonal entries carry real
    and imaginary parts of variance J^2 / 2 each.
    """
    pairs = ordered_pairs(n_sites)
    count = len(pairs)
    width = J / np.sqrt(2.0)
    draws = rng.normal(0.0, width, size=(count, count)) + 1j * rng.normal(0.0, width, size=(count, count))
    upper = np.triu(draws, k=1)
    matrix = upper + upper.conj().T
    matrix[np.diag_indices(count)] = rng.normal(0.0, J, size=count)
    return CsykCouplings(n_sites=n_sites, pairs=tuple(pairs), matrix=matrix, variance=J ** 2)


def jordan_wigner_creators(n_sites: int) -> List[sp.csr_matrix]:
    """c^dagger_j = sigma^+_j prod_{m<j} sigma_z^m for every mode (CSR)."""
    signs = _spin_signs(n_sites)
    creators = []
    for site in range(n_sites):
        string = np.prod(signs[:, :site], axis=1) if site else np.ones(2 ** n_sites)
        creators.append((_sparse_site(SIGMA_PLUS, site, n_sites) @ sp.diags(string.astype(complex))).tocsr())
    return creators


def jordan_wigner_annihilators(n_sites: int) -> List[sp.csr_matrix]:
    return [creator.conj().T.tocsr() for creator in jordan_wigner_creators(n_sites)]


def build_csyk(n_sites: int, J: float = 1.0, seed: Optional[int] = None,
               rng: Optional[np.random.Generator] = None,
               sparse: bool = False) -> Tuple[Matrix, CsykCouplings]:
    """
    Complex SYK interaction (1/sqrt(N^3)) sum J_{ij,kl} c+_i c+_j c_k c_l.

    Args:
        n_sites: Number of modes / spins (>= 4)
        J: Coupling standard deviation
        seed: Seed used when no generator is given
        rng: Explicit generator (takes precedence over ``seed``)
        sparse: Return CSR instead of a dense array

    Returns:
        Tuple of (Hamiltonian, couplings)
    """
    if n_sites < 4:
        raise InvalidArgumentError(f"cSYK needs at least 4 sites, got {n_sites}")
    generator = rng if rng is not None else np.random.default_rng(seed)
    couplings = sample_csyk_couplings(n_sites, J, generator)

    creators = jordan_wigner_creators(n_sites)
    raised = [(creators[i] @ creators[j]).tocsr() for i, j in couplings.pairs]
    # c_k c_l = -(c+_k c+_l)^dagger for k < l
    lowered = [-pair.conj().T.tocsr() for pair in raised]

    dim = 2 ** n_sites
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for a, creation in enumerate(raised):
        row = couplings.matrix[a]
        annihilation = sp.csr_matrix((dim, dim), dtype=complex)
        for b, lowering in enumerate(lowered):
            if row[b] != 0:
                annihilation = annihilation + row[b] * lowering
        total = total + creation @ annihilation
    total = total / np.sqrt(float(n_sites) ** 3)
    logger.debug(f"Built cSYK Hamiltonian: N={n_sites}, nnz={total.nnz}")
    return _finish(total, sparse), couplings


# Composite charging Hamiltonian ------------------------------------------------

def build_charging_h(family: ModelFamily, n_b: int, unit: SpinUnit = SpinUnit.HALF,
                     J: float = 1.0, delta: float = 1.0, seed: Optional[int] = None,
                     rng: Optional[np.random.Generator] = None,
                     sparse: bool = False) -> Matrix:
    """
    H_t = H_B + H_C + H_BC on the full 2 n_b-site chain.

    Args:
        family: ``ModelFamily.XXZ`` or ``ModelFamily.CSYK``
        n_b: Battery size
        unit: Unit convention for H_B and H_C
        J: Interaction scale
        delta: XXZ anisotropy
        seed: cSYK disorder seed
        rng: cSYK disorder generator
        sparse: Return CSR instead of a dense array

    Returns:
        Hermitian matrix of dimension 2^(2 n_b)
    """
    family = ModelFamily(family)
    n_sites = 2 * n_b
    if family is ModelFamily.XXZ:
        interaction = build_xxz(n_sites, J, delta, sparse=True)
    elif family is ModelFamily.CSYK:
        interaction, _ = build_csyk(n_sites, J, seed=seed, rng=rng, sparse=True)
    else:
        raise InvalidArgumentError(f"no charging Hamiltonian for family {family.value}")
    local = battery_energy_diagonal(n_b, unit) + charger_energy_diagonal(n_b, unit)
    return _finish(interaction + sp.diags(local.astype(complex)), sparse)


@dataclass
class HamiltonianSpec:
    """Parameterized description of a model family; ``build`` produces the matrix."""

    family: ModelFamily
    n_sites: int
    parameters: Dict[str, Any] = field(default_factory=dict)

    def build(self, sparse: bool = False) -> Matrix:
        family = ModelFamily(self.family)
        p = self.parameters
        unit = SpinUnit(p.get("unit", SpinUnit.HALF))
        if family is ModelFamily.BATTERY:
            return np.diag(build_battery_h(self.n_sites, unit)).astype(complex)
        if family is ModelFamily.CHARGER_Z:
            return np.diag(build_battery_h(self.n_sites, unit)).astype(complex)
        if family is ModelFamily.CHARGER_X:
            return build_charger_x(self.n_sites, sparse=sparse)
        if family is ModelFamily.XXZ:
            return build_xxz(self.n_sites, p.get("J", 1.0), p.get("delta", 1.0), sparse=sparse)
        if family is ModelFamily.CSYK:
            matrix, _ = build_csyk(self.n_sites, p.get("J", 1.0), seed=p.get("seed"), sparse=sparse)
            return matrix
        if family is ModelFamily.XY:
            return build_xy(self.n_sites, p.get("J_prime", 1.0), p.get("gamma", 0.0),
                            p.get("h_prime", 0.0), sparse=sparse)
        if self.n_sites != 2:
            raise InvalidArgumentError("gate generators act on exactly 2 sites")
        return build_gate2_h(p.get("kind", GateKind.ISING), p.get("J", 1.0))


def hermiticity_error(matrix: Matrix) -> float:
    difference = matrix - matrix.conj().T
    if sp.issparse(difference):
        return float(abs(difference).max()) if difference.nnz else 0.0
    return float(np.max(np.abs(difference), initial=0.0))


def commutator_norm(matrix: Matrix, diagonal: np.ndarray) -> float:
    """Max-abs entry of [H, diag(d)], used for U(1) checks."""
    if sp.issparse(matrix):
        coo = matrix.tocoo()
        values = coo.data * (diagonal[coo.col] - diagonal[coo.row])
        return float(np.max(np.abs(values), initial=0.0))
    return float(np.max(np.abs(matrix * (diagonal[None, :] - diagonal[:, None])), initial=0.0))
