"""
Exact continuous-time propagation, brick-wall random circuits and the pulsed
charging protocol.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from simulation.errors import InvalidArgumentError
from simulation.hilbert import (
    SIGMA_X,
    Spectrum,
    StateVector,
    apply_single_site,
    apply_two_site,
    hermitian_eig,
    sector_indices,
    state_sector,
)
from simulation.models import GateKind, build_gate2_h
from simulation.stabilizer import Clifford2, StabilizerTableau, sample_clifford2

logger = logging.getLogger(__name__)


# Continuous time -------------------------------------------------------------------

class Propagator:
    """
    Spectral propagator U(t) = V exp(-i L t) V^dagger of a Hermitian matrix.

    When ``sector`` is given (sorted basis indices closed under H) only that
    block is diagonalized; states must then live inside the sector.
    """

    def __init__(self, hamiltonian, sector: Optional[np.ndarray] = None):
        dim = hamiltonian.shape[0]
        if hamiltonian.shape != (dim, dim):
            raise InvalidArgumentError(f"Hamiltonian must be square, got shape {hamiltonian.shape}")
        self.dim = dim
        self.sector = None if sector is None else np.asarray(sector, dtype=np.int64)
        if self.sector is None:
            block = hamiltonian.toarray() if sp.issparse(hamiltonian) else np.asarray(hamiltonian)
        else:
            block = _restrict(hamiltonian, self.sector)
        self.spectrum: Spectrum = hermitian_eig(block)
        logger.debug(f"Propagator ready: dim={dim}, block={self.spectrum.dim}")

    def _project(self, amplitudes: np.ndarray) -> np.ndarray:
        if self.sector is None:
            return amplitudes
        outside = np.ones(self.dim, dtype=bool)
        outside[self.sector] = False
        if np.any(np.abs(amplitudes[outside]) > 1e-12):
            raise InvalidArgumentError("initial state has weight outside the propagation sector")
        return amplitudes[self.sector]

    def _embed(self, block_amplitudes: np.ndarray) -> np.ndarray:
        if self.sector is None:
            return block_amplitudes
        full = np.zeros(self.dim, dtype=complex)
        full[self.sector] = block_amplitudes
        return full

    def unitary(self, t: float) -> np.ndarray:
        """Dense U(t) on the propagated block."""
        vectors = self.spectrum.eigenvectors
        return (vectors * np.exp(-1j * self.spectrum.eigenvalues * t)) @ vectors.conj().T

    def evolve(self, psi0: StateVector, times: Sequence[float]) -> List[StateVector]:
        """
        States at every requested time.

        Args:
            psi0: Initial state
            times: Ascending, nonnegative times

        Returns:
            List of states, one per time
        """
        times = np.asarray(times, dtype=float)
        if psi0.dim != self.dim:
            raise InvalidArgumentError(f"state dimension {psi0.dim} does not match Hamiltonian {self.dim}")
        if times.size and (times[0] < 0 or np.any(np.diff(times) < 0)):
            raise InvalidArgumentError("times must be ascending and nonnegative")
        vectors = self.spectrum.eigenvectors
        coefficients = vectors.conj().T @ self._project(psi0.amplitudes)
        phases = np.exp(-1j * np.outer(times, self.spectrum.eigenvalues))
        blocks = (phases * coefficients[None, :]) @ vectors.T
        states = []
        for block in blocks:
            states.append(StateVector(psi0.n_sites, self._embed(block)))
        return states


def _restrict(hamiltonian, sector: np.ndarray) -> np.ndarray:
    """Dense block of H on ``sector``; H must not couple the sector to its complement."""
    if sp.issparse(hamiltonian):
        rows = hamiltonian.tocsr()[sector]
        row_weight = float(abs(rows).sum())
        block = rows[:, sector].toarray()
    else:
        rows = np.asarray(hamiltonian)[sector]
        row_weight = float(np.abs(rows).sum())
        block = rows[:, sector]
    if row_weight - np.abs(block).sum() > 1e-10 * max(1.0, row_weight):
        raise InvalidArgumentError("Hamiltonian couples the sector to states outside it")
    return block


def exact_evolve(hamiltonian, psi0: StateVector, times: Sequence[float],
                 sector: Optional[np.ndarray] = None) -> List[StateVector]:
    """psi(t_k) = V exp(-i L t_k) V^dagger psi0 for every grid time."""
    return Propagator(hamiltonian, sector=sector).evolve(psi0, times)


def magnetization_sector(psi0: StateVector) -> np.ndarray:
    """Basis indices of the magnetization sector holding ``psi0``."""
    n_up = state_sector(psi0)
    if n_up < 0:
        raise InvalidArgumentError("state is not confined to a single magnetization sector")
    return sector_indices(psi0.n_sites, n_up)


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """Uniform grid 0, dt, ..., t_max (inclusive, up to round-off)."""
    if dt <= 0 or t_max < 0:
        raise InvalidArgumentError("time grid needs dt > 0 and t_max >= 0")
    steps = int(round(t_max / dt))
    return dt * np.arange(steps + 1)


# Two-site gate samplers -------------------------------------------------------------

def _haar(rng: np.random.Generator, dim: int) -> np.ndarray:
    ginibre = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = scipy.linalg.qr(ginibre)
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))[None, :]


def sample_haar2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 4x4 unitary from a Ginibre draw with the R-diagonal phase fixed."""
    return _haar(rng, 4)


def sample_u1_haar2(rng: np.random.Generator) -> np.ndarray:
    """Magnetization-conserving 4x4 unitary: phases on |00>, |11> and Haar U(2) in between."""
    theta_0, theta_2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
    unitary = np.zeros((4, 4), dtype=complex)
    unitary[0, 0] = np.exp(1j * theta_0)
    unitary[3, 3] = np.exp(1j * theta_2)
    unitary[1:3, 1:3] = _haar(rng, 2)
    return unitary


def hamiltonian_gate(kind: GateKind, J_ij: float, tau: float = 1.0) -> np.ndarray:
    return scipy.linalg.expm(-1j * tau * build_gate2_h(kind, J_ij))


class GateFamily(str, Enum):
    HAAR = "haar"
    U1_HAAR = "u1_haar"
    CLIFFORD = "clifford"
    HAMILTONIAN = "hamiltonian"


Gate = Union[np.ndarray, Clifford2]


@dataclass
class GateSource:
    """
    Deterministic stream of two-site gates.

    ``kind``, ``J`` and ``tau`` only matter for Hamiltonian-generated gates,
    where J_ij ~ Uniform[0, J] is redrawn for every gate.
    """

    family: GateFamily
    rng: np.random.Generator = field(repr=False)
    kind: GateKind = GateKind.ISING
    J: float = 1.0
    tau: float = 1.0

    def draw(self) -> Gate:
        family = GateFamily(self.family)
        if family is GateFamily.HAAR:
            return sample_haar2(self.rng)
        if family is GateFamily.U1_HAAR:
            return sample_u1_haar2(self.rng)
        if family is GateFamily.CLIFFORD:
            return sample_clifford2(self.rng)
        return hamiltonian_gate(self.kind, float(self.rng.uniform(0.0, self.J)), self.tau)

    @property
    def conserves_magnetization(self) -> bool:
        family = GateFamily(self.family)
        return family is GateFamily.U1_HAAR or (
            family is GateFamily.HAMILTONIAN and GateKind(self.kind) is not GateKind.ISING
        )


class LayerParity(str, Enum):
    ODD = "odd"
    EVEN = "even"


def layer_bonds(n_sites: int, parity: LayerParity) -> List[Tuple[int, int]]:
    """
    Bonds of one brick-wall layer, 0-indexed.

    The odd pattern couples (1,2),(3,4),... and the even pattern (2,3),(4,5),...
    in 1-indexed site labels.
    """
    start = 0 if LayerParity(parity) is LayerParity.ODD else 1
    return [(site, site + 1) for site in range(start, n_sites - 1, 2)]


@dataclass
class CircuitSpec:
    n_sites: int
    depth: int
    gate_source: GateSource
    first_layer_parity: LayerParity = LayerParity.ODD

    def __post_init__(self):
        if self.n_sites % 2:
            raise InvalidArgumentError(f"brick-wall circuits need an even number of sites, got {self.n_sites}")
        if self.depth < 0:
            raise InvalidArgumentError(f"depth must be nonnegative, got {self.depth}")

    def parity_of_layer(self, layer: int) -> LayerParity:
        first = LayerParity(self.first_layer_parity)
        if layer % 2 == 0:
            return first
        return LayerParity.EVEN if first is LayerParity.ODD else LayerParity.ODD


def circuit_layers(circuit: CircuitSpec) -> Iterator[List[Tuple[Tuple[int, int], Gate]]]:
    """Yield each layer as (bond, gate) pairs, drawing gates in bond order."""
    for layer in range(circuit.depth):
        yield [(bond, circuit.gate_source.draw()) for bond in layer_bonds(circuit.n_sites, circuit.parity_of_layer(layer))]


def _gate_matrix(gate: Gate) -> np.ndarray:
    return gate.matrix if isinstance(gate, Clifford2) else gate


def apply_layer(amplitudes: np.ndarray, layer: List[Tuple[Tuple[int, int], Gate]]) -> np.ndarray:
    for (site_a, site_b), gate in layer:
        amplitudes = apply_two_site(amplitudes, _gate_matrix(gate), site_a, site_b)
    return amplitudes


def run_brickwall(circuit: CircuitSpec, psi0: StateVector, record_each_layer: bool = True,
                  tableau: Optional[StabilizerTableau] = None,
                  on_layer: Optional[Callable[[int, StateVector, Optional[StabilizerTableau]], None]] = None
                  ) -> List[StateVector]:
    """
    Run a brick-wall circuit on a state vector.

    Args:
        circuit: Circuit description including the gate stream
        psi0: Initial state
        record_each_layer: Return the state after every layer (else final only)
        tableau: Optional tableau updated with the same Clifford gates
        on_layer: Optional callback receiving (layer, state, tableau) after each layer

    Returns:
        States after each layer, or a single-element list with the final state
    """
    if psi0.n_sites != circuit.n_sites:
        raise InvalidArgumentError(f"state has {psi0.n_sites} sites, circuit expects {circuit.n_sites}")
    if tableau is not None and GateFamily(circuit.gate_source.family) is not GateFamily.CLIFFORD:
        raise InvalidArgumentError("a tableau can only follow Clifford circuits")

    amplitudes = psi0.amplitudes
    states: List[StateVector] = []
    for index, layer in enumerate(circuit_layers(circuit)):
        amplitudes = apply_layer(amplitudes, layer)
        if tableau is not None:
            for (site_a, site_b), gate in layer:
                tableau.apply_clifford2(gate, site_a, site_b)
        if record_each_layer or on_layer is not None:
            state = StateVector(circuit.n_sites, amplitudes)
            if record_each_layer:
                states.append(state)
            if on_layer is not None:
                on_layer(index + 1, state, tableau)
    if not record_each_layer:
        states.append(StateVector(circuit.n_sites, amplitudes))
    return states


def run_clifford_tableau(circuit: CircuitSpec, tableau: StabilizerTableau,
                         on_layer: Optional[Callable[[int, StabilizerTableau], None]] = None
                         ) -> StabilizerTableau:
    """Tableau-only Clifford brick-wall run for chains beyond statevector reach."""
    if GateFamily(circuit.gate_source.family) is not GateFamily.CLIFFORD:
        raise InvalidArgumentError("tableau-only runs need the Clifford gate family")
    if tableau.n_sites != circuit.n_sites:
        raise InvalidArgumentError(f"tableau has {tableau.n_sites} sites, circuit expects {circuit.n_sites}")
    for index, layer in enumerate(circuit_layers(circuit)):
        for (site_a, site_b), gate in layer:
            tableau.apply_clifford2(gate, site_a, site_b)
        if on_layer is not None:
            on_layer(index + 1, tableau)
    return tableau


# Pulsed charging -------------------------------------------------------------------

PULSE_ROTATION = scipy.linalg.expm(-1j * (np.pi / 4.0) * SIGMA_X)


def apply_pulse(amplitudes: np.ndarray) -> np.ndarray:
    """exp(-i (pi/4) sum_i sigma_x^i) as a product of single-site rotations."""
    n_sites = int(round(np.log2(amplitudes.size)))
    for site in range(n_sites):
        amplitudes = apply_single_site(amplitudes, PULSE_ROTATION, site)
    return amplitudes


def pulsed_charge(psi_gs: StateVector, pulses: int) -> List[StateVector]:
    """States after each of ``pulses`` applications of the pi/4 sigma_x pulse."""
    if pulses < 1:
        raise InvalidArgumentError(f"at least one pulse is required, got {pulses}")
    amplitudes = psi_gs.amplitudes
    states = []
    for _ in range(pulses):
        amplitudes = apply_pulse(amplitudes)
        states.append(StateVector(psi_gs.n_sites, amplitudes))
    return states
