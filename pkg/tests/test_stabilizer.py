import numpy as np
import pytest

from simulation.errors import InvalidArgumentError
from simulation.evolution import CircuitSpec, GateFamily, GateSource, run_brickwall
from simulation.hilbert import domain_wall_state, magnetization_profile, partial_trace_battery
from simulation.models import SpinUnit, build_battery_h
from simulation.observables import ergotropy
from simulation.stabilizer import (
    CLIFFORD2_ORDER,
    GENERATORS_2Q,
    SYMPLECTIC2_ORDER,
    Clifford2,
    StabilizerTableau,
    asymptotic_ergotropy,
    binary_entropy,
    clifford_ergotropy,
    clifford_group_tables,
    clifford_passive_energy,
    gf2_rank,
    inverse_binary_entropy,
    passive_filling_level,
    sample_clifford2,
)


def test_symplectic_enumeration_size():
    tables = clifford_group_tables()
    assert len(tables.representatives) == SYMPLECTIC2_ORDER
    assert SYMPLECTIC2_ORDER * 16 == CLIFFORD2_ORDER


def test_identity_fixes_every_pauli():
    identity = Clifford2.identity()
    assert all(identity.conjugate(code) == (code, 0) for code in range(16))


def test_sampled_clifford_is_unitary_and_locatable(rng):
    for _ in range(10):
        gate = sample_clifford2(rng)
        np.testing.assert_allclose(gate.matrix @ gate.matrix.conj().T, np.eye(4), atol=1e-12)
        assert Clifford2.from_matrix(gate.matrix).element_index == gate.element_index


def test_from_matrix_rejects_non_clifford():
    t_gate = np.diag([1, 1, 1, np.exp(1j * np.pi / 4)])
    with pytest.raises(InvalidArgumentError):
        Clifford2.from_matrix(t_gate)


def test_gf2_rank():
    assert gf2_rank(np.array([[1, 1], [1, 1]], dtype=np.uint8)) == 1
    assert gf2_rank(np.eye(3, dtype=np.uint8)) == 3


def test_domain_wall_tableau():
    tableau = StabilizerTableau.domain_wall(3)
    np.testing.assert_array_equal(tableau.magnetizations(), [1, 1, 1, -1, -1, -1])
    assert tableau.battery_rank() == 3
    assert tableau.total_magnetization(range(3, 6)) == -3


def test_non_commuting_generators_are_rejected():
    x_bits = np.array([[1, 0], [0, 0]])
    z_bits = np.array([[0, 0], [1, 0]])
    with pytest.raises(InvalidArgumentError):
        StabilizerTableau(x_bits, z_bits, np.zeros(2))


def test_hadamard_unpins_its_site():
    tableau = StabilizerTableau.from_basis_state([0, 0])
    tableau.apply_clifford2(Clifford2.from_matrix(GENERATORS_2Q["H_a"]), 0, 1)
    assert tableau.z_expectation(0) == 0
    assert tableau.z_expectation(1) == -1


def test_bell_pair_across_the_cut_has_zero_rank():
    tableau = StabilizerTableau.from_basis_state([0, 0])
    tableau.apply_clifford2(Clifford2.from_matrix(GENERATORS_2Q["H_a"]), 0, 1)
    tableau.apply_clifford2(Clifford2.from_matrix(GENERATORS_2Q["CNOT"]), 0, 1)
    assert tableau.battery_rank() == 0
    np.testing.assert_array_equal(tableau.magnetizations(), [0, 0])


def test_tableau_tracks_the_state_vector(rng):
    n_b = 3
    battery_h = build_battery_h(n_b, SpinUnit.PAULI)
    circuit = CircuitSpec(2 * n_b, 8, GateSource(GateFamily.CLIFFORD, rng))
    tableau = StabilizerTableau.domain_wall(n_b)
    checks = []

    def compare(layer, state, tab):
        profile = magnetization_profile(state)
        np.testing.assert_allclose(profile, tab.magnetizations(), atol=1e-9)
        rho = partial_trace_battery(state)
        rank = tab.battery_rank()
        mz = int(round(profile[n_b:].sum()))
        assert ergotropy(rho, battery_h) == pytest.approx(clifford_ergotropy(n_b, rank, mz), abs=1e-9)
        checks.append(layer)

    run_brickwall(circuit, domain_wall_state(n_b), record_each_layer=False, tableau=tableau, on_layer=compare)
    assert checks == list(range(1, 9))


def test_clifford_ergotropy_examples():
    assert clifford_ergotropy(3, 1, 0) == pytest.approx(1.5)
    assert clifford_ergotropy(2, 2, 2) == pytest.approx(4.0)
    assert clifford_ergotropy(2, 0, 0) == pytest.approx(0.0)


def test_clifford_ergotropy_rejects_bad_arguments():
    with pytest.raises(InvalidArgumentError):
        clifford_ergotropy(3, 4, 0)
    with pytest.raises(InvalidArgumentError):
        clifford_ergotropy(3, 1, 5)


def test_passive_energy_of_flat_spectrum():
    assert passive_filling_level(3, 1) == 1
    # four states: |000> at -3 and three at -1
    assert float(clifford_passive_energy(3, 1)) == pytest.approx(-1.5)


def test_binary_entropy_inverse():
    assert inverse_binary_entropy(binary_entropy(0.2)) == pytest.approx(0.2, abs=1e-9)
    assert binary_entropy(0.5) == pytest.approx(1.0)


def test_asymptotic_ergotropy_limits():
    assert asymptotic_ergotropy(8, 8) == 8.0
    assert asymptotic_ergotropy(8, 0) == 0.0


def test_asymptotic_ergotropy_approaches_the_exact_value():
    gaps = [abs(asymptotic_ergotropy(n, n // 2) - clifford_ergotropy(n, n // 2, 0.0)) / n
            for n in (16, 32, 64, 128)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.02
