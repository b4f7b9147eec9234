import numpy as np
import pytest

from simulation.errors import InvalidArgumentError
from simulation.models import (
    GateKind,
    HamiltonianSpec,
    ModelFamily,
    SpinUnit,
    battery_energy_diagonal,
    battery_levels,
    build_battery_h,
    build_charger_x,
    build_charging_h,
    build_csyk,
    build_gate2_h,
    build_xxz,
    build_xy,
    charger_energy_diagonal,
    commutator_norm,
    dimensionless_field,
    hermiticity_error,
    total_sz,
)


def test_battery_hamiltonian_in_both_units():
    np.testing.assert_allclose(build_battery_h(1, SpinUnit.HALF), [-0.5, 0.5])
    np.testing.assert_allclose(build_battery_h(2, SpinUnit.PAULI), [-2, 0, 0, 2])
    np.testing.assert_allclose(battery_levels(2, SpinUnit.HALF), [-1, 0, 0, 1])


def test_battery_hamiltonian_rejects_empty_battery():
    with pytest.raises(InvalidArgumentError):
        build_battery_h(0)


def test_embedded_battery_and_charger_energies_of_domain_wall():
    index = 0b0011
    assert battery_energy_diagonal(2)[index] == pytest.approx(-1.0)
    assert charger_energy_diagonal(2)[index] == pytest.approx(1.0)


@pytest.mark.parametrize("delta", [0.0, 0.5, 1.0, 2.0])
def test_xxz_is_hermitian_and_conserves_magnetization(delta):
    matrix = build_xxz(4, J=1.0, delta=delta)
    assert hermiticity_error(matrix) < 1e-12
    assert commutator_norm(matrix, total_sz(4)) < 1e-12


def test_xxz_two_sites_exchanges_domain_wall():
    matrix = build_xxz(2, J=1.0, delta=1.0)
    # -J/4 (XX + YY) couples |01> and |10> with amplitude -J/2
    assert matrix[0b01, 0b10] == pytest.approx(-0.5)


def test_sparse_and_dense_builders_agree():
    np.testing.assert_allclose(build_xxz(4, sparse=True).toarray(), build_xxz(4))
    np.testing.assert_allclose(build_charger_x(3, sparse=True).toarray(), build_charger_x(3))


def test_charging_hamiltonians_conserve_magnetization(rng):
    for family in (ModelFamily.XXZ, ModelFamily.CSYK):
        matrix = build_charging_h(family, 2, rng=rng, sparse=True)
        assert hermiticity_error(matrix) < 1e-12
        assert commutator_norm(matrix, total_sz(4)) < 1e-12


def test_charging_h_rejects_other_families():
    with pytest.raises(InvalidArgumentError):
        build_charging_h(ModelFamily.XY, 2)


def test_csyk_is_reproducible_from_seed():
    first, couplings = build_csyk(4, seed=3)
    second, _ = build_csyk(4, seed=3)
    np.testing.assert_allclose(first, second)
    assert hermiticity_error(first) < 1e-12
    assert couplings.value(1, 0, 0, 1) == pytest.approx(-couplings.value(0, 1, 0, 1))
    assert couplings.value(0, 1, 2, 3) == pytest.approx(np.conj(couplings.value(2, 3, 0, 1)))
    assert couplings.value(0, 0, 1, 2) == 0


def test_csyk_needs_four_sites():
    with pytest.raises(InvalidArgumentError):
        build_csyk(2, seed=0)


def test_xy_anisotropy_breaks_magnetization():
    isotropic = build_xy(4, gamma=0.0, h_prime=0.3)
    anisotropic = build_xy(4, gamma=1.0, h_prime=0.3)
    assert commutator_norm(isotropic, total_sz(4)) < 1e-12
    assert commutator_norm(anisotropic, total_sz(4)) > 1e-3
    assert hermiticity_error(anisotropic) < 1e-12


def test_gate_generators():
    diagonal = total_sz(2)
    assert commutator_norm(build_gate2_h(GateKind.ISING, 1.0), diagonal) > 1e-3
    assert commutator_norm(build_gate2_h(GateKind.XX, 1.0), diagonal) < 1e-12
    assert commutator_norm(build_gate2_h(GateKind.HEISENBERG, 1.0), diagonal) < 1e-12
    with pytest.raises(InvalidArgumentError):
        build_gate2_h(GateKind.XX, -1.0)


def test_dimensionless_field():
    assert dimensionless_field(1.0, 2.0) == pytest.approx(0.5)
    with pytest.raises(InvalidArgumentError):
        dimensionless_field(1.0, 0.0)


def test_hamiltonian_spec_builds_each_family():
    assert HamiltonianSpec(ModelFamily.BATTERY, 2).build().shape == (4, 4)
    assert HamiltonianSpec(ModelFamily.XXZ, 4, {"delta": 0.5}).build().shape == (16, 16)
    assert HamiltonianSpec(ModelFamily.XY, 3, {"gamma": 0.2}).build().shape == (8, 8)
    assert HamiltonianSpec(ModelFamily.GATE2, 2, {"kind": GateKind.XX}).build().shape == (4, 4)
    with pytest.raises(InvalidArgumentError):
        HamiltonianSpec(ModelFamily.GATE2, 3).build()
