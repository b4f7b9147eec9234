import math

import numpy as np
import pytest

from simulation.errors import InvalidArgumentError, SizeLimitError, UnitMismatchError
from simulation.hilbert import DensityMatrix, StateVector, apply_two_site, basis_state, domain_wall_state
from simulation.models import SpinUnit, build_battery_h
from simulation.observables import (
    PauliString,
    RunRecord,
    block_state_model,
    disorder_average,
    ensure_same_unit,
    ergotropy,
    observe,
    passive_energy,
    pauli_norm_sum,
    sre_fast,
    sre_naive,
    state_ergotropy,
    steady_ergotropy_abs_m,
    steady_ergotropy_exact,
    steady_ergotropy_gauss,
    stored_work,
    time_average,
)
from simulation.stabilizer import sample_clifford2

T_STATE = StateVector(1, np.array([1.0, np.exp(1j * np.pi / 4)]) / np.sqrt(2.0))


def _bell_pair() -> StateVector:
    amplitudes = np.zeros(4, dtype=complex)
    amplitudes[0b00] = amplitudes[0b11] = 1 / np.sqrt(2)
    return StateVector(2, amplitudes)


class TestPauliString:
    def test_label_round_trip(self):
        assert PauliString.from_label("XIZY").label == "XIZY"

    def test_unknown_letter(self):
        with pytest.raises(InvalidArgumentError):
            PauliString.from_label("XA")

    def test_matrices_are_hermitian(self):
        for label in ("X", "Y", "Z", "YX"):
            matrix = PauliString.from_label(label).matrix()
            np.testing.assert_allclose(matrix, matrix.conj().T, atol=1e-14)

    def test_computational_z_is_minus_physical_sigma_z(self):
        assert PauliString.from_label("Z").expectation(basis_state([1])) == pytest.approx(-1.0)
        assert PauliString.from_label("IZ").expectation(basis_state([1, 0])) == pytest.approx(1.0)


class TestSre:
    @pytest.mark.parametrize("state", [basis_state([0, 1, 1]), _bell_pair(), domain_wall_state(2)])
    def test_stabilizer_states_have_zero_magic(self, state):
        assert sre_fast(state).value == pytest.approx(0.0, abs=1e-12)

    def test_t_state_value(self):
        assert sre_fast(T_STATE).value == pytest.approx(math.log2(4.0 / 3.0))

    def test_additive_on_products(self):
        assert sre_fast(T_STATE.tensor(T_STATE)).value == pytest.approx(2 * math.log2(4.0 / 3.0))

    @pytest.mark.parametrize("alpha", [2.0, 3.0])
    def test_additive_on_random_products(self, random_state, alpha):
        for _ in range(5):
            psi, phi = random_state(4), random_state(3)
            joint = sre_fast(psi.tensor(phi), alpha).value
            assert joint == pytest.approx(sre_fast(psi, alpha).value + sre_fast(phi, alpha).value, abs=1e-8)

    def test_invariant_under_two_qubit_cliffords(self, rng, random_state):
        for _ in range(5):
            state = random_state(5)
            amplitudes = state.amplitudes
            for _ in range(30):
                site_a, site_b = rng.choice(5, size=2, replace=False)
                amplitudes = apply_two_site(amplitudes, sample_clifford2(rng).matrix, int(site_a), int(site_b))
            rotated = StateVector(5, amplitudes)
            assert sre_fast(rotated).value == pytest.approx(sre_fast(state).value, abs=1e-8)

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
    def test_fast_matches_naive(self, random_state, alpha):
        for n_sites in (1, 2, 3, 4):
            state = random_state(n_sites)
            assert sre_fast(state, alpha).value == pytest.approx(sre_naive(state, alpha).value, abs=1e-9)

    def test_threads_do_not_change_the_value(self, random_state):
        state = random_state(6)
        assert sre_fast(state, threads=4).value == pytest.approx(sre_fast(state).value, abs=1e-12)

    def test_pauli_norm_sum_is_dimension(self, random_state):
        assert pauli_norm_sum(random_state(4)) == pytest.approx(16.0)

    def test_alpha_validation(self):
        with pytest.raises(InvalidArgumentError):
            sre_fast(T_STATE, alpha=1.0)
        with pytest.raises(InvalidArgumentError):
            sre_naive(T_STATE, alpha=-1.0)

    def test_size_caps(self, random_state):
        with pytest.raises(SizeLimitError):
            sre_naive(random_state(4), max_sites=3)
        with pytest.raises(SizeLimitError):
            sre_fast(random_state(4), max_sites=3)


class TestErgotropy:
    def test_charged_and_empty_batteries(self):
        battery_h = build_battery_h(2, SpinUnit.HALF)
        assert state_ergotropy(domain_wall_state(2), battery_h) == pytest.approx(0.0)
        charged = basis_state([0, 0, 1, 1])
        assert state_ergotropy(charged, battery_h) == pytest.approx(2.0)
        assert state_ergotropy(charged, build_battery_h(2, SpinUnit.PAULI)) == pytest.approx(4.0)

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.8, 1.0])
    def test_single_qubit_mixture(self, p):
        rho = DensityMatrix(np.diag([1 - p, p]))
        assert ergotropy(rho, build_battery_h(1)) == pytest.approx(max(0.0, 2 * p - 1))

    def test_pure_battery_state_releases_all_energy_above_ground(self):
        amplitudes = np.zeros(4, dtype=complex)
        amplitudes[0b00] = amplitudes[0b10] = 1 / np.sqrt(2)
        state = StateVector(2, amplitudes)
        battery_h = build_battery_h(1)
        assert state_ergotropy(state, battery_h) == pytest.approx(0.5)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            ergotropy(DensityMatrix(np.eye(2) / 2), build_battery_h(2))

    def test_passive_energy_needs_sorted_inputs(self):
        with pytest.raises(InvalidArgumentError):
            passive_energy([0.2, 0.8], [-0.5, 0.5])

    def test_stored_work_relative_to_initial_energy(self):
        battery_h = build_battery_h(1)
        assert stored_work(basis_state([0, 1]), battery_h, -0.5) == pytest.approx(1.0)

    def test_observe_domain_wall(self):
        battery_h = build_battery_h(2)
        assert observe(domain_wall_state(2), battery_h, -1.0) == pytest.approx((0.0, 0.0, 0.0))


class TestAverages:
    def test_time_average_of_constant_and_ramp(self):
        times = np.linspace(0.0, 2.0, 21)
        np.testing.assert_allclose(time_average(times, np.full(21, 3.0)), 3.0)
        np.testing.assert_allclose(time_average(times, times)[1:], times[1:] / 2, atol=1e-12)

    def test_time_average_needs_zero_start(self):
        with pytest.raises(InvalidArgumentError):
            time_average([1.0, 2.0], [0.0, 1.0])

    def test_run_record_checks_lengths(self):
        with pytest.raises(InvalidArgumentError):
            RunRecord.from_series([0.0, 1.0], [0.0, 1.0], [0.0], [0.0, 0.0])

    def test_unit_mismatch(self):
        half = RunRecord.from_series([0.0, 1.0], [0, 1], [0, 1], [0, 1], unit=SpinUnit.HALF)
        pauli = RunRecord.from_series([0.0, 1.0], [0, 1], [0, 1], [0, 1], unit=SpinUnit.PAULI)
        assert ensure_same_unit(half, half) is SpinUnit.HALF
        with pytest.raises(UnitMismatchError):
            ensure_same_unit(half, pauli)

    def test_disorder_average(self):
        times = np.linspace(0.0, 1.0, 5)

        def run(rng, index):
            level = rng.normal()
            return RunRecord.from_series(times, np.full(5, level), np.zeros(5), np.ones(5),
                                         extra={"index": np.full(5, float(index))})

        first = disorder_average(run, 4, master_seed=42)
        second = disorder_average(run, 4, master_seed=42, threads=3)
        np.testing.assert_array_equal(first.mean.W, second.mean.W)
        assert first.mean.stream_indices == [0, 1, 2, 3]
        np.testing.assert_allclose(first.mean.extra["index"], 1.5)
        np.testing.assert_allclose(first.stderr["M2"], 0.0)
        levels = [sample.W[0] for sample in first.samples]
        assert first.stderr["W"][0] == pytest.approx(np.std(levels, ddof=1) / 2)
        assert "W_stderr" in first.mean.extra

    def test_disorder_average_needs_samples(self):
        with pytest.raises(InvalidArgumentError):
            disorder_average(lambda rng, index: None, 0, master_seed=1)


class TestBlockState:
    @pytest.mark.parametrize("n_sites, expected", [
        (4, 1.0 / 6.0), (8, 0.3), (12, 0.392857), (16, 0.465812), (20, 0.536832),
    ])
    def test_exact_steady_ergotropy(self, n_sites, expected):
        assert steady_ergotropy_exact(block_state_model(n_sites)) == pytest.approx(expected, abs=1e-6)

    def test_weights_are_normalized(self):
        model = block_state_model(10)
        assert model.weights.sum() == pytest.approx(1.0)
        assert model.populations().sum() == pytest.approx(1.0)

    def test_estimates(self):
        model = block_state_model(8)
        assert steady_ergotropy_abs_m(model) > 0
        assert steady_ergotropy_gauss(16) == pytest.approx(math.sqrt(16 / (4 * math.pi)))

    def test_block_model_needs_even_chain(self):
        with pytest.raises(InvalidArgumentError):
            block_state_model(5)
