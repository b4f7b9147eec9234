import math

import numpy as np
import pytest

from simulation.analysis import (
    MIN_FIT_POINTS,
    collapse_deviation,
    fit_master_curve,
    fit_power_law,
    fit_tanh_power,
    fit_tanh_sum,
    growth_exponent,
    master_curve_rescale,
    onset_time,
    pearson,
    perturbative_predictions,
    tail_mean,
    tanh_power,
    tanh_sum,
    two_qubit_sre_of_work,
    two_qubit_trajectory,
)
from simulation.errors import InvalidArgumentError
from simulation.observables import RunRecord, block_state_model, steady_ergotropy_exact


def test_tanh_sum_fit_recovers_a_noiseless_curve():
    E = np.linspace(0.0, 2.0, 40)
    M2 = tanh_sum(E, 1.2, 1.5, 0.4, 0.8)
    fit = fit_tanh_sum(E, M2)
    assert fit.residual_sse < 1e-6
    assert fit.names == ("A", "B", "C", "D")
    assert "B_over_D" in fit.extras
    np.testing.assert_allclose(tanh_sum(E, *fit.parameters), M2, atol=1e-3)


def test_tanh_power_fit_recovers_a_noiseless_curve():
    E = np.linspace(0.0, 3.0, 30)
    M2 = tanh_power(E, 2.0, 0.7, 1.5)
    fit = fit_tanh_power(E, M2)
    assert fit.residual_sse < 1e-6
    a1, a2, a3 = fit.parameters
    assert a2 > 0 and a3 > 0
    assert a1 == pytest.approx(2.0, rel=1e-2)


def test_constant_series_is_reported_not_fit():
    E = np.linspace(0.0, 1.0, 10)
    assert not fit_tanh_sum(E, np.ones(10)).converged
    assert not fit_tanh_power(E, np.ones(10)).converged


def test_fits_need_enough_points():
    E = np.linspace(0.0, 1.0, MIN_FIT_POINTS - 1)
    with pytest.raises(InvalidArgumentError):
        fit_tanh_sum(E, E)


def test_fit_result_as_dict():
    E = np.linspace(0.0, 2.0, 20)
    result = fit_tanh_sum(E, tanh_sum(E, 1.0, 1.0, 0.5, 0.5)).as_dict()
    assert set(result["parameters"]) == {"A", "B", "C", "D"}
    assert isinstance(result["converged"], bool)


def test_power_law_on_block_state_values():
    sizes = [8, 12, 16, 20]
    values = [steady_ergotropy_exact(block_state_model(n)) for n in sizes]
    fit = fit_power_law(sizes, values)
    assert 0.5 <= fit.parameters[1] <= 0.7


def test_power_law_exact_exponent():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    fit = fit_power_law(x, 3.0 * x ** 1.5)
    assert fit.parameters == pytest.approx([3.0, 1.5])


def test_power_law_rejects_nonpositive_data():
    with pytest.raises(InvalidArgumentError):
        fit_power_law([1.0, 2.0], [1.0, -1.0])


def test_growth_exponent_window():
    times = np.linspace(0.0, 2.0, 41)
    values = times ** 2
    fit = growth_exponent(times, values, 0.1, 1.0)
    assert fit.parameters[1] == pytest.approx(2.0)
    with pytest.raises(InvalidArgumentError):
        growth_exponent(times, np.zeros_like(times), 0.1, 1.0)


def test_tail_mean():
    assert tail_mean(np.arange(10.0), fraction=0.2) == pytest.approx(8.5)


def test_master_curve_rescale_and_fit():
    times = np.linspace(0.0, 4.0, 30)
    E = np.linspace(0.0, 4.0, 30)
    M2 = 3.0 * (0.8 * np.tanh(E / 2.0) + 0.2 * np.tanh((E / 2.0) ** 2))
    record = RunRecord.from_series(times, np.zeros(30), E, M2)
    E_scaled, M2_scaled = master_curve_rescale(record, 3.0, 4)
    np.testing.assert_allclose(E_scaled, E / 2.0)
    fit = fit_master_curve(E_scaled, M2_scaled)
    assert fit.parameters == pytest.approx([0.8, 0.2], abs=1e-10)
    with pytest.raises(InvalidArgumentError):
        master_curve_rescale(record, 0.0, 4)


def test_collapse_deviation():
    x = np.linspace(0.0, 1.0, 11)
    assert collapse_deviation((x, x), (x, x + 0.1)) == pytest.approx(0.1)
    with pytest.raises(InvalidArgumentError):
        collapse_deviation((x, x), (x + 2.0, x))


def test_two_qubit_closed_forms():
    times = np.linspace(0.0, 2 * math.pi, 50)
    trajectory = two_qubit_trajectory(times)
    np.testing.assert_allclose(trajectory["W"], np.sin(times / 2) ** 2)
    np.testing.assert_allclose(trajectory["E"], np.clip(2 * trajectory["W"] - 1, 0, None))
    np.testing.assert_allclose(trajectory["M2"], -np.log2(1 - np.sin(times) ** 2 * np.cos(times) ** 2), atol=1e-12)
    assert two_qubit_sre_of_work(0.5) == pytest.approx(0.0)


def test_perturbative_predictions():
    prediction = perturbative_predictions(1.0, 0.2)
    assert prediction.valid
    assert prediction.W == pytest.approx(math.sin(0.1) ** 2)
    assert prediction.E == 0.0
    assert not perturbative_predictions(1.0, 2.0).valid


def test_pearson():
    x = np.arange(5.0)
    assert pearson(x, 2 * x + 1) == pytest.approx(1.0)
    with pytest.raises(InvalidArgumentError):
        pearson(x, np.ones(5))


def test_onset_time():
    times = np.array([0.0, 1.0, 2.0, 3.0])
    assert onset_time(times, [0.0, 0.0, 0.5, 1.0]) == 2.0
    assert onset_time(times, np.zeros(4)) is None
