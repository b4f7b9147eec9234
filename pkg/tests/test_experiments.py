import math

import numpy as np
import pytest
from pydantic import ValidationError

from experiments import (
    BrickwallExperiment,
    CsykChargeExperiment,
    PmaxRecord,
    Scenario,
    XxzChargeExperiment,
    XyPulsedExperiment,
    load_config,
)
from experiments.config_models import BrickwallConfig, XxzChargeConfig, XyPulsedConfig
from experiments.xy_pulsed_experiment import non_injective_pair


class TestConfigModels:
    def test_load_config_applies_overrides(self):
        exp_config = load_config({"scenario": "xxz", "n_sites": 6}, {"n_sites": 4, "delta": None})
        assert isinstance(exp_config, XxzChargeConfig)
        assert exp_config.n_sites == 4
        assert exp_config.delta == 1.0
        assert exp_config.n_b == 2

    def test_scenario_is_required(self):
        with pytest.raises(ValueError):
            load_config({"n_sites": 4})

    def test_odd_chain_is_rejected(self):
        with pytest.raises(ValidationError):
            XxzChargeConfig(n_sites=5)

    def test_unknown_fields_are_rejected(self):
        with pytest.raises(ValidationError):
            load_config({"scenario": "xxz", "bogus": 1})

    def test_tableau_only_needs_clifford(self):
        with pytest.raises(ValidationError):
            BrickwallConfig(gate_family="haar", tableau_only=True)

    def test_default_field_grid(self):
        grid = XyPulsedConfig().h_grid()
        assert len(grid) == 101
        assert grid[0] == 0.0 and grid[-1] == 2.0
        with pytest.raises(ValidationError):
            XyPulsedConfig(h_min=1.0, h_max=0.5)

    def test_csyk_window_validation(self):
        with pytest.raises(ValidationError):
            load_config({"scenario": "csyk", "growth_window": [1.0, 0.5]})


class TestXxzCharge:
    def test_two_site_chain_follows_the_closed_form(self):
        result = XxzChargeExperiment().process({"n_sites": 2, "t_max": 6.0, "dt": 0.05, "master_seed": 1,
                                                "threads": 1})
        record = result["output"].record
        np.testing.assert_allclose(record.W, np.sin(record.times / 2) ** 2, atol=1e-9)
        np.testing.assert_allclose(record.E, np.clip(2 * record.W - 1, 0, None), atol=1e-9)
        assert result["output"].diagnostics["two_qubit_law_max_dev"] < 1e-8

    def test_four_site_run(self):
        output = XxzChargeExperiment().process({"n_sites": 4, "t_max": 2.0, "dt": 0.1, "master_seed": 3,
                                                "threads": 2})["output"]
        record = output.record
        assert len(record) == 21
        assert record.W[0] == pytest.approx(0.0, abs=1e-12) and record.E[0] == pytest.approx(0.0, abs=1e-12)
        assert np.all(record.E >= -1e-12)
        assert list(record.extra) == ["mz_total", "energy_total"]
        assert output.diagnostics["magnetization_drift"] < 1e-9
        assert output.diagnostics["energy_drift"] < 1e-9
        assert output.diagnostics["perturbative_max_dW"] < 5e-3
        assert output.diagnostics["max_E_before_onset"] == pytest.approx(0.0, abs=1e-6)

    def test_pauli_unit_doubles_the_work(self):
        runner = XxzChargeExperiment()
        common = {"n_sites": 4, "t_max": 1.0, "dt": 0.1, "master_seed": 0, "with_sre": False, "threads": 1}
        half = runner.process({**common, "unit": "half"})["output"].record
        pauli = runner.process({**common, "unit": "pauli"})["output"].record
        np.testing.assert_allclose(pauli.W, 2 * half.W, atol=1e-12)
        assert np.all(pauli.M2 == 0.0)

    def test_missing_seed_is_resolved(self):
        output = XxzChargeExperiment().process({"n_sites": 2, "t_max": 0.2, "dt": 0.1, "threads": 1})["output"]
        assert isinstance(output.seed, int)

    def test_size_cap(self):
        result = XxzChargeExperiment().process({"n_sites": 16, "master_seed": 0})
        assert result["error_type"] == "size"

    def test_invalid_config(self):
        result = XxzChargeExperiment().process({"n_sites": 3})
        assert result["error_type"] == "config"


class TestCsykCharge:
    CONFIG = {"n_sites": 4, "t_max": 1.0, "dt": 0.1, "n_disorder": 2, "master_seed": 11}

    def test_averaged_run_is_reproducible(self):
        runner = CsykChargeExperiment()
        first = runner.process({**self.CONFIG, "threads": 1})["output"]
        second = runner.process({**self.CONFIG, "threads": 2})["output"]
        np.testing.assert_allclose(first.record.W, second.record.W, atol=1e-12)
        np.testing.assert_allclose(first.record.M2, second.record.M2, atol=1e-12)
        assert first.record.stream_indices == [0, 1]
        assert "M2_stderr" in first.record.extra

    def test_conservation_and_fits(self):
        output = CsykChargeExperiment().process({**self.CONFIG, "threads": 1})["output"]
        assert output.diagnostics["magnetization_drift"] < 1e-9
        assert output.diagnostics["energy_drift"] < 1e-8
        assert "M2_sat" in output.diagnostics
        assert "tanh_sum" in output.fits

    def test_different_seeds_differ(self):
        runner = CsykChargeExperiment()
        first = runner.process({**self.CONFIG, "threads": 1})["output"]
        second = runner.process({**self.CONFIG, "master_seed": 12, "threads": 1})["output"]
        assert not np.allclose(first.record.W, second.record.W)


class TestBrickwall:
    def test_clifford_statevector_matches_rank_formula(self):
        output = BrickwallExperiment().process({
            "n_sites": 6, "gate_family": "clifford", "depth": 5, "n_circuits": 3, "master_seed": 2, "threads": 1,
        })["output"]
        record = output.record
        assert len(record) == 6
        np.testing.assert_allclose(record.E, record.extra["E_rank"], atol=1e-9)
        np.testing.assert_allclose(record.M2, 0.0, atol=1e-9)
        np.testing.assert_allclose(record.W, 0.5 * record.extra["W_pauli"], atol=1e-9)
        assert record.extra["rank"][0] == 3
        assert output.diagnostics["tableau_only"] is False

    def test_tableau_only_run(self):
        output = BrickwallExperiment().process({
            "n_sites": 20, "gate_family": "clifford", "depth": 6, "n_circuits": 2, "master_seed": 4,
            "tableau_only": True, "threads": 1,
        })["output"]
        assert output.diagnostics["tableau_only"] is True
        assert np.all(output.record.M2 == 0.0)
        assert output.record.extra["rank"][0] == 10
        assert "asymptotic_E" in output.diagnostics

    def test_large_clifford_chain_switches_to_tableau(self):
        output = BrickwallExperiment().process({
            "n_sites": 30, "gate_family": "clifford", "depth": 2, "n_circuits": 1, "master_seed": 5, "threads": 1,
        })["output"]
        assert output.diagnostics["tableau_only"] is True

    def test_u1_circuits_conserve_magnetization(self):
        output = BrickwallExperiment().process({
            "n_sites": 4, "gate_family": "u1_haar", "depth": 10, "n_circuits": 2, "master_seed": 6, "threads": 1,
        })["output"]
        assert output.diagnostics["magnetization_drift"] < 1e-9
        assert output.diagnostics["log2_binomial"] == pytest.approx(math.log2(6))
        assert "M2_sat" in output.diagnostics

    def test_haar_without_sre(self):
        output = BrickwallExperiment().process({
            "n_sites": 4, "depth": 3, "n_circuits": 2, "master_seed": 7, "with_sre": False, "threads": 1,
        })["output"]
        assert "E_late" in output.diagnostics
        assert "magnetization_drift" not in output.diagnostics
        assert np.all(output.record.M2 == 0.0)

    def test_non_clifford_beyond_cap(self):
        result = BrickwallExperiment().process({"n_sites": 16, "depth": 1, "n_circuits": 1, "master_seed": 0})
        assert result["error_type"] == "size"


class TestXyPulsed:
    CONFIG = {"n_sites": 4, "gammas": [0.5, 1.0], "h_min": 0.2, "h_max": 1.2, "h_step": 0.5, "k_max": 8,
              "master_seed": 0}

    def test_sweep_produces_one_record_per_point(self):
        output = XyPulsedExperiment().process({**self.CONFIG, "threads": 2})["output"]
        assert len(output.pmax) == 6
        assert [r.gamma for r in output.pmax] == [0.5] * 3 + [1.0] * 3
        assert all(1 <= r.argmax_k <= 8 for r in output.pmax)
        assert all(r.p_max >= -1e-12 and r.initial_sre >= -1e-12 for r in output.pmax)
        assert set(output.diagnostics) == {"gamma=0.5", "gamma=1"}

    def test_threads_do_not_change_the_sweep(self):
        runner = XyPulsedExperiment()
        first = runner.process({**self.CONFIG, "threads": 1})["output"]
        second = runner.process({**self.CONFIG, "threads": 3})["output"]
        for a, b in zip(first.pmax, second.pmax):
            assert (a.h, a.gamma, a.argmax_k) == (b.h, b.gamma, b.argmax_k)
            assert a.p_max == pytest.approx(b.p_max, abs=1e-12)
            assert a.initial_sre == pytest.approx(b.initial_sre, abs=1e-12)

    def test_chain_cap(self):
        result = XyPulsedExperiment().process({**self.CONFIG, "n_sites": 14})
        assert result["error_type"] == "size"

    def test_non_injective_pair(self):
        records = [
            PmaxRecord(h=0.0, gamma=1.0, initial_sre=1.00, p_max=1.0, argmax_k=1),
            PmaxRecord(h=0.5, gamma=1.0, initial_sre=0.50, p_max=1.0, argmax_k=1),
            PmaxRecord(h=1.0, gamma=1.0, initial_sre=0.98, p_max=0.5, argmax_k=2),
        ]
        witness = non_injective_pair(records)
        assert witness["h_a"] == 0.0 and witness["h_b"] == 1.0
        assert non_injective_pair(records[:2]) is None


def test_runner_info():
    info = BrickwallExperiment().get_experiment_info()
    assert info["scenario"] == Scenario.BRICKWALL.value
    assert info["type"] == "BrickwallExperiment"
