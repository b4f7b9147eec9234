import json

import numpy as np
import pandas as pd
import pytest

from experiments import PmaxRecord, XxzChargeExperiment, load_config
from experiments.records import ExperimentOutput
from simulation.models import SpinUnit
from simulation.observables import RunRecord
from utils.formatters import MANDATORY_COLUMNS, PMAX_COLUMNS, DataFormatter, ReportFormatter


@pytest.fixture
def xxz_output():
    return XxzChargeExperiment().process({"n_sites": 2, "t_max": 1.0, "dt": 0.1, "master_seed": 9,
                                          "threads": 1})["output"]


def test_record_frame_puts_mandatory_columns_first(xxz_output):
    frame = DataFormatter.record_to_frame(xxz_output.record)
    assert list(frame.columns[:7]) == MANDATORY_COLUMNS
    assert list(frame.columns[7:]) == ["mz_total", "energy_total"]
    assert len(frame) == 11


def test_csv_is_reproducible(tmp_path, xxz_output):
    frame = DataFormatter.record_to_frame(xxz_output.record)
    first = DataFormatter.write_csv(frame, str(tmp_path / "a" / "run.csv"))
    second = DataFormatter.write_csv(frame, str(tmp_path / "b" / "run.csv"))
    with open(first, "rb") as a, open(second, "rb") as b:
        assert a.read() == b.read()
    loaded = pd.read_csv(first, float_precision="round_trip")
    np.testing.assert_array_equal(loaded["W"].to_numpy(), xxz_output.record.W)


def test_sidecar_contents(tmp_path, xxz_output):
    path = DataFormatter.write_sidecar(xxz_output, str(tmp_path / "run.json"))
    with open(path, encoding="utf-8") as handle:
        sidecar = json.load(handle)
    assert sidecar["scenario"] == "xxz"
    assert sidecar["seed"] == 9
    assert sidecar["unit"] == "half"
    assert sidecar["config"]["n_sites"] == 2
    assert sidecar["columns"][:7] == MANDATORY_COLUMNS
    assert "library_version" in sidecar
    assert "completed_at" not in sidecar


def test_sidecar_is_deterministic(xxz_output):
    assert DataFormatter.build_sidecar(xxz_output) == DataFormatter.build_sidecar(xxz_output)


def test_to_jsonable_handles_numpy_and_enums():
    value = DataFormatter.to_jsonable({"a": np.float64(1.5), "b": np.arange(2), "c": SpinUnit.PAULI,
                                       "d": np.bool_(True), "e": (np.int64(3),)})
    assert value == {"a": 1.5, "b": [0, 1], "c": "pauli", "d": True, "e": [3]}
    assert json.dumps(value)


def test_pmax_frame():
    records = [PmaxRecord(h=0.0, gamma=1.0, initial_sre=0.1, p_max=0.5, argmax_k=2)]
    frame = DataFormatter.pmax_to_frame(records)
    assert list(frame.columns) == PMAX_COLUMNS
    assert frame.loc[0, "argmax_k"] == 2


def test_run_name():
    exp_config = load_config({"scenario": "brickwall", "n_sites": 10, "gate_family": "clifford",
                              "master_seed": 7})
    output = ExperimentOutput(exp_config.scenario, exp_config)
    assert DataFormatter.run_name(output) == "brickwall-clifford_N10_seed7"


def test_markdown_and_html_report(tmp_path, xxz_output):
    report = ReportFormatter.format_markdown_report(xxz_output, csv_path="run.csv",
                                                    metadata={"generated_at": "fixed"})
    assert report.startswith("# Run Report: xxz_N2_seed9")
    assert "| n_sites | 2 |" in report
    assert "## Diagnostics" in report
    assert "*Report generated on fixed*" in report

    html_path = tmp_path / "report.html"
    assert ReportFormatter.markdown_to_html(report, str(html_path))
    assert "<table>" in html_path.read_text(encoding="utf-8")


def test_report_for_empty_record():
    exp_config = load_config({"scenario": "xxz", "n_sites": 2, "master_seed": 1})
    record = RunRecord.from_series([0.0], [0.0], [0.0], [0.0])
    report = ReportFormatter.format_markdown_report(ExperimentOutput(exp_config.scenario, exp_config, record=record))
    assert "Final W" in report
