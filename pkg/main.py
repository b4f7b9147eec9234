"""
Main orchestrator for the quantum battery toolkit.
"""
import logging
import os
from datetime import datetime
from typing import Any, Dict, Optional, Sequence

from experiments.brickwall_experiment import BrickwallExperiment
from experiments.config_models import Scenario
from experiments.csyk_experiment import CsykChargeExperiment
from experiments.records import ExperimentOutput
from experiments.xxz_experiment import XxzChargeExperiment
from experiments.xy_pulsed_experiment import XyPulsedExperiment
from simulation.oracles import ORACLES, run_oracle_suite
from utils.config import config
from utils.formatters import DataFormatter, ReportFormatter
from utils.run_index import RunIndex

logger = logging.getLogger(__name__)

QUICK_ORACLES = ["two_qubit_exactness", "asymptotic_convergence", "block_state", "clifford_ergotropy"]


class BatteryLab:
    """Main orchestrator for the quantum battery scenarios."""

    def __init__(self, run_index: Optional[RunIndex] = None):
        """Initialize the lab with one runner per scenario."""
        self.xxz_experiment = XxzChargeExperiment()
        self.csyk_experiment = CsykChargeExperiment()
        self.brickwall_experiment = BrickwallExperiment()
        self.xy_pulsed_experiment = XyPulsedExperiment()

        self.experiments = {
            Scenario.XXZ: self.xxz_experiment,
            Scenario.CSYK: self.csyk_experiment,
            Scenario.BRICKWALL: self.brickwall_experiment,
            Scenario.XY_PULSED: self.xy_pulsed_experiment,
        }
        self._run_index = run_index

        logger.info("Battery lab initialized with all scenario runners")

    @property
    def run_index(self) -> RunIndex:
        if self._run_index is None:
            self._run_index = RunIndex()
        return self._run_index

    def run_scenario(self, scenario: str, config_overrides: Optional[Dict[str, Any]] = None,
                     write_outputs: bool = True) -> Dict[str, Any]:
        """
        Run one scenario and stamp its outputs.

        Args:
            scenario: Scenario name (xxz, csyk, brickwall, xy-pulsed)
            config_overrides: Config fields for the scenario's schema
            write_outputs: Write CSV, sidecar, report and index entry

        Returns:
            Dictionary containing the ExperimentOutput, output paths and
            processing metadata, or ``error``/``error_type`` on failure
        """
        config_overrides = dict(config_overrides or {})
        start_time = datetime.now()

        try:
            scenario = Scenario(scenario)
        except ValueError:
            return {"error": f"Unknown scenario: {scenario}", "error_type": "config"}
        config_overrides["scenario"] = scenario.value

        logger.info(f"Step 1: Running {scenario.value} scenario...")
        result = self.experiments[scenario].process(config_overrides)
        if "error" in result:
            logger.error(f"Scenario {scenario.value} failed: {result['error']}")
            return result

        output: ExperimentOutput = result["output"]
        paths: Dict[str, str] = {}
        if write_outputs:
            logger.info("Step 2: Writing run outputs...")
            try:
                paths = self.write_outputs(output)
            except OSError as e:
                logger.error(f"Writing outputs failed: {e}")
                return {"error": f"Writing outputs failed: {e}", "error_type": "runtime"}

        end_time = datetime.now()
        duration = (end_time - start_time).total_seconds()
        logger.info(f"Scenario {scenario.value} completed in {duration:.2f} seconds")
        return {
            "scenario": scenario.value,
            "output": output,
            "config": result["config"],
            "paths": paths,
            "processing_metadata": {
                "start_time": start_time.isoformat(),
                "end_time": end_time.isoformat(),
                "duration_seconds": duration,
            },
        }

    def write_outputs(self, output: ExperimentOutput) -> Dict[str, str]:
        """CSV and JSON sidecar in the output dir, Markdown/HTML report in the reports dir, index entry."""
        output_config = config.get_output_config()
        output_dir = output.config.output_dir or output_config["output_dir"]
        stem = DataFormatter.run_name(output)

        if output.record is not None:
            frame = DataFormatter.record_to_frame(output.record)
        else:
            frame = DataFormatter.pmax_to_frame(output.pmax)
        paths = {
            "csv": DataFormatter.write_csv(frame, os.path.join(output_dir, f"{stem}.csv")),
            "sidecar": DataFormatter.write_sidecar(output, os.path.join(output_dir, f"{stem}.json")),
        }

        report = ReportFormatter.format_markdown_report(output, csv_path=paths["csv"])
        report_path = os.path.join(output_config["reports_dir"], f"{stem}.md")
        os.makedirs(os.path.dirname(report_path) or ".", exist_ok=True)
        with open(report_path, "w", encoding="utf-8") as handle:
            handle.write(report)
        paths["report"] = report_path
        html_path = os.path.splitext(report_path)[0] + ".html"
        if ReportFormatter.markdown_to_html(report, html_path):
            paths["html"] = html_path

        self.run_index.add(output.scenario.value, output.seed, output.config.n_sites, paths)
        return paths

    def get_experiment_info(self) -> Dict[str, Any]:
        """Get information about all runners in the lab."""
        return {scenario.value: runner.get_experiment_info() for scenario, runner in self.experiments.items()}

    def get_system_config(self) -> Dict[str, Any]:
        """Get the current system configuration."""
        return {
            **config.get_output_config(),
            **config.get_runner_config(),
            "log_level": config.log_level,
        }

    def validate_system(self, oracles: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        """
        Validate that the runners are constructed and the closed-form oracles pass.

        Args:
            oracles: Oracle names to run (all by default)

        Returns:
            Dictionary with ``overall_status`` (ready or error), per-oracle
            results, runner info and error messages
        """
        validation_results: Dict[str, Any] = {
            "overall_status": "unknown",
            "experiments": {},
            "oracles": {},
            "errors": []
        }

        for scenario, runner in self.experiments.items():
            try:
                validation_results["experiments"][scenario.value] = {
                    "status": "ready",
                    "info": runner.get_experiment_info()
                }
            except Exception as e:
                validation_results["experiments"][scenario.value] = {"status": "error", "error": str(e)}
                validation_results["errors"].append(f"Runner {scenario.value} error: {e}")

        unknown = [name for name in (oracles or []) if name not in ORACLES]
        if unknown:
            validation_results["errors"].append(f"Unknown oracles: {unknown}")
        selected = [name for name in (oracles or ORACLES) if name in ORACLES]
        for result in run_oracle_suite(selected) if selected else []:
            validation_results["oracles"][result.name] = {"passed": result.passed, "detail": result.detail}
            if not result.passed:
                validation_results["errors"].append(f"Oracle {result.name} failed: {result.detail}")

        validation_results["overall_status"] = "error" if validation_results["errors"] else "ready"
        return validation_results


def quick_run(scenario: str, **overrides) -> Dict[str, Any]:
    """
    Quick run for a single scenario with inline config values.

    Args:
        scenario: Scenario name
        **overrides: Config fields, e.g. ``n_sites=6, t_max=5.0``

    Returns:
        Run result dictionary
    """
    lab = BatteryLab()
    return lab.run_scenario(scenario, overrides)


# Example usage
if __name__ == "__main__":
    lab = BatteryLab()

    validation = lab.validate_system(QUICK_ORACLES)
    print("System Validation:", validation["overall_status"])

    if validation["overall_status"] == "ready":
        results = lab.run_scenario("xxz", {"n_sites": 6, "t_max": 5.0, "dt": 0.05})

        if "error" not in results:
            record = results["output"].record
            print("Run completed successfully!")
            print(f"Data saved to: {results['paths']['csv']}")
            print(f"Ergotropy onset: {results['output'].diagnostics['onset_time']}")
            print(f"Final W={record.W[-1]:.4f}, E={record.E[-1]:.4f}, M2={record.M2[-1]:.4f}")
        else:
            print(f"Run failed: {results['error']}")
    else:
        print("System validation failed:", validation["errors"])
