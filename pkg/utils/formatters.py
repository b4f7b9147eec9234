"""
Utility functions for formatting run records, sidecars and reports.
"""
import json
import logging
import math
import os
from dataclasses import asdict, is_dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

import markdown
import numpy as np
import pandas as pd

from simulation import __version__
from utils.config import config

logger = logging.getLogger(__name__)

MANDATORY_COLUMNS = ["t", "W", "E", "M2", "avgW", "avgE", "avgM2"]
PMAX_COLUMNS = ["h", "gamma", "initial_sre", "p_max", "argmax_k"]


class DataFormatter:
    """Handles tabular output and JSON-compatible conversion."""

    @staticmethod
    def to_jsonable(value: Any) -> Any:
        """Convert numpy scalars/arrays, enums and dataclasses into plain JSON values."""
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, dict):
            return {str(key): DataFormatter.to_jsonable(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [DataFormatter.to_jsonable(item) for item in value]
        if isinstance(value, np.ndarray):
            return [DataFormatter.to_jsonable(item) for item in value.tolist()]
        if isinstance(value, np.bool_):
            return bool(value)
        if isinstance(value, np.integer):
            return int(value)
        if isinstance(value, (np.floating, float)):
            return float(value)
        if is_dataclass(value) and not isinstance(value, type):
            return DataFormatter.to_jsonable(asdict(value))
        return value

    @staticmethod
    def record_to_frame(record) -> pd.DataFrame:
        """Mandatory columns first, then the record's extra per-time columns in insertion order."""
        frame = pd.DataFrame({
            "t": record.times,
            "W": record.W,
            "E": record.E,
            "M2": record.M2,
            "avgW": record.avgW,
            "avgE": record.avgE,
            "avgM2": record.avgM2,
        })
        for name, column in record.extra.items():
            if name in MANDATORY_COLUMNS:
                continue
            frame[name] = np.asarray(column, dtype=float)
        return frame

    @staticmethod
    def pmax_to_frame(records: List) -> pd.DataFrame:
        return pd.DataFrame([asdict(record) for record in records], columns=PMAX_COLUMNS)

    @staticmethod
    def write_csv(frame: pd.DataFrame, path: str) -> str:
        """Write with 17 significant digits so reruns compare byte for byte."""
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame.to_csv(path, index=False, float_format=config.get_output_config()["float_format"],
                     lineterminator="\n")
        return path

    @staticmethod
    def build_sidecar(output) -> Dict[str, Any]:
        """Self-describing metadata of a run; no wall-clock fields."""
        record = output.record
        sidecar = {
            "scenario": output.scenario.value,
            "config": output.config.model_dump(mode="json"),
            "seed": output.seed,
            "unit": output.config.unit.value,
            "stream_indices": list(record.stream_indices) if record is not None else [],
            "fits": output.fits,
            "diagnostics": output.diagnostics,
            "library_version": __version__,
        }
        if record is not None:
            sidecar["columns"] = list(DataFormatter.record_to_frame(record).columns)
        return DataFormatter.to_jsonable(sidecar)

    @staticmethod
    def write_sidecar(output, path: str) -> str:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(DataFormatter.build_sidecar(output), handle, indent=2, sort_keys=True)
            handle.write("\n")
        return path

    @staticmethod
    def run_name(output) -> str:
        """Deterministic file stem, e.g. ``brickwall-clifford_N10_seed7``."""
        exp_config = output.config
        scenario = output.scenario.value
        family = getattr(exp_config, "gate_family", None)
        if family is not None:
            scenario = f"{scenario}-{family.value}"
        return f"{scenario}_N{exp_config.n_sites}_seed{output.seed}"


class ReportFormatter:
    """Handles run report formatting and generation."""

    @staticmethod
    def _format_value(value: Any) -> str:
        if isinstance(value, float):
            return "inf" if math.isinf(value) else f"{value:.6g}"
        if isinstance(value, dict):
            return ", ".join(f"{key}={ReportFormatter._format_value(item)}" for key, item in value.items())
        return str(value)

    @staticmethod
    def format_markdown_report(output, csv_path: Optional[str] = None,
                               metadata: Optional[Dict[str, Any]] = None) -> str:
        """Format a run summary in Markdown."""
        metadata = metadata or {}
        exp_config = output.config
        report = f"""# Run Report: {DataFormatter.run_name(output)}

## Configuration

| Field | Value |
|-------|-------|
"""
        for key, value in exp_config.model_dump(mode="json").items():
            report += f"| {key} | {ReportFormatter._format_value(value)} |\n"

        report += "\n## Results\n\n"
        record = output.record
        if record is not None and len(record):
            report += f"- Time points: {len(record)}\n"
            report += f"- Final W: {record.W[-1]:.6g}\n"
            report += f"- Final E: {record.E[-1]:.6g}\n"
            report += f"- Final M2: {record.M2[-1]:.6g} bits\n"
            report += f"- Unit convention: {record.unit.value}\n"
        if output.pmax:
            best = max(output.pmax, key=lambda item: item.p_max)
            report += f"- Grid points: {len(output.pmax)}\n"
            report += f"- Largest P_max: {best.p_max:.6g} at h={best.h:g}, gamma={best.gamma:g} (k={best.argmax_k})\n"

        if output.fits:
            report += "\n## Fits\n\n"
            for name, fit in output.fits.items():
                report += f"- **{name}**: {ReportFormatter._format_value(DataFormatter.to_jsonable(fit))}\n"

        if output.diagnostics:
            report += "\n## Diagnostics\n\n"
            for name, value in output.diagnostics.items():
                report += f"- {name}: {ReportFormatter._format_value(DataFormatter.to_jsonable(value))}\n"

        report += f"""

---
*Report generated on {metadata.get('generated_at', datetime.now().strftime('%Y-%m-%d %H:%M:%S'))}*
*Data file: {csv_path or 'not written'}*
"""
        return report

    @staticmethod
    def markdown_to_html(markdown_content: str, output_path: str) -> bool:
        """Render a Markdown report to a standalone HTML file."""
        try:
            html_content = markdown.markdown(markdown_content, extensions=['tables', 'fenced_code'])

            styled_html = f"""<!DOCTYPE html>
<html>
<head>
    <meta charset="UTF-8">
    <style>
        body {{ font-family: Arial, sans-serif; margin: 40px; line-height: 1.6; }}
        h1 {{ color: #2c3e50; border-bottom: 2px solid #3498db; }}
        table {{ border-collapse: collapse; }}
        td, th {{ border: 1px solid #ecf0f1; padding: 4px 8px; }}
    </style>
</head>
<body>
{html_content}
</body>
</html>
"""
            directory = os.path.dirname(output_path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(output_path, "w", encoding="utf-8") as handle:
                handle.write(styled_html)
            return True

        except OSError as e:
            logger.error(f"Error writing HTML report: {e}")
            return False
