"""
Configuration management for the quantum battery toolkit.
"""
import os
from typing import Dict
from dotenv import load_dotenv
import logging

# Load environment variables
load_dotenv()


class Config:
    """Configuration class for simulation runs."""

    def __init__(self):
        # Output locations
        self.output_dir = os.getenv("QB_OUTPUT_DIR", "./runs")
        self.reports_dir = os.getenv("QB_REPORTS_DIR", "./reports")
        self.run_index_path = os.getenv("QB_RUN_INDEX", "./data/run_index.json")

        # Worker pool
        self.threads = int(os.getenv("QB_THREADS", str(os.cpu_count() or 1)))

        # Numerics
        self.default_dt = float(os.getenv("QB_DEFAULT_DT", "0.05"))

        # Size caps
        self.max_sites_sre = int(os.getenv("QB_MAX_SITES_SRE", "14"))
        self.max_sites_statevector = int(os.getenv("QB_MAX_SITES_STATEVECTOR", "16"))
        self.max_sites_tableau = int(os.getenv("QB_MAX_SITES_TABLEAU", "256"))
        self.max_sites_naive_sre = int(os.getenv("QB_MAX_SITES_NAIVE_SRE", "8"))

        # Ensembles
        self.csyk_samples = int(os.getenv("QB_CSYK_SAMPLES", "8"))

        # Logging
        self.log_level = os.getenv("QB_LOG_LEVEL", "INFO").upper()
        self.log_file = os.getenv("QB_LOG_FILE", "./logs/quantum_battery.log")

        # Validate configuration
        self._validate_config()

        # Setup logging
        self._setup_logging()

    def _validate_config(self):
        """Validate that configuration values are consistent."""
        caps = {
            "QB_MAX_SITES_SRE": self.max_sites_sre,
            "QB_MAX_SITES_STATEVECTOR": self.max_sites_statevector,
            "QB_MAX_SITES_TABLEAU": self.max_sites_tableau,
            "QB_MAX_SITES_NAIVE_SRE": self.max_sites_naive_sre,
        }
        for name, value in caps.items():
            if value < 2:
                raise ValueError(f"{name} must be at least 2, got {value}")

        if self.default_dt <= 0:
            raise ValueError(f"QB_DEFAULT_DT must be positive, got {self.default_dt}")

        if self.threads < 1:
            raise ValueError(f"QB_THREADS must be at least 1, got {self.threads}")

        if self.csyk_samples < 1:
            raise ValueError(f"QB_CSYK_SAMPLES must be at least 1, got {self.csyk_samples}")

        if not isinstance(getattr(logging, self.log_level, None), int):
            raise ValueError(f"QB_LOG_LEVEL is not a logging level: {self.log_level}")

    def _setup_logging(self):
        """Setup logging configuration."""
        # Create logs directory if it doesn't exist
        log_dir = os.path.dirname(self.log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)

        logging.basicConfig(
            level=getattr(logging, self.log_level),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            handlers=[
                logging.FileHandler(self.log_file),
                logging.StreamHandler()
            ]
        )

    def get_size_limits(self) -> Dict:
        """Get the desk-scale size caps."""
        return {
            "sre": self.max_sites_sre,
            "statevector": self.max_sites_statevector,
            "tableau": self.max_sites_tableau,
            "naive_sre": self.max_sites_naive_sre,
        }

    def get_output_config(self) -> Dict:
        """Get output configuration."""
        return {
            "output_dir": self.output_dir,
            "reports_dir": self.reports_dir,
            "run_index": self.run_index_path,
            "float_format": "%.16e",
        }

    def get_runner_config(self) -> Dict:
        """Get experiment runner configuration."""
        return {
            "threads": self.threads,
            "default_dt": self.default_dt,
            "csyk_samples": self.csyk_samples,
            "size_limits": self.get_size_limits(),
        }


# Global configuration instance
config = Config()
