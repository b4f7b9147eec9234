"""
Append-only index of completed runs, stored in a TinyDB JSON file.
"""
import logging
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from tinydb import Query, TinyDB

from utils.config import config

logger = logging.getLogger(__name__)


class RunIndex:
    """Queryable log of run outputs keyed by scenario and seed."""

    def __init__(self, path: Optional[str] = None):
        self.path = path or config.run_index_path
        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self.db = TinyDB(self.path)

    def add(self, scenario: str, seed: Optional[int], n_sites: int, paths: Dict[str, str],
            extra: Optional[Dict[str, Any]] = None) -> int:
        """
        Record one completed run.

        Args:
            scenario: Scenario name
            seed: Master seed of the run
            n_sites: Chain length N
            paths: Output files by kind (csv, sidecar, report, html)
            extra: Further searchable fields

        Returns:
            TinyDB document id
        """
        entry = {
            "scenario": scenario,
            "seed": seed,
            "n_sites": n_sites,
            "paths": dict(paths),
            "completed_at": datetime.now().isoformat(),
            **(extra or {}),
        }
        doc_id = self.db.insert(entry)
        logger.debug(f"Indexed {scenario} run as document {doc_id}")
        return doc_id

    def find(self, scenario: Optional[str] = None, seed: Optional[int] = None) -> List[Dict[str, Any]]:
        """All entries matching the given scenario and/or seed (all entries when both are None)."""
        run = Query()
        if scenario is None and seed is None:
            return list(self.db.all())
        condition = None
        if scenario is not None:
            condition = run.scenario == scenario
        if seed is not None:
            seed_condition = run.seed == seed
            condition = seed_condition if condition is None else condition & seed_condition
        return list(self.db.search(condition))

    def __len__(self) -> int:
        return len(self.db)

    def close(self) -> None:
        self.db.close()
