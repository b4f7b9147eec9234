"""
Quantum battery toolkit - Utils Package
"""

from .config import config
from .formatters import DataFormatter, ReportFormatter
from .run_index import RunIndex
from .state_io import read_state, write_state

__all__ = [
    'config',
    'DataFormatter',
    'ReportFormatter',
    'RunIndex',
    'read_state',
    'write_state'
]
