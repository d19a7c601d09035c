from .logger import logger
from .config_manager import ConfigManager, Tolerances
from .errors import BenchmarkError
from .channels import Channel, channel_table
from .polytopes import build_clifford_polytope, build_lhv_polytope
from .witness import FacetLibrary, uqc_witness
from .distill import prepare_ancilla

__all__ = [
    'logger',
    'ConfigManager',
    'Tolerances',
    'BenchmarkError',
    'Channel',
    'channel_table',
    'build_lhv_polytope',
    'build_clifford_polytope',
    'FacetLibrary',
    'uqc_witness',
    'prepare_ancilla'
]
