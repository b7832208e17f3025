"""Quantum hashing with single-photon OAM qubits: exact bounds, parameter
search, and Monte-Carlo models of the optical verification experiment."""

from .hash_core import (
    BoundsReport, HashParams, QuantumHash, bounds_report, example1_encode,
    example2_properties, fidelity, hash as quantum_hash, one_way_delta,
    overlap_magnitude, test_error_bounds, worst_case_x,
)
from .param_search import SearchConfig, SearchResult, evaluate, search

__version__ = "0.1.0"

__all__ = [
    "BoundsReport", "HashParams", "QuantumHash", "SearchConfig", "SearchResult",
    "bounds_report", "evaluate", "example1_encode", "example2_properties",
    "fidelity", "one_way_delta", "overlap_magnitude", "quantum_hash", "search",
    "test_error_bounds", "worst_case_x",
]
