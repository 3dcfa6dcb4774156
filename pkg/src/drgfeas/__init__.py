"""Feasibility checks and exhaustive searches for distance-regular graph intersection arrays."""

from .arrays import (
    ArrayError,
    ArrayParseError,
    DomainError,
    IntersectionArray,
    derived_counts,
    p_numbers,
    parse_array,
)
from .feasibility import FilterConfig, FeasibilityReport, gate, is_feasible
from .krein import krein_parameters
from .spectral import spectrum

__all__ = [
    "ArrayError",
    "ArrayParseError",
    "DomainError",
    "FeasibilityReport",
    "FilterConfig",
    "IntersectionArray",
    "derived_counts",
    "gate",
    "is_feasible",
    "krein_parameters",
    "p_numbers",
    "parse_array",
    "spectrum",
]

__version__ = "0.1.0"
