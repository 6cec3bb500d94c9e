"""Exact computations with foliated surfaces: lattices, Zariski decompositions,
plane vector fields, Noether-type bounds and a gallery of worked examples."""

from .errors import (
    BoundedReductionError,
    ContractViolation,
    DecompositionFailure,
    FoliageError,
    InputError,
    ModelInconsistency,
)

__version__ = "0.1.0"

__all__ = [
    "FoliageError",
    "InputError",
    "ModelInconsistency",
    "ContractViolation",
    "DecompositionFailure",
    "BoundedReductionError",
]
