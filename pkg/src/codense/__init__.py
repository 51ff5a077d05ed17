"""Finite-scale computations with ultrafilters, integration operators and codensity monads."""

from codense.errors import CapExceeded, CarrierMismatch, CodenseError, HypothesisViolated, InvalidStructure
from codense.finset import FiniteMap, FiniteSet, Partition, Subset
from codense.ultrafilter import SubsetFamily, Ultrafilter

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "CarrierMismatch",
    "CodenseError",
    "FiniteMap",
    "FiniteSet",
    "HypothesisViolated",
    "InvalidStructure",
    "Partition",
    "Subset",
    "SubsetFamily",
    "Ultrafilter",
]
