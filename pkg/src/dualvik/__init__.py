"""Finite-scale workbench for the Vietoris lift of relations and its dual on
subordination algebras."""

from .boolalg import Algebra, AlgebraElement, mk_algebra
from .config import RunConfig
from .errors import (
    AlgebraMismatchError,
    CapExceededError,
    CompatibilityError,
    DualvikError,
    ParseError,
    ValidationError,
)
from .rel import Relation
from .subord import PairSet, Subordination

__all__ = [
    "Algebra",
    "AlgebraElement",
    "AlgebraMismatchError",
    "CapExceededError",
    "CompatibilityError",
    "DualvikError",
    "PairSet",
    "ParseError",
    "Relation",
    "RunConfig",
    "Subordination",
    "ValidationError",
    "mk_algebra",
]
