"""Exact algebra over finite local F_p-algebras: flatness, weak torsion-freeness,
complete-intersection certificates and a constructive ideal-membership engine."""

from .algebra import AlgebraMorphism, Element, FiniteLocalAlgebra, IdealSpan, base_change_fiber, quotient
from .linalg import FieldConfig, Subspace, kernel, rref, solve
from .presentation import Presentation, compile_presentation, compile_text, parse, truncated_poly_algebra

__version__ = "0.1.0"

__all__ = [
    "AlgebraMorphism",
    "Element",
    "FieldConfig",
    "FiniteLocalAlgebra",
    "IdealSpan",
    "Presentation",
    "Subspace",
    "base_change_fiber",
    "compile_presentation",
    "compile_text",
    "kernel",
    "parse",
    "quotient",
    "rref",
    "solve",
    "truncated_poly_algebra",
]
