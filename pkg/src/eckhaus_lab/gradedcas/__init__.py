"""Exact weight-graded computer algebra for the marginal-mode reduction."""

from .derive import (
    DerivationError,
    derive_effective_equation,
    derive_vs_star,
    marginal_coefficient,
    vs_star_bracket,
    slaved_graph_original,
    slaved_graph_transformed,
    transformed_residuals,
)
from .jets import KJet, OrderInconsistency, jet_eigsystem
from .latex import emit_latex, jet_latex, parse_latex
from .poly import GradedPoly, GradedSymbol, apply_operator, sym
from .scalar import I, ONE, SQRT3, ZERO, ExactScalar, q

__all__ = [
    "DerivationError", "derive_effective_equation", "derive_vs_star", "marginal_coefficient", "vs_star_bracket",
    "slaved_graph_original", "slaved_graph_transformed", "transformed_residuals",
    "KJet", "OrderInconsistency", "jet_eigsystem", "emit_latex", "jet_latex", "parse_latex",
    "GradedPoly", "GradedSymbol", "apply_operator", "sym", "I", "ONE", "SQRT3", "ZERO",
    "ExactScalar", "q",
]
