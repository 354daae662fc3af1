"""Newton polyhedra, stability and leading coefficients of oscillating integrals."""

from .polynomial import Polynomial, ParseError, ZeroPolynomial, emit, parse
from .polyhedron import NewtonPolyhedron, newton_polyhedron, trace_face, trace_value
from .spectral import analyze, diagonal_analysis, Verdict, TriState

__version__ = "0.1.0"

__all__ = [
    "Polynomial", "ParseError", "ZeroPolynomial", "emit", "parse",
    "NewtonPolyhedron", "newton_polyhedron", "trace_face", "trace_value",
    "analyze", "diagonal_analysis", "Verdict", "TriState",
]
