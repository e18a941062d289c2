"""Bergman kernel, metric and holomorphic sectional curvature of planar rings."""

from .core import Annulus, JTriple, PhiTable, Truncation, alpha_norm, j_triple_at_one, phi_psi_table
from .errors import (
    BergmanError,
    ConstructionError,
    ConvergenceError,
    DomainError,
    InternalInconsistencyError,
    OracleEnvelopeError,
    QuadratureError,
)
from .geometry import BergmanEval, bergman_eval, bergman_eval_log, canonical_eval, normalize

__version__ = "0.1.0"

__all__ = [
    "Annulus",
    "BergmanEval",
    "BergmanError",
    "ConstructionError",
    "ConvergenceError",
    "DomainError",
    "InternalInconsistencyError",
    "JTriple",
    "OracleEnvelopeError",
    "PhiTable",
    "QuadratureError",
    "Truncation",
    "alpha_norm",
    "bergman_eval",
    "bergman_eval_log",
    "canonical_eval",
    "j_triple_at_one",
    "normalize",
    "phi_psi_table",
]
