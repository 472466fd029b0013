"""Supersymmetric construction of PT-symmetric potentials with two known levels.

A complex generating function W+ is turned into a pair of superpotentials
(W, W1) whose partner Hamiltonian H+ = -d2/dx2 + W^2 - W' has the exact
eigenvalues 0 and eps.  The package also carries closed-form oracles for two
worked families, a finite-difference eigenvalue check and the sl(2) form of
the gauge-transformed operator.
"""

from .errors import (
    ConstructionError,
    ConvergenceError,
    DomainTooSmallError,
    EvaluationError,
    ParseError,
    SingularShiftError,
)
from .expr import ExprFunction, eval_jet, parse, to_source
from .jet import Jet
from .susy import (
    GeneratingFunction,
    SuperpotentialPair,
    Type1,
    Type2,
    build_pair,
    classify_zero,
    constraint_residual,
    partner_potentials,
    split_real_imag,
)
from .wavefun import Grid, WavefunctionGrid, psi0, psi1

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "ConvergenceError",
    "DomainTooSmallError",
    "EvaluationError",
    "ExprFunction",
    "GeneratingFunction",
    "Grid",
    "Jet",
    "ParseError",
    "SingularShiftError",
    "SuperpotentialPair",
    "Type1",
    "Type2",
    "WavefunctionGrid",
    "build_pair",
    "classify_zero",
    "constraint_residual",
    "eval_jet",
    "parse",
    "partner_potentials",
    "psi0",
    "psi1",
    "split_real_imag",
    "to_source",
]
