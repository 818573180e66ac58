"""Sifting functions of the DHR sieve and weighted-sieve bounds for ``f(p)``.

The package evaluates the one- and two-dimensional upper and lower sifting
functions, optimizes the exponent ``r(k)`` for which ``f(p)`` is a ``P_r``
number infinitely often, and checks the weighted-sieve deduction exactly on
desk-scale ranges of primes.
"""
from .exceptions import (
    DHRSieveError,
    DomainError,
    FactorizationFailure,
    InvalidParameters,
    NoSignChange,
    NonConvergence,
    NonFinite,
    NotPrime,
    NotSquarefree,
    PolynomialError,
)
from .localdensity import IntPolynomial, is_admissible, nu1, nu2, nu_squarefree, singular_series
from .numerics import Bracket, QuadratureSpec, find_root, integrate
from .rbound import (
    Optimizer,
    SieveParameters,
    asymptotic_r,
    constants,
    optimize,
    r_integer,
    r_of,
    solve_beta0,
    solve_delta0,
)
from .sievefn import EULER_GAMMA, SieveConstants, SieveFunctions, default_evaluator

__version__ = "0.1.0"

__all__ = [
    "DHRSieveError", "DomainError", "FactorizationFailure", "InvalidParameters",
    "NoSignChange", "NonConvergence", "NonFinite", "NotPrime", "NotSquarefree",
    "PolynomialError",
    "IntPolynomial", "is_admissible", "nu1", "nu2", "nu_squarefree", "singular_series",
    "Bracket", "QuadratureSpec", "find_root", "integrate",
    "Optimizer", "SieveParameters", "asymptotic_r", "constants", "optimize",
    "r_integer", "r_of", "solve_beta0", "solve_delta0",
    "EULER_GAMMA", "SieveConstants", "SieveFunctions", "default_evaluator",
]
