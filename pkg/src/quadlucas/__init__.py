"""Primitive divisors of gamma^n - 1 for quadratic gamma: exact arithmetic,
valuations, heights and a checked ledger of the explicit bounds."""

from .arith import FactorBudget, FactorCache, Factorization, factor, largest_prime_factor
from .cyclotomic import CycPoly, cyclotomic, eval_cyclotomic
from .errors import (
    BudgetExceeded,
    DegreeMismatch,
    DomainError,
    HeightMismatch,
    HypothesisNotMet,
    NotAUnit,
    ParseError,
    QuadLucasError,
    ReducibleInput,
    RootOfUnityAtN,
    Undecidable,
    ZeroElement,
)
from .field import FieldElement, QuadraticField, element_from_minpoly, parse_element
from .heights import height
from .ideals import PrimeIdeal, classify_primitivity, split_prime, valuation
from .intervals import RealApprox
from .verifier import ProofLedger, beta_chain, build_ledger, compute_P, scan, theorem_rhs

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CycPoly",
    "DegreeMismatch",
    "DomainError",
    "FactorBudget",
    "FactorCache",
    "Factorization",
    "FieldElement",
    "HeightMismatch",
    "HypothesisNotMet",
    "NotAUnit",
    "ParseError",
    "PrimeIdeal",
    "ProofLedger",
    "QuadLucasError",
    "QuadraticField",
    "RealApprox",
    "ReducibleInput",
    "RootOfUnityAtN",
    "Undecidable",
    "ZeroElement",
    "beta_chain",
    "build_ledger",
    "classify_primitivity",
    "compute_P",
    "cyclotomic",
    "element_from_minpoly",
    "eval_cyclotomic",
    "factor",
    "height",
    "largest_prime_factor",
    "parse_element",
    "scan",
    "split_prime",
    "theorem_rhs",
    "valuation",
]
