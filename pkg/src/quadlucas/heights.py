"""Absolute logarithmic Weil height, computed along independent routes.

``height_mahler``     (log a + sum log+|x^sigma|) / deg x from the primitive
                      minimal polynomial a t^2 + ...
``height_valuation``  archimedean log+ terms plus negative valuations
``height_dual``       -log- terms plus positive valuations (product formula)

``height`` runs the first two and refuses to answer if they disagree.
"""

from __future__ import annotations

from . import intervals as ia
from .arith import UNLIMITED, factor
from .errors import BudgetExceeded, HeightMismatch, ZeroElement
from .field import FieldElement
from .ideals import split_prime, valuation


def height_mahler(x: FieldElement) -> ia.RealApprox:
    if x.is_zero:
        raise ZeroElement("height of zero")
    lead = x.leading_coefficient
    logs = x.log_abs_embeddings()
    if x.is_rational:
        return ia.log(lead) + _pos(logs[0])
    return (ia.log(lead) + _pos(logs[0]) + _pos(logs[1])) / 2


def _pos(log_value: ia.RealApprox) -> ia.RealApprox:
    """max(v, 0) on an interval."""
    if log_value.lo >= 0:
        return log_value
    if log_value.hi <= 0:
        return ia.RealApprox.of(0)
    return ia.RealApprox.hull(0, log_value)


def _neg(log_value: ia.RealApprox) -> ia.RealApprox:
    """min(v, 0) on an interval."""
    if log_value.hi <= 0:
        return log_value
    if log_value.lo >= 0:
        return ia.RealApprox.of(0)
    return ia.RealApprox.hull(log_value, 0)


def denominator_ideal_norm(x: FieldElement) -> int:
    """prod over P with nu_P(x) < 0 of N(P)^(-nu_P(x)), an integer."""
    d = x.integral_form[2]
    out = 1
    if d > 1:
        for p in factor(d).primes:
            for P in split_prime(x.field, p):
                v = valuation(x, P)
                if v < 0:
                    out *= P.norm ** (-v)
    return out


def numerator_ideal_norm(x: FieldElement, cache=None, budget=UNLIMITED) -> int:
    """prod over P with nu_P(x) > 0 of N(P)^nu_P(x), from a factorization of N(x)."""
    N = x.integral_norm
    f = factor(N, cache, budget)
    if not f.complete:
        raise BudgetExceeded("numerator norm not fully factored", f.largest_prime(), f)
    out = 1
    for p in f.primes:
        for P in split_prime(x.field, p):
            v = valuation(x, P)
            if v > 0:
                out *= P.norm**v
    return out


def height_valuation(x: FieldElement) -> ia.RealApprox:
    if x.is_zero:
        raise ZeroElement("height of zero")
    d = x.field.degree
    arch = sum((_pos(v) for v in x.log_abs_embeddings()), ia.RealApprox.of(0))
    return (arch + ia.log(denominator_ideal_norm(x))) / d


def height_dual(x: FieldElement, cache=None, budget=UNLIMITED) -> ia.RealApprox:
    if x.is_zero:
        raise ZeroElement("height of zero")
    d = x.field.degree
    arch = sum((-_neg(v) for v in x.log_abs_embeddings()), ia.RealApprox.of(0))
    return (arch + ia.log(numerator_ideal_norm(x, cache, budget))) / d


def height(x: FieldElement) -> ia.RealApprox:
    """h(x), cross-checked between the Mahler and valuation routes."""
    a = height_mahler(x)
    b = height_valuation(x)
    if not a.overlaps(b):
        raise HeightMismatch(f"h({x}): Mahler {a!r} vs valuation {b!r}")
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    return ia.RealApprox.hull(lo, hi)
