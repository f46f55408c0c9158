"""Prime ideals of quadratic fields, valuations and residue-field orders.

Valuations are computed per splitting type without ideal arithmetic:

* inert p:      nu(beta) = nu_p(N beta) / 2
* ramified p:   nu(beta) = nu_p(N beta)
* split p:      nu(beta) = nu_p(U + V r_k) where r_k is a Hensel root of the
                minimal polynomial of omega mod p^k, k > nu_p(N beta)

for an integral ``beta = U + V omega``; a general element is ``beta / d``.
A split prime is named ``p:r`` by the root r (mod p) of omega's minimal
polynomial that it contains.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .arith import factor, is_prime, valuation as int_valuation
from .errors import DomainError, NotAUnit, ZeroElement
from .field import FieldElement, QuadraticField


class Splitting(str, enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"
    RATIONAL = "rational"  # the base field Q itself


def kronecker(D: int, p: int) -> int:
    """Kronecker symbol (D | p) for a prime p."""
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = pow(D % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@dataclass(frozen=True)
class PrimeIdeal:
    field: QuadraticField
    p: int
    splitting: Splitting
    root: int | None = None  # omega mod p for split / ramified primes

    @property
    def f(self) -> int:
        return 2 if self.splitting is Splitting.INERT else 1

    @property
    def e(self) -> int:
        return 2 if self.splitting is Splitting.RAMIFIED else 1

    @property
    def norm(self) -> int:
        return self.p**self.f

    @property
    def name(self) -> str:
        if self.splitting is Splitting.SPLIT:
            return f"{self.p}:{self.root}"
        return str(self.p)

    def __str__(self):
        return self.name


def _roots_mod_p(b: int, c: int, p: int) -> list[int]:
    """Roots of t^2 + b t + c modulo p."""
    if p < 50:
        return [t for t in range(p) if (t * t + b * t + c) % p == 0]
    if p == 2:  # pragma: no cover
        return [t for t in range(2) if (t * t + b * t + c) % 2 == 0]
    inv2 = pow(2, -1, p)
    disc = (b * b - 4 * c) % p
    if disc == 0:
        return [(-b * inv2) % p]
    s = _sqrt_mod(disc, p)
    return sorted({((-b + s) * inv2) % p, ((-b - s) * inv2) % p})


def _sqrt_mod(a: int, p: int) -> int:
    """Tonelli-Shanks square root of a quadratic residue a mod odd p."""
    a %= p
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


@lru_cache(maxsize=None)
def split_prime(field: QuadraticField, p: int) -> tuple[PrimeIdeal, ...]:
    """The prime ideals above the rational prime p."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if field.degree == 1:
        return (PrimeIdeal(field, p, Splitting.RATIONAL),)
    _, b, c = field.omega_minpoly()
    chi = kronecker(field.discriminant, p)
    if chi == -1:
        return (PrimeIdeal(field, p, Splitting.INERT),)
    roots = _roots_mod_p(b, c, p)
    if chi == 0:
        return (PrimeIdeal(field, p, Splitting.RAMIFIED, roots[0]),)
    return tuple(PrimeIdeal(field, p, Splitting.SPLIT, r) for r in roots)


@lru_cache(maxsize=4096)
def hensel_root(P: PrimeIdeal, k: int) -> int:
    """Root of omega's minimal polynomial mod p^k lifting ``P.root``."""
    _, b, c = P.field.omega_minpoly()
    r, prec = P.root, 1
    while prec < k:
        prec = min(2 * prec, k)
        mod = P.p**prec
        g = (r * r + b * r + c) % mod
        dg = (2 * r + b) % mod
        r = (r - g * pow(dg, -1, mod)) % mod
    return r % P.p**k


def valuation(x: FieldElement, P: PrimeIdeal) -> int:
    """nu_P(x) for nonzero x."""
    if x.is_zero:
        raise ZeroElement("valuation of zero")
    U, V, d = x.integral_form
    p = P.p
    denominator_part = P.e * int_valuation(d, p) if d % p == 0 else 0
    N = x.integral_norm
    if N % p:
        return -denominator_part
    vN = int_valuation(N, p)
    if P.splitting is Splitting.RATIONAL or P.splitting is Splitting.RAMIFIED:
        top = vN
    elif P.splitting is Splitting.INERT:
        top = vN // 2
    else:
        k = vN + 1
        mod = p**k
        image = (U + V * hensel_root(P, k)) % mod
        top = int_valuation(image, p) if image else k
    return top - denominator_part


def valuation_n(n: int, P: PrimeIdeal) -> int:
    """Valuation of the rational integer n viewed in K: e_P * nu_p(n)."""
    return P.e * int_valuation(n, P.p)


def ideals_above(x: FieldElement, candidate_primes) -> list[tuple[PrimeIdeal, int]]:
    """(P, nu_P(x)) for every P above the given rational primes with nu != 0."""
    out = []
    for p in candidate_primes:
        for P in split_prime(x.field, p):
            v = valuation(x, P)
            if v:
                out.append((P, v))
    return out


@dataclass(frozen=True)
class ValuationRecord:
    """Nonzero valuations of an element.

    ``complete`` is False when the numerator norm could not be fully
    factored (or a candidate prime set was supplied), in which case some
    primes of positive valuation may be missing.
    """

    element: FieldElement
    entries: tuple[tuple[PrimeIdeal, int], ...]
    complete: bool

    def valuation(self, P: PrimeIdeal) -> int:
        for Q, v in self.entries:
            if Q == P:
                return v
        return 0

    def norm_check(self) -> bool:
        """For every listed p: sum_{P|p} f_P nu_P(x) == nu_p(N x)."""
        N = self.element.norm()
        for p in {P.p for P, _ in self.entries}:
            lhs = sum(P.f * v for P, v in self.entries if P.p == p)
            rhs = int_valuation(N.numerator, p) - int_valuation(N.denominator, p)
            if lhs != rhs:
                return False
        return True


def valuation_record(x: FieldElement, cache=None, budget=None, primes=None) -> ValuationRecord:
    if x.is_zero:
        raise ZeroElement("valuation record of zero")
    if primes is not None:
        return ValuationRecord(x, tuple(ideals_above(x, sorted(primes))), False)
    from .arith import UNLIMITED

    U, V, d = x.integral_form
    candidates = set()
    complete = True
    for n in (x.integral_norm, d):
        if abs(n) > 1:
            f = factor(n, cache, budget or UNLIMITED)
            candidates.update(f.primes)
            complete = complete and f.complete
    return ValuationRecord(x, tuple(ideals_above(x, sorted(candidates))), complete)


# residue fields --------------------------------------------------------------

def residue(x: FieldElement, P: PrimeIdeal):
    """Image of a P-unit in O_K / P.

    An int mod p when N(P) = p, or a pair (u, v) meaning u + v*omega in
    F_p[omega] when P is inert.
    """
    if x.is_zero:
        raise ZeroElement("zero has no residue")
    if valuation(x, P) != 0:
        raise NotAUnit(f"{x} is not a unit at {P}")
    U, V, d = x.integral_form
    p = P.p
    s = int_valuation(d, p) if d % p == 0 else 0
    d_unit_inv = pow(d // p**s, -1, p)
    if P.splitting is Splitting.RATIONAL:
        return U * d_unit_inv % p
    if P.splitting is Splitting.SPLIT:
        k = s + 1
        mod = p**k
        image = (U + V * hensel_root(P, k)) % mod
        return (image // p**s) * d_unit_inv % p
    # inert or ramified: p^s divides both coordinates
    ps = p**s
    U, V = U // ps, V // ps
    if P.splitting is Splitting.RAMIFIED:
        return (U + V * P.root) * d_unit_inv % p
    return (U * d_unit_inv % p, V * d_unit_inv % p)


def _fp2_mul(x, y, b, c, p):
    # omega^2 = -b omega - c
    u1, v1 = x
    u2, v2 = y
    vv = v1 * v2
    return ((u1 * u2 - c * vv) % p, (u1 * v2 + u2 * v1 - b * vv) % p)


def residue_pow(g, n: int, P: PrimeIdeal):
    if P.splitting is not Splitting.INERT:
        return pow(g, n, P.p)
    _, b, c = P.field.omega_minpoly()
    result, base = (1, 0), g
    while n:
        if n & 1:
            result = _fp2_mul(result, base, b, c, P.p)
        n >>= 1
        if n:
            base = _fp2_mul(base, base, b, c, P.p)
    return result


def _is_one(g, P: PrimeIdeal) -> bool:
    return g == (1, 0) if P.splitting is Splitting.INERT else g == 1


def order_dividing(g, n: int, P: PrimeIdeal) -> int:
    """Order of a residue g known to satisfy g^n = 1."""
    order = n
    for q, _ in factor(n).factors:
        while order % q == 0 and _is_one(residue_pow(g, order // q, P), P):
            order //= q
    return order


@lru_cache(maxsize=65536)
def residue_order(x: FieldElement, P: PrimeIdeal) -> int:
    """Multiplicative order of x in the residue field at P (x a P-unit)."""
    g = residue(x, P)
    return order_dividing(g, P.norm - 1, P)


class Primitivity(str, enum.Enum):
    PRIMITIVE = "primitive"
    NON_PRIMITIVE = "non-primitive"
    NOT_A_DIVISOR = "not-a-divisor"


@dataclass(frozen=True)
class PrimitivityVerdict:
    ideal: PrimeIdeal
    n: int
    verdict: Primitivity
    order: int | None

    @property
    def primitive(self) -> bool:
        return self.verdict is Primitivity.PRIMITIVE


def classify_primitivity(gamma: FieldElement, n: int, P: PrimeIdeal) -> PrimitivityVerdict:
    """Is P a primitive divisor of gamma^n - 1?  Decided by the residue order.

    P must not divide gamma's numerator or denominator (NotAUnit otherwise).
    """
    if n < 1:
        raise DomainError("n must be positive")
    g = residue(gamma, P)
    if not _is_one(residue_pow(g, n, P), P):
        return PrimitivityVerdict(P, n, Primitivity.NOT_A_DIVISOR, None)
    order = order_dividing(g, n, P)
    verdict = Primitivity.PRIMITIVE if order == n else Primitivity.NON_PRIMITIVE
    return PrimitivityVerdict(P, n, verdict, order)


def classify_by_definition(gamma: FieldElement, n: int, P: PrimeIdeal) -> Primitivity:
    """Definitional check: nu_P(u_n) >= 1 and nu_P(u_k) = 0 for k < n."""
    if valuation(gamma, P) != 0:
        raise NotAUnit(f"{gamma} is not a unit at {P}")
    one = gamma.field.rational(1)
    power = one
    first = None
    for k in range(1, n + 1):
        power = power * gamma
        u = power - one
        if u.is_zero or valuation(u, P) >= 1:
            first = k
            break
    if first is None:
        return Primitivity.NOT_A_DIVISOR
    if first == n:
        return Primitivity.PRIMITIVE
    u_n = gamma**n - one
    if u_n.is_zero or valuation(u_n, P) >= 1:
        return Primitivity.NON_PRIMITIVE
    return Primitivity.NOT_A_DIVISOR


def support_primes(gamma: FieldElement, cache=None) -> list[PrimeIdeal]:
    """Prime ideals with nu_P(gamma) != 0."""
    rec = valuation_record(gamma, cache)
    return [P for P, _ in rec.entries]
