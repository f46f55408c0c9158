"""The per-(gamma, n) ledger for the largest prime P below a divisor of Phi_n(gamma).

Everything on the finite side is computed from exact integers.  With
``A = |N(Phi_n(gamma))| * B`` (B the norm of the denominator ideal) the finite
part of the height identity is ``log A``; the non-primitive part ``C`` only
involves primes dividing n, so ``Sigma_p = log(A / C)`` needs no factoring of
the (possibly huge) norm.  Logs are only taken when a row is rendered.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator

from . import intervals as ia
from .arith import (
    UNLIMITED,
    FactorBudget,
    FactorCache,
    Factorization,
    cofactor_prime_lower_bound,
    divisors,
    euler_phi,
    factor,
    factor_with_hints,
    omega,
    primes_below,
    tau,
)
from .bounds import check_af_bounds, divisor_log_sum_check
from .cyclotomic import (
    _nonzero_phi,
    check_prop21_item1,
    check_prop21_item2,
    check_prop22,
    eval_cyclotomic,
)
from .errors import DegreeMismatch, DomainError, ZeroElement
from .field import FieldElement, format_element
from .heights import _neg, denominator_ideal_norm, height
from .ideals import (
    PrimeIdeal,
    Primitivity,
    Splitting,
    classify_by_definition,
    classify_primitivity,
    residue,
    order_dividing,
    split_prime,
    support_primes,
    valuation,
)
from .ledger import Row, RowSet, Verdict, render

PI_SIEVE_LIMIT = 10**7
MAIN_CONSTANT = "0.0001"


def _require_gamma(gamma: FieldElement) -> None:
    if gamma.is_zero:
        raise ZeroElement("gamma must be nonzero")
    if gamma.is_root_of_unity():
        raise DomainError(f"{gamma} is a root of unity")


def _log_ratio(n) -> ia.RealApprox:
    return ia.log(n) / ia.log_log(n)


# theorem right-hand sides -----------------------------------------------------

@dataclass(frozen=True)
class Thresholds:
    """Effectivity thresholds, kept as logarithms."""

    log_p0_general: ia.RealApprox  # log p0 for the degree-d valuation bound
    loglog_p0_quadratic: int  # log log p0 for the norm +-1 valuation bound
    loglog_n0: int  # log log n0 of the main theorem

    def to_dict(self) -> dict:
        return {
            "log_p0_general": render(self.log_p0_general),
            "loglog_p0_quadratic": str(self.loglog_p0_quadratic),
            "loglog_n0": str(self.loglog_n0),
        }


def thresholds(d: int, discriminant: int) -> Thresholds:
    return Thresholds(
        80000 * d * ia.log_star(d) ** 2,
        max(10**8, 2 * abs(discriminant)),
        max(10**10, 3 * abs(discriminant)),
    )


def theorem_rhs(n: int, variant: str, *, h=None, p: int | None = None, norm: int | None = None, d: int = 2) -> ia.RealApprox:
    """Right-hand side of one of the displayed bounds.

    ``main``   n exp(0.0001 log n / loglog n)
    ``thm21``  N exp(-0.002 d^-1 log N / loglog N) h log* n   (N = norm of the prime)
    ``thm22``  p exp(-0.001 log p / loglog p) h log* n
    """
    if n < 3:
        raise DomainError("theorem_rhs needs n >= 3")
    if variant == "main":
        return n * ia.exp(ia.RealApprox.of(MAIN_CONSTANT) * _log_ratio(n))
    if h is None:
        raise DomainError(f"{variant} needs h")
    if variant == "thm21":
        if norm is None or norm < 3:
            raise DomainError("thm21 needs a prime norm >= 3")
        return norm * ia.exp(-ia.RealApprox.of("0.002") / d * _log_ratio(norm)) * h * ia.log_star(n)
    if variant == "thm22":
        if p is None or p < 3:
            raise DomainError("thm22 needs p >= 3")
        return p * ia.exp(-ia.RealApprox.of("0.001") * _log_ratio(p)) * h * ia.log_star(n)
    raise DomainError(f"unknown variant {variant!r}")


def _u(gamma: FieldElement, n: int) -> FieldElement:
    return gamma**n - 1


def _nu(x: FieldElement, P: PrimeIdeal):
    return math.inf if x.is_zero else valuation(x, P)


def check_valuation_theorems(gamma: FieldElement, n: int, P: PrimeIdeal, u: FieldElement | None = None) -> list[Row]:
    """Both valuation bounds at P, recorded as skipped unless the size hypothesis holds."""
    u = _u(gamma, n) if u is None else u
    lhs = _nu(u, P)
    tag = f"[{P.name}]"
    if lhs <= 0:
        return [Row.vacuous("thm21" + tag, lhs, None, note="P does not divide u_n")]
    d = gamma.degree
    h = height(gamma)
    rows = []
    rhs = theorem_rhs(max(n, 3), "thm21", h=h, norm=P.norm, d=d) if P.norm >= 3 and n >= 3 else None
    th = thresholds(d, gamma.field.discriminant)
    met = ia.certify(lambda: (ia.log(P.norm), th.log_p0_general), ">=").holds
    rows.append(_theorem_row("thm21" + tag, lhs, rhs, met, "N(P) >= p0"))
    if d == 2 and abs(gamma.norm()) == 1:
        rhs = theorem_rhs(n, "thm22", h=h, p=P.p) if P.p >= 3 and n >= 3 else None
        met = P.p >= 3 and ia.certify(lambda: (ia.log_log(P.p), th.loglog_p0_quadratic), ">=").holds
        rows.append(_theorem_row("thm22" + tag, lhs, rhs, met, "p >= p0"))
    return rows


def _theorem_row(id: str, lhs, rhs, met, hypothesis: str) -> Row:
    if not met or rhs is None:
        return Row.skipped(id, lhs, rhs, note=f"hypothesis {hypothesis} not met")
    return Row.compare(id, lambda: (lhs, rhs), "<=")


# P -----------------------------------------------------------------------------

@dataclass(frozen=True)
class LargestPrime:
    P: int
    exact: bool
    witness: PrimeIdeal | None
    factorization: Factorization | None = None

    def to_dict(self) -> dict:
        return {
            "P": str(self.P),
            "exact": self.exact,
            "witness": self.witness.name if self.witness else None,
        }


def _qualifying_ideal(x: FieldElement, p: int) -> PrimeIdeal | None:
    for P in split_prime(x.field, p):
        if valuation(x, P) >= 1:
            return P
    return None


def _largest_from(x: FieldElement, f: Factorization) -> LargestPrime:
    best, witness = 1, None
    for p in reversed(f.primes):
        P = _qualifying_ideal(x, p)
        if P is not None:
            best, witness = p, P
            break
    if f.complete:
        return LargestPrime(best, True, witness, f)
    # a prime of an unsplit cofactor exceeds every prime of the denominator
    # (those are small and already found), so it does qualify
    den = x.integral_form[2]
    lower = best
    for c in f.unfactored:
        if math.gcd(c, den) == 1:
            lower = max(lower, cofactor_prime_lower_bound(c))
    return LargestPrime(lower, False, witness if lower == best else None, f)


@lru_cache(maxsize=4096)
def _phi(gamma: FieldElement, n: int) -> FieldElement:
    return _nonzero_phi(gamma, n)


def _norm_factorization(x: FieldElement, cache, budget, hints=()) -> Factorization:
    N = x.integral_norm
    if abs(N) <= 1:
        return Factorization(N, 1 if N > 0 else -1, ())
    if hints:
        return factor_with_hints(N, hints, cache, budget)
    return factor(N, cache, budget)


def compute_P(
    gamma: FieldElement,
    n: int,
    cache: FactorCache | None = None,
    budget: FactorBudget = UNLIMITED,
) -> LargestPrime:
    """Largest rational prime below some P with nu_P(Phi_n(gamma)) >= 1 (1 if none)."""
    _require_gamma(gamma)
    value = _phi(gamma, n)
    return _largest_from(value, _norm_factorization(value, cache, budget))


def compute_P_u(
    gamma: FieldElement,
    n: int,
    cache: FactorCache | None = None,
    budget: FactorBudget = UNLIMITED,
) -> LargestPrime:
    """Same maximum for gamma^n - 1, factored with the Phi_d(gamma) primes as hints."""
    _require_gamma(gamma)
    hints: set[int] = set()
    for d in divisors(n):
        f = _norm_factorization(_phi(gamma, d), cache, budget)
        hints.update(f.primes)
    u = _u(gamma, n)
    return _largest_from(u, _norm_factorization(u, cache, budget, hints))


# sums --------------------------------------------------------------------------

@dataclass(frozen=True)
class Sum:
    """A finite-place sum ``log(shadow)`` with its exact integer shadow."""

    shadow: int
    derived: bool = False  # obtained by division rather than from a factorization

    @property
    def value(self) -> ia.RealApprox:
        return ia.log(self.shadow) if self.shadow > 1 else ia.RealApprox.of(0)

    def to_dict(self) -> dict:
        return {"value": render(self.value), "shadow": str(self.shadow), "derived": self.derived}


def _exact_log_row(id: str, lhs: int, rhs: int, relation: str = "<=", asserted: bool = True, note: str = "") -> Row:
    """Compare positive integers exactly, display their logs."""
    exact = Row.exact(id, lhs, rhs, relation, asserted, note)
    L = ia.log(lhs) if lhs > 1 else ia.RealApprox.of(0)
    R = ia.log(rhs) if rhs > 1 else ia.RealApprox.of(0)
    margin = R - L if relation in ("<=", "<") else L - R
    return Row(id, L, R, exact.verdict, margin, asserted, relation, note or "decided on exact integers")


def _report(row: Row, note: str = "") -> Row:
    row.asserted = False
    if note:
        row.note = note
    return row


def _either(id: str, a: Row, b: Row, asserted: bool, note: str) -> Row:
    verdicts = {a.verdict, b.verdict}
    if Verdict.HOLDS in verdicts:
        v = Verdict.HOLDS
    elif verdicts == {Verdict.FAILS}:
        v = Verdict.FAILS
    else:
        v = Verdict.UNDECIDABLE
    return Row(id, a.verdict.value, b.verdict.value, v, None, asserted, "or", note)


# beta chain --------------------------------------------------------------------

@dataclass(frozen=True)
class DpEntry:
    p: int
    d_p: int
    nu_small: int  # nu_p(v_{n/d_p})
    nu_full: int  # nu_p(beta^n - 1)
    candidates: int  # divisors d of n with p primitive for v_{n/d}

    def to_dict(self) -> dict:
        return {"p": str(self.p), "d_p": self.d_p, "nu_v_n_over_dp": self.nu_small, "nu_v_n": self.nu_full}


@dataclass
class DpTable:
    entries: list[DpEntry] = field(default_factory=list)

    @property
    def unique(self) -> bool:
        return all(e.candidates == 1 for e in self.entries)

    def to_dict(self) -> list:
        return [e.to_dict() for e in self.entries]


@dataclass
class BetaData:
    beta: FieldElement
    torsion: bool
    primes: list[int]  # the set of inert p with nu_p(gamma^n - 1) > 0
    complete: bool
    excluded: list[int]  # inert p where gamma is not a p-unit
    dp: DpTable
    small_divisors: int | None = None
    small_primes: int | None = None
    rows: RowSet = field(default_factory=RowSet)

    def to_dict(self) -> dict:
        return {
            "beta": format_element(self.beta),
            "torsion": self.torsion,
            "inert_primes": [str(p) for p in self.primes],
            "inert_primes_complete": self.complete,
            "excluded": [str(p) for p in self.excluded],
            "dp_table": self.dp.to_dict(),
            "small_divisor_count": self.small_divisors,
            "small_dp_prime_count": self.small_primes,
        }


def _content(x: FieldElement) -> int:
    U, V, _ = x.integral_form
    return math.gcd(U, V)


def inert_divisors(gamma: FieldElement, n: int, cache=None, budget=UNLIMITED) -> tuple[list[int], bool, list[int]]:
    """Inert p with nu_p(gamma^n - 1) > 0; also whether the search was complete,
    and the inert primes excluded because gamma is not a p-unit."""
    K = gamma.field
    candidates: set[int] = set()
    complete = True
    for d in divisors(n):
        g = _content(_phi(gamma, d))
        if g > 1:
            f = factor(g, cache, budget)
            candidates.update(f.primes)
            complete = complete and f.complete
    excluded = sorted(
        P.p for P in support_primes(gamma, cache) if P.splitting is Splitting.INERT
    )
    u = _u(gamma, n)
    found = []
    for p in sorted(candidates):
        (P,) = split_prime(K, p)[:1]
        if P.splitting is not Splitting.INERT or p in excluded:
            continue
        if _nu(u, P) > 0:
            found.append(p)
    return found, complete, excluded


def _inert(K, p: int) -> PrimeIdeal:
    (P,) = split_prime(K, p)
    return P


def check_eq19(gamma: FieldElement, m: int, cache=None, budget=UNLIMITED) -> list[Row]:
    """sum over inert p of nu_p(beta^m - 1) log p <= log 2 + 2 m h(gamma).

    Candidate primes come from the integer parts of Phi_k(beta), k | m.  If a
    content cannot be fully factored its logarithm is added to the left side,
    which keeps the comparison an upper bound.
    """
    if gamma.degree != 2:
        raise DegreeMismatch("needs a quadratic gamma")
    K = gamma.field
    beta = gamma.conjugate() / gamma
    v = beta**m - 1
    if v.is_zero:
        return [Row.skipped("eq19", note="beta^m = 1")]
    lhs_int = 1
    unsplit = 1
    seen: set[int] = set()
    for k in divisors(m):
        g = _content(eval_cyclotomic(k, beta))
        if g <= 1:
            continue
        f = factor(g, cache, budget)
        for c in f.unfactored:
            unsplit *= c
        for p in f.primes:
            if p in seen:
                continue
            seen.add(p)
            P = split_prime(K, p)[0]
            if P.splitting is Splitting.INERT:
                lhs_int *= p ** valuation(v, P)
    bound = lhs_int * unsplit
    h = height(gamma)
    lead = gamma.leading_coefficient
    note = "" if unsplit == 1 else "unsplit cofactors counted in full"

    def full():
        return ia.log(bound) if bound > 1 else ia.RealApprox.of(0), ia.log(2) + 2 * m * h

    def mid():
        # log 2 + m log(a max|gamma^sigma|); at most the full bound since
        # 2 h = log a + log+|gamma| + log+|gamma^sigma|
        big = max(gamma.abs_embeddings(), key=lambda r: r.hi)
        return full()[0], ia.log(2) + m * ia.log(lead * big)

    return [Row.compare("eq19", full, "<=", note=note), Row.compare("eq19.mid", mid, "<=")]


def beta_chain(
    gamma: FieldElement,
    n: int,
    cache: FactorCache | None = None,
    budget: FactorBudget = UNLIMITED,
    P: int | None = None,
    sigma_p2: int | None = None,
) -> BetaData:
    """Valuation chain, d_p table and the bounds built from beta = gamma^sigma / gamma."""
    _require_gamma(gamma)
    if gamma.degree != 2:
        raise DegreeMismatch("the beta chain needs a quadratic gamma")
    K = gamma.field
    gs = gamma.conjugate()
    beta = gs / gamma
    torsion = beta.is_root_of_unity()
    primes, complete, excluded = inert_divisors(gamma, n, cache, budget)
    data = BetaData(beta, torsion, primes, complete, excluded, DpTable())
    rows = data.rows
    u, us = _u(gamma, n), _u(gs, n)
    vn = beta**n - 1
    diff = gs**n - gamma**n
    phi_n = _phi(gamma, n)
    for p in primes:
        Pp = _inert(K, p)
        a, b, c, e = _nu(vn, Pp), _nu(diff, Pp), _nu(u, Pp), _nu(phi_n, Pp)
        tag = f"[{p}]"
        rows.add(Row.exact("beta.chain.0" + tag, c, _nu(us, Pp), "=="))
        rows.add(_chain_row("beta.chain.1" + tag, a, b))
        rows.add(_chain_row("beta.chain.2" + tag, b, c))
        rows.add(_chain_row("beta.chain.3" + tag, c, e))

    prod, bound, ok = divisor_log_sum_check(n)
    rows.add(_exact_log_row("eq18", prod, bound))

    if torsion:
        for id in ("dp", "eq17", "eq19", "eq20", "bigdp"):
            rows.add(Row.skipped(id, note="beta is a root of unity"))
        return data

    h = height(gamma)
    divs = divisors(n)
    for p in primes:
        Pp = _inert(K, p)
        g = residue(beta, Pp)
        order = order_dividing(g, n, Pp)
        d_p = n // order
        hits = sum(
            1 for d in divs if classify_primitivity(beta, n // d, Pp).verdict is Primitivity.PRIMITIVE
        )
        entry = DpEntry(p, d_p, valuation(beta ** (n // d_p) - 1, Pp), valuation(vn, Pp), hits)
        data.dp.entries.append(entry)
        rows.add(Row.exact(f"dp.unique[{p}]", hits, 1, "=="))

    # summed form of the first term
    lhs17 = rhs17 = 1
    seven = 1
    for e in data.dp.entries:
        lhs17 *= e.p**e.nu_full
        rhs17 *= e.p**e.nu_small
    small_phis = [eval_cyclotomic(m, beta) for m in range(1, 8)]
    for p in primes:
        Pp = _inert(K, p)
        for x in small_phis:
            seven *= p ** valuation(x, Pp)
    rows.add(_exact_log_row("eq17", lhs17, rhs17 * prod * seven, note="first term summed over p"))

    ms = sorted({n // e.d_p for e in data.dp.entries} | set(range(1, 8)))
    for m in ms:
        for r in check_eq19(gamma, m, cache, budget):
            r.id = f"{r.id}[m={m}]"
            rows.add(r)

    rows.add(Row.compare("eq20", lambda: (ia.log(seven) if seven > 1 else ia.RealApprox.of(0), 7 * ia.log(2) + 56 * h)))

    phi_n_val = euler_phi(n)
    tau_n = tau(n)
    if sigma_p2 is not None:
        if complete:
            rows.add(_exact_log_row("norm1lowb.pre", lhs17**2, sigma_p2, ">=", note="2 sum nu_p(v_n) log p >= Sigma_p2"))
        else:
            rows.add(Row.skipped("norm1lowb.pre", note="inert prime search incomplete"))
    rows.add(_report(Row.compare(
        "norm1lowb",
        lambda: (_log_or_zero(lhs17), ia.RealApprox.of("0.2") * phi_n_val * h),
        ">=",
    )))
    rows.add(_report(Row.compare(
        "sumdp",
        lambda: (
            _log_or_zero(rhs17),
            ia.RealApprox.of("0.2") * phi_n_val * h - tau_n * ia.log(n) - 56 * h - 7 * ia.log(2),
        ),
        ">=",
    )))

    if n < 2:
        rows.add(Row.skipped("bigdp", note="needs n >= 2"))
        return data
    T = tau_n * ia.log(n)
    big = [d for d in divs if ia.certify(lambda d=d: (d, T), ">=").holds]
    small = [d for d in divs if d not in big]
    data.small_divisors = len(small)
    big_entries = [e for e in data.dp.entries if e.d_p in big]
    small_entries = [e for e in data.dp.entries if e.d_p not in big]
    data.small_primes = len(small_entries)
    lhs_big = math.prod(e.p**e.nu_small for e in big_entries)

    def mid_big():
        s = sum((ia.RealApprox.of(1) / d for d in big), ia.RealApprox.of(0))
        return 2 * n * h * s + tau_n * ia.log(2)

    rows.add(Row.compare("bigdp", lambda: (_log_or_zero(lhs_big), mid_big())))
    rows.add(Row.compare("bigdp.sum", lambda: (mid_big(), 2 * n * h / ia.log(n) + tau_n * ia.log(2))))

    lhs_small = math.prod(e.p**e.nu_small for e in small_entries)
    rows.add(_report(Row.compare(
        "smalldlow", lambda: (_log_or_zero(lhs_small), ia.RealApprox.of("0.1") * phi_n_val * h), ">="
    )))
    if n >= 16:  # logloglog n > 0
        def growth(c):
            ll = ia.log_log(n)
            return ia.exp(c * ia.log(n) * ia.log(ll) / ll**2)

        rows.add(_report(Row.compare("smalldupb", lambda: (len(small), growth(70))), note="asymptotic bound"))
        if P is not None:
            rows.add(_report(
                Row.compare("carppp", lambda: (len(small_entries), (ia.RealApprox.of(P) / n + 1) * growth(80))),
                note="asymptotic bound",
            ))
    if n >= 3:
        h_beta = height(beta)
        for e in small_entries:
            rhs = theorem_rhs(n, "thm22", h=h_beta, p=e.p) if e.p >= 3 else None
            rows.add(Row.skipped(f"padicofb[{e.p}]", e.nu_full, rhs, note="hypothesis p >= p0 not met"))
        if P is not None and P >= 3:
            rhs = (
                2 * P * ia.exp(-ia.RealApprox.of("0.0005") * _log_ratio(n)) * h * ia.log(P) * ia.log(n) * len(small_entries)
            )
            rows.add(Row.skipped("smalldup", _log_or_zero(lhs_small), rhs, note="hypothesis p >= p0 not met"))
    return data


def _log_or_zero(k: int) -> ia.RealApprox:
    return ia.log(k) if k > 1 else ia.RealApprox.of(0)


def _chain_row(id: str, a, b) -> Row:
    holds = a >= b
    margin = None if math.isinf(a) else a - b
    return Row(id, a, b, Verdict.HOLDS if holds else Verdict.FAILS, margin, True, ">=")


# the ledger ----------------------------------------------------------------------

def count_primes_1_mod(limit: int, n: int) -> int | None:
    """pi(limit; n, 1) by sieve, or None above PI_SIEVE_LIMIT."""
    if limit > PI_SIEVE_LIMIT:
        return None
    return sum(1 for p in primes_below(limit + 1) if p % n == 1)


@dataclass
class ProofLedger:
    gamma: FieldElement
    n: int
    h_gamma: ia.RealApprox
    h_phi: ia.RealApprox
    arch: list[ia.RealApprox]
    sigma_p: Sum
    sigma_np: Sum
    sigma_p1: Sum
    sigma_p2: Sum
    P: LargestPrime
    P_u: LargestPrime | None
    case: str
    beta: BetaData | None
    primitive: list[tuple[PrimeIdeal, int]]
    non_primitive: list[tuple[PrimeIdeal, int]]
    support: list[PrimeIdeal]
    thresholds: Thresholds
    rows: RowSet = field(default_factory=RowSet)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.rows.ok

    def primitive_counts(self) -> tuple[int, int]:
        return (
            sum(1 for P, _ in self.primitive if P.f == 1),
            sum(1 for P, _ in self.primitive if P.f == 2),
        )

    def to_dict(self) -> dict:
        q = {
            "field": str(self.gamma.field),
            "degree": self.gamma.degree,
            "discriminant": self.gamma.field.discriminant,
            "h_gamma": render(self.h_gamma),
            "h_phi": render(self.h_phi),
            "arch": [render(a) for a in self.arch],
            "sigma_p": self.sigma_p.to_dict(),
            "sigma_np": self.sigma_np.to_dict(),
            "sigma_p1": self.sigma_p1.to_dict(),
            "sigma_p2": self.sigma_p2.to_dict(),
            "P": self.P.to_dict(),
            "P_u": self.P_u.to_dict() if self.P_u else None,
            "case": self.case,
            "primitive": [[P.name, v] for P, v in self.primitive],
            "non_primitive": [[P.name, v] for P, v in self.non_primitive],
            "support": [P.name for P in self.support],
            "phi_n": euler_phi(self.n),
            "omega_n": omega(self.n),
            "tau_n": tau(self.n),
            "thresholds": self.thresholds.to_dict(),
            "beta": self.beta.to_dict() if self.beta else None,
            "notes": list(self.notes),
        }
        return {
            "gamma": format_element(self.gamma),
            "n": self.n,
            "quantities": q,
            "rows": [r.to_dict() for r in self.rows.rows],
        }


def build_ledger(
    gamma: FieldElement,
    n: int,
    cache: FactorCache | None = None,
    budget: FactorBudget = UNLIMITED,
    factor_norm: bool = True,
    oracle: bool = False,
    with_beta: bool = True,
) -> ProofLedger:
    _require_gamma(gamma)
    if n < 1:
        raise DomainError("n must be >= 1")
    K = gamma.field
    d = gamma.degree
    value = _phi(gamma, n)
    notes: list[str] = []
    rows = RowSet()

    h_gamma = height(gamma)
    h_phi = height(value)
    arch = [-_neg(v) for v in value.log_abs_embeddings()]
    support = support_primes(gamma, cache)
    support_set = {(P.p, P.root) for P in support}

    # A = prod N(P)^max(0, nu_P) ; C = its non-primitive part (primes over p | n)
    A_num, rem = divmod(abs(value.norm().numerator) * denominator_ideal_norm(value), value.norm().denominator)
    if rem:
        raise ArithmeticError("positive part of the norm is not an integer")
    C = 1
    non_primitive = []
    for p in factor(n).primes if n > 1 else ():
        for P in split_prime(K, p):
            v = valuation(value, P)
            if v > 0 and classify_primitivity(gamma, n, P).verdict is not Primitivity.PRIMITIVE:
                C *= P.norm**v
                non_primitive.append((P, v))
    if A_num % C:
        raise ArithmeticError("non-primitive part does not divide the positive part")
    M_p = A_num // C

    # primitive primes: from the full factorization when requested, else only inert ones from the content
    primitive: list[tuple[PrimeIdeal, int]] = []
    norm_f = None
    if factor_norm:
        norm_f = _norm_factorization(value, cache, budget)
        for p in norm_f.primes:
            for P in split_prime(K, p):
                v = valuation(value, P)
                if v > 0 and (P.p, P.root) not in support_set and classify_primitivity(gamma, n, P).primitive:
                    primitive.append((P, v))
    full = norm_f is not None and norm_f.complete
    if full:
        M_p1 = math.prod(P.norm**v for P, v in primitive if P.f == 1)
        M_p2 = math.prod(P.norm**v for P, v in primitive if P.f == 2)
        sigma_p1, sigma_p2 = Sum(M_p1), Sum(M_p2)
    else:
        M_p2 = 1
        g = _content(value) if d == 2 else 1
        if g > 1:
            gf = factor(g, cache, budget)
            if not gf.complete:
                notes.append("content of Phi_n(gamma) not fully factored; Sigma_p2 is a lower estimate")
            for p in gf.primes:
                P = split_prime(K, p)[0]
                if P.splitting is Splitting.INERT:
                    v = valuation(value, P)
                    if v > 0 and p not in {Q.p for Q in support} and classify_primitivity(gamma, n, P).primitive:
                        M_p2 *= P.norm**v
                        if (P, v) not in primitive:
                            primitive.append((P, v))
        if M_p % M_p2:
            raise ArithmeticError("inert primitive part does not divide the primitive part")
        sigma_p1, sigma_p2 = Sum(M_p // M_p2, derived=True), Sum(M_p2)
        notes.append("Sigma_p1 derived as Sigma_p - Sigma_p2")
    primitive.sort(key=lambda t: (t[0].p, t[0].root or 0))
    sigma_p, sigma_np = Sum(M_p), Sum(C)

    if factor_norm:
        P_info = _largest_from(value, norm_f)
        P_u = compute_P_u(gamma, n, cache, budget)
    else:
        P_info = LargestPrime(1, False, None)
        P_u = None
        notes.append("norm not factored; P unknown")

    phi_n, w = euler_phi(n), omega(n)
    log_star_n = ia.log_star(n)
    gate = n >= 2 ** (d + 1)

    # (6)
    rows.add(Row.equal("eq6", lambda: (d * height(value), sum(arch, ia.RealApprox.of(0)) + _log_or_zero(A_num))))
    if full:
        rows.add(Row.exact("eq6.finite", A_num, C * M_p1 * M_p2, "==", note="against the full factorization"))
        rows.add(Row.exact("sigma.split", M_p, M_p1 * M_p2, "=="))
    else:
        rows.add(Row.exact("sigma.split", M_p, sigma_p1.shadow * sigma_p2.shadow, "==", note="Sigma_p1 derived"))

    # (7)
    const7 = d * 10**14 * d**5
    rows.add(Row.compare(
        "eq7",
        lambda: (sum(arch, ia.RealApprox.of(0)), const7 * height(gamma) * 2**w * log_star_n),
        note="log* n in place of log n",
    ))

    # (8)
    if gate:
        rows.add(_exact_log_row("eq8", C, n**d, note="exp(Sigma_np) <= n^d"))
    else:
        rows.add(Row.skipped("eq8", sigma_np.value, d * ia.log(n) if n > 1 else 0, note=f"needs n >= {2 ** (d + 1)}"))
    for P, v in non_primitive:
        if (P.p, P.root) not in support_set:
            rows.extend(check_prop22(gamma, n, P, value))

    # (9)-(11)
    def rhs9():
        return 10**16 * height(gamma) * 2**w * log_star_n + sigma_p.value / d + ia.log(n)

    row9 = rows.add(Row.compare("eq9", lambda: (height(value), rhs9())))
    rows.add(Row.compare("eq10", lambda: (height(value), phi_n * height(gamma) - 2**w * ia.log(ia.pi() * n)), ">="))

    def rhs11():
        h = height(gamma)
        return phi_n * h - 2**w * ia.log(ia.pi() * n) - 10**16 * h * 2**w * log_star_n - ia.log(n)

    row11 = rows.add(Row.compare("eq11", lambda: (sigma_p.value / d, rhs11()), ">="))
    if not gate:
        _report(row9, f"derivation uses n >= {2 ** (d + 1)}")
        _report(row11, f"derivation uses n >= {2 ** (d + 1)}")

    # (12)-(14)
    quota = ia.RealApprox.of("0.4") * phi_n * h_gamma
    row12 = rows.add(_report(Row.compare("eq12", lambda: (sigma_p.value, d * quota), ">="), "needs n >= n0"))
    c13 = rows.add(_report(Row.compare("case13", lambda: (sigma_p1.value, quota), ">="), "case split"))
    c14 = rows.add(_report(Row.compare("case14", lambda: (sigma_p2.value, quota), ">="), "case split"))
    holds12 = row12.verdict is Verdict.HOLDS
    if holds12:
        rows.add(_either("case.disjunction", c13, c14, True, "asserted because eq12 holds"))
    else:
        rows.add(Row.skipped("case.disjunction", note="eq12 does not hold at this n"))
    case = "+".join(t for t, r in (("13", c13), ("14", c14)) if r.verdict is Verdict.HOLDS) or "none"

    # P
    if factor_norm:
        if P_u is not None:
            rows.add(Row.exact("pu.ge.pphi", P_u.P, P_info.P, ">=", asserted=P_u.exact, note="" if P_u.exact else "lower bounds"))
        for P, v in primitive:
            rows.extend(check_prop22(gamma, n, P, value))
            if P.f == 1:
                rows.add(Row.exact(f"prop22.1.size[{P.name}]", P.p, n + 1, ">="))
            else:
                rows.add(Row.exact(f"prop22.1.size[{P.name}]", (P.p**2 - 1) % n, 0, "=="))
            if oracle:
                rows.add(Row.exact(
                    f"oracle[{P.name}]", classify_by_definition(gamma, n, P).value, Primitivity.PRIMITIVE.value, "=="
                ))
        if oracle:
            for P, _ in non_primitive:
                if (P.p, P.root) not in support_set:
                    rows.add(Row.exact(
                        f"oracle[{P.name}]",
                        classify_by_definition(gamma, n, P).value,
                        classify_primitivity(gamma, n, P).verdict.value,
                        "==",
                    ))
        if any(P.f == 1 for P, _ in primitive):
            rows.add(Row.exact("p.size", P_info.P, n + 1, ">=", note="a primitive prime of degree 1 exists"))
        u = _u(gamma, n)
        for P, _ in primitive + non_primitive:
            rows.extend(check_valuation_theorems(gamma, n, P, u))

    if n >= 3 and P_info.P >= 2:
        note = "" if P_info.exact else "P is a lower bound"
        rows.add(_report(Row.compare("mainr", lambda: (P_info.P, theorem_rhs(n, "main")), ">"), note or "needs n >= n0"))
        Pv = P_info.P
        lr = _log_ratio(n)
        rows.add(_report(Row.compare(
            "case13.final",
            lambda: (ia.RealApprox.of(Pv * Pv),
                     ia.RealApprox.of("0.1") * n * n / (ia.log(n) ** 2 * ia.log_log(n)) * ia.exp(ia.RealApprox.of("0.001") * lr)),
            ">=",
        ), "needs n >= n0"))
        rows.add(_report(Row.compare(
            "case14.final",
            lambda: (80 * Pv * Pv * ia.log(Pv), n * n * ia.exp(ia.RealApprox.of("0.0004") * lr)),
            ">=",
        ), "needs n >= n0"))
        pi = count_primes_1_mod(Pv, n)
        if pi is not None:
            rows.add(Row.exact("pi.trivial", pi * n, Pv, "<=", note=f"pi(P; n, 1) = {pi}"))
        decay = ia.exp(-ia.RealApprox.of("0.001") * lr)
        if pi is not None:
            rows.add(Row.skipped(
                "eq15", sigma_p1.value, pi * Pv * decay * h_gamma * ia.log(n) * ia.log(Pv),
                note="hypothesis N(P) >= p0 not met",
            ))
        rows.add(Row.skipped(
            "eq16", sigma_p1.value, 2 * Pv * Pv * decay * h_gamma * ia.log(n) ** 2 / n,
            note="hypothesis N(P) >= p0 not met",
        ))

    rows.add(check_prop21_item1(gamma, n, value))
    rows.add(check_prop21_item2(gamma, n, value))

    if n >= 2:
        prod, bound, _ = divisor_log_sum_check(n)
        rows.add(_exact_log_row("eq18", prod, bound))
    af = check_af_bounds(n)
    for id, c in (("eq3", af.phi), ("eq4", af.omega), ("eq5", af.tau)):
        if c is not None:
            rows.add(Row(id, c.value, c.bound, Verdict.HOLDS if c.holds else Verdict.FAILS, c.margin, True, ">=" if id == "eq3" else "<="))

    beta = None
    if with_beta and d == 2:
        beta = beta_chain(gamma, n, cache, budget, P_info.P if factor_norm else None, sigma_p2.shadow)
        rows.extend(r for r in beta.rows.rows if r.id != "eq18")
        if not beta.complete:
            notes.append("inert prime search incomplete")
        if beta.excluded:
            notes.append("excluded inert primes where gamma is not a unit: " + " ".join(map(str, beta.excluded)))
    elif with_beta:
        notes.append("beta chain needs degree 2")

    return ProofLedger(
        gamma, n, h_gamma, h_phi, arch, sigma_p, sigma_np, sigma_p1, sigma_p2,
        P_info, P_u, case, beta, primitive, non_primitive, support,
        thresholds(d, K.discriminant), rows, notes,
    )


# scan ------------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    n: int
    P: int
    bound: ia.RealApprox | None
    ratio: ia.RealApprox | None
    f1: int
    f2: int
    exact: bool
    asserted_ok: bool | None
    failures: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "P": str(self.P),
            "bound": render(self.bound),
            "ratio": render(self.ratio),
            "f1_primitive": self.f1,
            "f2_primitive": self.f2,
            "exact": self.exact,
            "ledger_ok": self.asserted_ok,
        }


def scan_row(
    gamma: FieldElement,
    n: int,
    cache: FactorCache | None = None,
    budget: FactorBudget = UNLIMITED,
    ledger: bool = False,
) -> ScanRow:
    if ledger:
        L = build_ledger(gamma, n, cache, budget)
        info, (f1, f2) = L.P, L.primitive_counts()
        ok, failures = L.ok, tuple(r.id for r in L.rows.failures())
    else:
        value = _phi(gamma, n)
        f = _norm_factorization(value, cache, budget)
        info = _largest_from(value, f)
        f1 = f2 = 0
        for p in f.primes:
            for P in split_prime(gamma.field, p):
                if valuation(value, P) > 0 and valuation(gamma, P) == 0 and classify_primitivity(gamma, n, P).primitive:
                    f1 += P.f == 1
                    f2 += P.f == 2
        ok, failures = None, ()
    bound = theorem_rhs(n, "main") if n >= 3 else None
    ratio = info.P / bound if bound is not None else None
    return ScanRow(n, info.P, bound, ratio, f1, f2, info.exact, ok, failures)


_worker_cache: FactorCache | None = None


def _init_worker(cache_path):
    global _worker_cache
    _worker_cache = FactorCache(cache_path) if cache_path else None


def _scan_job(args):
    gamma, n, budget, ledger = args
    return scan_row(gamma, n, _worker_cache, budget, ledger)


def scan(
    gamma: FieldElement,
    n_range: Iterable[int],
    emit: Callable[[ScanRow], None] | None = None,
    cache: FactorCache | None = None,
    budget: FactorBudget = UNLIMITED,
    ledger: bool = False,
    jobs: int = 1,
) -> list[ScanRow]:
    """P(n) against the main bound for every n, emitted in n order."""
    _require_gamma(gamma)
    ns = list(n_range)
    out = []
    for row in _scan_iter(gamma, ns, cache, budget, ledger, jobs):
        if emit is not None:
            emit(row)
        out.append(row)
    return out


def _scan_iter(gamma, ns, cache, budget, ledger, jobs) -> Iterator[ScanRow]:
    if jobs <= 1 or len(ns) <= 1:
        for n in ns:
            yield scan_row(gamma, n, cache, budget, ledger)
        return
    path = cache.path if cache is not None else None
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(path,)) as pool:
        yield from pool.map(_scan_job, [(gamma, n, budget, ledger) for n in ns])
