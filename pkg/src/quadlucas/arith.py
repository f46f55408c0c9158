"""Exact integer arithmetic: primality, factorization and arithmetic functions.

Factoring is trial division up to ``TRIAL_LIMIT`` followed by Brent's variant
of Pollard rho.  Complete factorizations of large numbers are memoized in
process and optionally persisted to a :class:`FactorCache` file.
"""

from __future__ import annotations

import logging
import math
import os
import random
import threading
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .errors import BudgetExceeded, DomainError

log = logging.getLogger(__name__)

TRIAL_LIMIT = 10**6
# Witnesses 2..41 are deterministic below this bound (Sorenson & Webster).
MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
MR_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_RANDOM_ROUNDS = 64
# Below this size a number is not worth writing to the cache file.
CACHE_MIN = 10**15


@lru_cache(maxsize=None)
def primes_below(limit: int) -> tuple[int, ...]:
    """All primes p < limit (sieve of Eratosthenes)."""
    if limit <= 2:
        return ()
    sieve = bytearray([1]) * limit
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


@lru_cache(maxsize=None)
def _trial_blocks(limit: int, size: int = 256) -> tuple[tuple[int, tuple[int, ...]], ...]:
    ps = primes_below(limit)
    blocks = []
    for i in range(0, len(ps), size):
        chunk = ps[i : i + size]
        blocks.append((math.prod(chunk), chunk))
    return tuple(blocks)


_SMALL_PRIMES = primes_below(1000)
_SMALL_SET = frozenset(_SMALL_PRIMES)


def _mr_round(n: int, a: int, d: int, s: int) -> bool:
    """One Miller-Rabin round; False means ``a`` witnesses compositeness."""
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin, deterministic below ``MR_DETERMINISTIC_LIMIT``.

    Above the limit 64 pseudo-random witnesses are used (error < 2**-128);
    the witnesses are seeded from ``n`` so verdicts are reproducible.
    """
    if n < 0:
        raise DomainError("is_prime expects n >= 0")
    if n < 2:
        return False
    if n < 1000:
        return n in _SMALL_SET
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    if n < MR_DETERMINISTIC_LIMIT:
        return all(_mr_round(n, a, d, s) for a in MR_DETERMINISTIC_BASES)
    if not all(_mr_round(n, a, d, s) for a in MR_DETERMINISTIC_BASES):
        return False
    rng = random.Random(n)
    return all(_mr_round(n, rng.randrange(2, n - 1), d, s) for _ in range(MR_RANDOM_ROUNDS))


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class FactorBudget:
    """Limits for one call of :func:`factor`; ``None`` means unlimited."""

    time_ms: float | None = None
    rho_iterations: int | None = None

    def __post_init__(self):
        for name in ("time_ms", "rho_iterations"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")


UNLIMITED = FactorBudget()


@dataclass(frozen=True)
class Factorization:
    """``value == unit * prod(p**e) * prod(unfactored)``.

    ``unfactored`` is empty for a complete factorization; otherwise it holds
    composite cofactors the budget did not allow splitting.
    """

    value: int
    unit: int
    factors: tuple[tuple[int, int], ...]
    unfactored: tuple[int, ...] = ()

    @property
    def complete(self) -> bool:
        return not self.unfactored

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def largest_prime(self) -> int:
        """P(value) if complete, else the largest prime found (a lower bound)."""
        return self.factors[-1][0] if self.factors else 1

    def product(self) -> int:
        out = self.unit
        for p, e in self.factors:
            out *= p**e
        for c in self.unfactored:
            out *= c
        return out

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def __str__(self) -> str:
        return format_factors(self.factors)


def format_factors(factors) -> str:
    return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in factors)


class FactorCache:
    """Append-only file of complete factorizations, keyed by ``|n|``.

    Line format: ``<n> = <p1>^<e1> * ... * <pk>^<ek>`` with exponent 1
    omitted.  Lines that fail to parse or do not multiply back to ``n`` are
    skipped with a warning.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[int, tuple[tuple[int, int], ...]] = {}
        self._lock = threading.Lock()
        self.skipped = 0
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        with open(self.path, encoding="ascii", errors="replace") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    n, factors = parse_cache_line(line)
                except ValueError as exc:
                    log.warning("factor cache %s:%d ignored: %s", self.path, lineno, exc)
                    self.skipped += 1
                    continue
                self._entries[n] = factors

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, n: int) -> bool:
        return abs(n) in self._entries

    def get(self, n: int):
        return self._entries.get(abs(n))

    def put(self, n: int, factors) -> None:
        n = abs(n)
        factors = tuple(factors)
        with self._lock:
            if n in self._entries:
                return
            self._entries[n] = factors
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                # single write() on an O_APPEND handle keeps lines whole
                with open(self.path, "a", encoding="ascii", newline="\n") as fh:
                    fh.write(f"{n} = {format_factors(factors)}\n")

    def stats(self) -> dict:
        sizes = [len(str(n)) for n in self._entries]
        return {
            "path": str(self.path) if self.path else None,
            "entries": len(self._entries),
            "skipped": self.skipped,
            "max_digits": max(sizes, default=0),
            "bytes": self.path.stat().st_size if self.path and self.path.exists() else 0,
        }


def parse_cache_line(line: str) -> tuple[int, tuple[tuple[int, int], ...]]:
    lhs, sep, rhs = line.partition("=")
    if not sep:
        raise ValueError("missing '='")
    n = int(lhs.strip())
    if n < 2:
        raise ValueError("cached value must be >= 2")
    factors = []
    for term in rhs.split("*"):
        base, _, exp = term.strip().partition("^")
        factors.append((int(base), int(exp) if exp else 1))
    if any(e < 1 for _, e in factors) or any(
        a[0] >= b[0] for a, b in zip(factors, factors[1:])
    ):
        raise ValueError("exponents must be positive and primes increasing")
    if math.prod(p**e for p, e in factors) != n:
        raise ValueError("factors do not multiply to n")
    if not all(is_prime(p) for p, _ in factors):
        raise ValueError("non-prime factor")
    return n, tuple(factors)


_memo: dict[int, tuple[tuple[int, int], ...]] = {}
_memo_lock = threading.Lock()


class _Deadline:
    def __init__(self, budget: FactorBudget):
        self.stop = (
            time.monotonic() + budget.time_ms / 1000.0 if budget.time_ms is not None else None
        )
        self.iterations_left = budget.rho_iterations

    def expired(self) -> bool:
        if self.stop is not None and time.monotonic() > self.stop:
            return True
        return self.iterations_left is not None and self.iterations_left <= 0

    def spend(self, k: int):
        if self.iterations_left is not None:
            self.iterations_left -= k


def pollard_brent(n: int, seed: int = 1, deadline: _Deadline | None = None) -> int | None:
    """Return a nontrivial factor of odd composite ``n``, or None on budget exhaustion."""
    rng = random.Random(seed * 1000003 + n % 1000003)
    batch = 128
    while True:
        y, c = rng.randrange(1, n), rng.randrange(1, n)
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % n
                    q = q * (x - y) % n
                g = math.gcd(q, n)
                k += batch
                if deadline is not None:
                    deadline.spend(batch)
                    if deadline.expired():
                        return None
            r *= 2
        if g == n:
            # backtrack one step at a time from the last saved point
            while True:
                ys = (ys * ys + c) % n
                g = math.gcd(x - ys, n)
                if g > 1:
                    break
        if g != n:
            return g
        # cycle closed without a split: restart with a fresh polynomial


def _trial_divide(n: int, found: dict[int, int]) -> int:
    for block, chunk in _trial_blocks(TRIAL_LIMIT):
        if n == 1:
            break
        if chunk[0] * chunk[0] > n:
            if n > 1:
                found[n] = found.get(n, 0) + 1
            return 1
        g = math.gcd(n, block)
        if g == 1:
            continue
        for p in chunk:
            if g % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                found[p] = found.get(p, 0) + e
        if n > 1 and n < 10**12 and is_prime(n):
            found[n] = found.get(n, 0) + 1
            return 1
    return n


def factor(
    n: int,
    cache: FactorCache | None = None,
    budget: FactorBudget = UNLIMITED,
) -> Factorization:
    """Certified prime factorization of a nonzero integer.

    Composite cofactors that survive the budget are returned in
    ``Factorization.unfactored``; callers decide whether that is fatal.
    """
    if n == 0:
        raise DomainError("cannot factor 0")
    unit = -1 if n < 0 else 1
    m = abs(n)
    cached = _memo.get(m)
    if cached is not None and cache is not None:
        cache.put(m, cached)
    elif cached is None and cache is not None:
        cached = cache.get(m)
    if cached is not None:
        return Factorization(n, unit, cached)

    found: dict[int, int] = {}
    rest = _trial_divide(m, found)
    deadline = _Deadline(budget)
    stack = [rest] if rest > 1 else []
    unfactored = []
    seed = 1
    while stack:
        c = stack.pop()
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        r = math.isqrt(c)
        if r * r == c:
            stack += [r, r]
            continue
        d = pollard_brent(c, seed, deadline)
        seed += 1
        if d is None:
            unfactored.append(c)
            continue
        stack += [d, c // d]

    factors = tuple(sorted(found.items()))
    result = Factorization(n, unit, factors, tuple(sorted(unfactored)))
    if result.complete and m >= CACHE_MIN:
        with _memo_lock:
            _memo[m] = factors
        if cache is not None:
            cache.put(m, factors)
    return result


def integer_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise DomainError("integer_root needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def cofactor_prime_lower_bound(c: int) -> int:
    """A certified lower bound for the largest prime factor of an unsplit cofactor.

    Every prime factor of c exceeds TRIAL_LIMIT, so c has at most
    k = floor(log c / log TRIAL_LIMIT) of them and the largest is >= c^(1/k).
    """
    k = 1
    while TRIAL_LIMIT ** (k + 1) <= c:
        k += 1
    r = integer_root(c, k)
    if r**k < c:
        r += 1
    return max(r, TRIAL_LIMIT + 1)


def factor_with_hints(
    n: int,
    hints,
    cache: FactorCache | None = None,
    budget: FactorBudget = UNLIMITED,
) -> Factorization:
    """Factor n after dividing out the given candidate primes."""
    if n == 0:
        raise DomainError("cannot factor 0")
    found: dict[int, int] = {}
    m = abs(n)
    for p in sorted(set(hints)):
        if m % p == 0:
            e = valuation(m, p)
            found[p] = e
            m //= p**e
    unfactored: tuple[int, ...] = ()
    if m > 1:
        rest = factor(m, cache, budget)
        for p, e in rest.factors:
            found[p] = found.get(p, 0) + e
        unfactored = rest.unfactored
    return Factorization(n, -1 if n < 0 else 1, tuple(sorted(found.items())), unfactored)


def largest_prime_factor(
    n: int, cache: FactorCache | None = None, budget: FactorBudget = UNLIMITED
) -> int:
    """P(n) with P(0) = P(1) = P(-1) = 1.

    Raises BudgetExceeded (carrying the best lower bound) when a cofactor
    could not be split.
    """
    if n in (0, 1, -1):
        return 1
    f = factor(n, cache, budget)
    if not f.complete:
        bound = max([f.largest_prime()] + [cofactor_prime_lower_bound(c) for c in f.unfactored])
        raise BudgetExceeded(f"unfactored cofactor(s) of {n}", bound, f)
    return f.largest_prime()


def _require_positive(n: int):
    if n < 1:
        raise DomainError("arithmetic functions are defined for n >= 1")


def _complete(n: int) -> Factorization:
    f = factor(n)
    if not f.complete:  # pragma: no cover - UNLIMITED budget never leaves cofactors
        raise BudgetExceeded(f"could not factor {n}")
    return f


def euler_phi(n: int) -> int:
    _require_positive(n)
    out = 1
    for p, e in _complete(n).factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def omega(n: int) -> int:
    _require_positive(n)
    return len(_complete(n).factors)


def tau(n: int) -> int:
    _require_positive(n)
    return math.prod(e + 1 for _, e in _complete(n).factors)


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of n >= 1."""
    _require_positive(n)
    divs = [1]
    for p, e in _complete(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def prime_divisors(n: int) -> tuple[int, ...]:
    if n in (0, 1, -1):
        return ()
    return _complete(abs(n)).primes


def mobius(n: int) -> int:
    f = _complete(n).factors
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


@dataclass
class SieveTables:
    """omega and tau for every n < limit, from a smallest-prime-factor sieve."""

    limit: int
    omega: "object" = field(repr=False)
    tau: "object" = field(repr=False)


def arithmetic_sieve(limit: int) -> SieveTables:
    import numpy as np

    om = np.zeros(limit, dtype=np.int64)
    for p in primes_below(limit):
        om[p::p] += 1
    ta = np.zeros(limit, dtype=np.int64)
    for d in range(1, limit):
        ta[d::d] += 1
    return SieveTables(limit, om, ta)
