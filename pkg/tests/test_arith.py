from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from quadlucas.arith import (
    TRIAL_LIMIT,
    FactorBudget,
    FactorCache,
    Factorization,
    arithmetic_sieve,
    cofactor_prime_lower_bound,
    divisors,
    euler_phi,
    factor,
    factor_with_hints,
    integer_root,
    is_prime,
    is_square,
    largest_prime_factor,
    mobius,
    omega,
    parse_cache_line,
    primes_below,
    tau,
    valuation,
)
from quadlucas.errors import BudgetExceeded, DomainError


def trial_is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def trial_factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def test_is_prime_rejects_negative():
    with pytest.raises(DomainError):
        is_prime(-5)


def test_is_prime_matches_trial_division():
    assert [n for n in range(0, 5000) if is_prime(n)] == [n for n in range(0, 5000) if trial_is_prime(n)]


@pytest.mark.parametrize(
    "n,expected",
    [
        (2**61 - 1, True),
        (2**89 - 1, True),
        (2**67 - 1, False),  # 193707721 * 761838257287
        (3317044064679887385961981, False),  # strong pseudoprime to bases 2..37
        (10**30 + 57, True),
        (561, False),
    ],
)
def test_is_prime_known_values(n, expected):
    assert is_prime(n) is expected


def test_primes_below():
    assert primes_below(30) == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
    assert len(primes_below(10**5)) == 9592


@given(st.integers(min_value=-(10**12), max_value=10**12).filter(lambda n: n != 0))
@settings(max_examples=300, deadline=None)
def test_factor_matches_trial_division(n):
    f = factor(n)
    assert f.complete
    assert f.product() == n
    assert dict(f.factors) == trial_factor(abs(n))


@given(st.lists(st.sampled_from([1000003, 1000033, 998244353, 2**31 - 1, 10**12 + 39]), min_size=1, max_size=3))
@settings(max_examples=30, deadline=None)
def test_factor_products_of_large_primes(ps):
    n = math.prod(ps)
    f = factor(n)
    assert f.complete and f.product() == n
    assert all(is_prime(p) for p in f.primes)


def test_factor_semiprime_with_large_factors():
    p, q = 100000000003, 1000000000039
    f = factor(p * q)
    assert f.factors == ((p, 1), (q, 1))


def test_factor_zero_rejected():
    with pytest.raises(DomainError):
        factor(0)


def test_factor_perfect_power():
    p = 1000003
    assert factor(p**4).factors == ((p, 4),)


def test_budget_leaves_unfactored_cofactor():
    n = 1000000000039 * 10000000000037
    f = factor(n, budget=FactorBudget(rho_iterations=1))
    assert not f.complete
    assert f.product() == n
    assert all(c > TRIAL_LIMIT for c in f.unfactored)


def test_largest_prime_factor():
    assert largest_prime_factor(2**11 - 1) == 89
    assert largest_prime_factor(1) == 1
    assert largest_prime_factor(-1) == 1
    assert largest_prime_factor(0) == 1
    assert largest_prime_factor(-98) == 7


def test_largest_prime_factor_budget_carries_lower_bound():
    p, q = 1000000000039, 10000000000037
    with pytest.raises(BudgetExceeded) as info:
        largest_prime_factor(2 * p * q, budget=FactorBudget(rho_iterations=1))
    lb = info.value.lower_bound
    assert TRIAL_LIMIT < lb <= q


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        FactorBudget(time_ms=0)
    with pytest.raises(ValueError):
        FactorBudget(rho_iterations=-1)


@given(st.integers(min_value=0, max_value=10**40), st.integers(min_value=1, max_value=9))
def test_integer_root(n, k):
    r = integer_root(n, k)
    assert r**k <= n < (r + 1) ** k


@given(st.integers(min_value=2, max_value=6))
def test_cofactor_lower_bound_is_valid(k):
    ps = [1000003, 1000033, 1000037, 1000039, 1000081, 1000099][:k]
    c = math.prod(ps)
    assert TRIAL_LIMIT < cofactor_prime_lower_bound(c) <= max(ps)


def test_factor_with_hints():
    f = factor_with_hints(-(2047 * 9), [3, 23, 5])
    assert f.factors == ((3, 2), (23, 1), (89, 1)) and f.unit == -1


def test_valuation_and_square():
    assert valuation(96, 2) == 5
    assert valuation(-81, 3) == 4
    assert valuation(7, 2) == 0
    assert is_square(144) and not is_square(145) and not is_square(-4)
    with pytest.raises(DomainError):
        valuation(0, 2)


def brute_phi(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def test_arithmetic_functions_against_brute_force():
    for n in range(1, 400):
        ds = [d for d in range(1, n + 1) if n % d == 0]
        assert divisors(n) == ds
        assert tau(n) == len(ds)
        assert omega(n) == len(trial_factor(n))
        assert euler_phi(n) == brute_phi(n)
        f = trial_factor(n)
        expected_mu = 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)
        assert mobius(n) == expected_mu


def test_arithmetic_functions_reject_nonpositive():
    for fn in (euler_phi, omega, tau, divisors, mobius):
        with pytest.raises(DomainError):
            fn(0)


def test_sieve_matches_functions():
    t = arithmetic_sieve(5000)
    for n in range(1, 5000):
        assert t.omega[n] == omega(n)
        assert t.tau[n] == tau(n)


def test_factor_cache_round_trip(tmp_path):
    path = tmp_path / "cache.txt"
    cache = FactorCache(path)
    n = 100000000003 * 1000000000039 * 4
    f = factor(n, cache)
    assert f.complete and cache.get(n) == f.factors
    reloaded = FactorCache(path)
    assert reloaded.get(n) == f.factors
    assert reloaded.stats()["entries"] == 1
    assert factor(n, reloaded).factors == f.factors


def test_factor_cache_skips_bad_lines(tmp_path):
    path = tmp_path / "cache.txt"
    path.write_text("15 = 3 * 5\n16 = 2^3\n21 = 21\nnot a line\n", encoding="ascii")
    cache = FactorCache(path)
    assert cache.get(15) == ((3, 1), (5, 1))
    assert cache.get(16) is None
    assert cache.stats()["skipped"] == 3


def test_parse_cache_line():
    assert parse_cache_line("2047 = 23 * 89") == (2047, ((23, 1), (89, 1)))
    with pytest.raises(ValueError):
        parse_cache_line("2047 = 89 * 23")


def test_factorization_accessors():
    f = Factorization(-12, -1, ((2, 2), (3, 1)))
    assert f.largest_prime() == 3 and f.exponent(2) == 2 and f.exponent(5) == 0
    assert str(f) == "2^2 * 3"
