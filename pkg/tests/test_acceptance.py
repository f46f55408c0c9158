"""Acceptance suite: one test per criterion, summarized as PASS/FAIL lines."""

from __future__ import annotations

import csv
import importlib
import io
import math
import subprocess
import sys
import time

import pytest

from quadlucas import intervals as ia
from quadlucas.arith import divisors, factor, is_prime, largest_prime_factor, primes_below, valuation as vp
from quadlucas.bounds import PHI_SAMPLE, PHI_THRESHOLD, check_af_bounds, check_phi_bound, divisor_log_sum_check, exhaustive_omega_tau
from quadlucas.cyclotomic import check_prop21_item1, check_prop21_item2, check_prop22, eval_cyclotomic, poly_mul
from quadlucas.field import parse_element
from quadlucas.heights import height_mahler, height_valuation
from quadlucas.ideals import Primitivity, classify_primitivity, split_prime, valuation, valuation_n
from quadlucas.ledger import Verdict
from quadlucas.verifier import build_ledger, check_eq19, compute_P

from conftest import CORPUS, QUADRATIC

# the package re-exports a function under the submodule's name
cyc = importlib.import_module("quadlucas.cyclotomic")

SMALL_PRIMES = primes_below(10**4 + 1)
N_MAX = 200


def unit_ideals(gamma):
    """Prime ideals above p <= 10^4 at which gamma is a unit."""
    return [P for p in SMALL_PRIMES for P in split_prime(gamma.field, p) if valuation(gamma, P) == 0]


def definitional_first_index(gamma, P, limit):
    """nu_P(u_k) for k = 1..limit, scanned from the definition."""
    one = gamma.field.rational(1)
    power, out = one, [None]
    for _ in range(limit):
        power = power * gamma
        u = power - one
        out.append(math.inf if u.is_zero else valuation(u, P))
    return out


def oracle_verdict(nus, n):
    if nus[n] < 1:
        return Primitivity.NOT_A_DIVISOR
    if all(nus[k] < 1 for k in range(1, n)):
        return Primitivity.PRIMITIVE
    return Primitivity.NON_PRIMITIVE


@pytest.fixture(scope="module")
def grid():
    """Per corpus element: unit ideals, the definitional scan and the order-based verdicts."""
    out = []
    for gamma in CORPUS:
        phis = [None] + [eval_cyclotomic(n, gamma) for n in range(1, N_MAX + 1)]
        rows = []
        for P in unit_ideals(gamma):
            nus = definitional_first_index(gamma, P, N_MAX)
            verdicts = [None] + [classify_primitivity(gamma, n, P).verdict for n in range(1, N_MAX + 1)]
            rows.append((P, nus, verdicts))
        out.append((gamma, phis, rows))
    return out


@pytest.mark.criterion(1, "cyclotomic product identity, n <= 500, < 30 s")
def test_cyclotomic_identity(monkeypatch):
    monkeypatch.setattr(cyc, "_memo", {})
    start = time.perf_counter()
    for n in range(1, 501):
        acc = [1]
        for d in divisors(n):
            acc = poly_mul(acc, cyc.cyclotomic(d).coefficients)
        assert acc == [-1] + [0] * (n - 1) + [1], n
    assert time.perf_counter() - start < 30


@pytest.mark.criterion(2, "height routes agree to < 1e-9 on the corpus; h(x^n) = n h(x), n <= 20")
def test_height_consistency():
    fields = {g.field for g in CORPUS}
    assert len(CORPUS) >= 12 and len(fields) >= 4
    assert any(not K.is_real for K in fields)
    assert any(not g.is_integral for g in CORPUS)
    assert any(g.is_rational for g in CORPUS)
    for g in CORPUS:
        c = ia.certify_equal(lambda g=g: (height_mahler(g), height_valuation(g)), tolerance=1e-9)
        assert c.holds is True, str(g)
        for n in range(1, 21):
            c = ia.certify_equal(lambda g=g, n=n: (height_mahler(g**n), n * height_valuation(g)), tolerance=1e-9)
            assert c.holds is True, (str(g), n)


@pytest.mark.criterion(3, "norm-valuation balance over corpus x p <= 10^4")
def test_norm_valuation_balance():
    checked = 0
    for g in CORPUS:
        # the corpus element itself plus u_n and Phi_n(gamma) for small n
        xs = [g] + [g**n - 1 for n in range(1, 31)] + [eval_cyclotomic(n, g) for n in range(1, 31)]
        for x in xs:
            if x.is_zero:
                continue
            N = x.norm()
            for p in SMALL_PRIMES:
                lhs = sum(P.f * valuation(x, P) for P in split_prime(x.field, p))
                num = vp(N.numerator, p) if N.numerator % p == 0 else 0
                den = vp(N.denominator, p) if N.denominator % p == 0 else 0
                assert lhs == num - den, (str(x), p)
                checked += 1
    assert checked > 0


@pytest.mark.criterion(4, "order-based primitivity equals the definitional scan, n <= 200, p <= 10^4")
def test_primitivity_oracle(grid):
    disagreements = []
    for gamma, _, rows in grid:
        for P, nus, verdicts in rows:
            for n in range(1, N_MAX + 1):
                if verdicts[n] is not oracle_verdict(nus, n):
                    disagreements.append((str(gamma), n, P.name))
    assert disagreements == []


@pytest.mark.criterion(5, "primitive-divisor facts on the grid of criterion 4")
def test_primitive_divisor_facts(grid):
    for gamma, phis, rows in grid:
        for P, nus, verdicts in rows:
            for n in range(1, N_MAX + 1):
                v = verdicts[n]
                nu_phi = valuation(phis[n], P)
                if v is Primitivity.PRIMITIVE:
                    assert P.norm % n == 1 % n and nu_phi >= 1, (str(gamma), n, P.name)
                elif v is Primitivity.NON_PRIMITIVE:
                    if n >= 8:
                        assert nu_phi <= valuation_n(n, P), (str(gamma), n, P.name)
                else:
                    assert nu_phi == 0
                if v is not Primitivity.NOT_A_DIVISOR:
                    assert all(r.ok for r in check_prop22(gamma, n, P, phis[n]))


@pytest.mark.criterion(6, "cyclotomic height bound and archimedean lower bound, n <= 300")
def test_cyclotomic_height_bounds():
    for g in CORPUS:
        for n in range(1, 301):
            value = eval_cyclotomic(n, g)
            assert check_prop21_item1(g, n, value).verdict is Verdict.HOLDS, (str(g), n)
            assert check_prop21_item2(g, n, value).verdict is Verdict.HOLDS, (str(g), n)


@pytest.mark.criterion(7, "ledger: finite-place balance, non-primitive sum, beta chain, d_p table, divisor and inert-product bounds")
def test_ledger_grid():
    for g in CORPUS:
        for n in range(1, 121):
            L = build_ledger(g, n, factor_norm=False)
            assert L.ok, (str(g), n, [r.to_dict() for r in L.rows.failures()])
            rows = {r.id: r for r in L.rows.rows}
            eq6 = rows["eq6"]
            assert eq6.verdict is Verdict.HOLDS and float(eq6.margin.hi) < 1e-9
            if n >= 8:
                assert rows["eq8"].verdict is Verdict.HOLDS
            torsion = L.beta is not None and L.beta.torsion
            for r in L.rows.rows:
                if r.id.startswith("beta.chain") or (not torsion and r.id.startswith(("dp.unique", "eq20"))):
                    assert r.verdict is Verdict.HOLDS, (str(g), n, r.id)
            if L.beta is not None and not L.beta.torsion:
                assert L.beta.dp.unique
    for n in range(2, 10**4 + 1):
        assert divisor_log_sum_check(n)[2], n
    for g in QUADRATIC:
        for m in range(1, 51):
            for r in check_eq19(g, m):
                assert r.verdict in (Verdict.HOLDS, Verdict.SKIPPED), (str(g), m, r.id)


def closed_form_phi(n):
    f = factor(n)
    assert f.complete and all(is_prime(p) for p in f.primes)
    return math.prod(p ** (e - 1) * (p - 1) for p, e in f.factors)


@pytest.mark.criterion(8, "omega and tau bounds for 3 <= n <= 10^6 (< 2 min); phi bound on the sample")
def test_arithmetic_function_bounds():
    start = time.perf_counter()
    for which in ("omega", "tau"):
        res = exhaustive_omega_tau(10**6 + 1, which)
        assert res.failures == () and res.checked == 10**6 - 2
    assert time.perf_counter() - start < 120
    for n in range(3, 2000):
        assert check_af_bounds(n).ok
    for n in PHI_SAMPLE:
        assert n >= PHI_THRESHOLD
        assert check_phi_bound(n, closed_form_phi(n)).holds is True, n


def lucas(n):
    a, b = 2, 1
    for _ in range(n):
        a, b = b, a + b
    return a


@pytest.mark.criterion(9, "spot values")
def test_spot_values():
    silver = parse_element("1+1*sqrt(2)")
    assert compute_P(silver, 3).P == 7
    assert compute_P(silver, 5).P == 41
    golden = parse_element("(1,-1,-1)+")
    for n in range(1, 31):
        assert (golden**n - 1).norm() == (-1) ** n - lucas(n) + 1, n
    assert largest_prime_factor(2**11 - 1) == 89
    assert compute_P(parse_element("2"), 11).P == 89


@pytest.mark.criterion(10, "verify 3..100 exits 0 in < 5 min; bound-table emits 98 unflagged rows")
def test_end_to_end():
    cmd = [sys.executable, "-m", "quadlucas.cli"]
    start = time.perf_counter()
    r = subprocess.run(cmd + ["verify", "--gamma", "1+1*sqrt(2)", "--n", "3..100"], capture_output=True, text=True, timeout=300)
    assert r.returncode == 0, r.stderr
    assert time.perf_counter() - start < 300
    r = subprocess.run(cmd + ["bound-table", "--gamma", "1+1*sqrt(2)", "--n", "3..100"], capture_output=True, text=True, timeout=300)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(io.StringIO(r.stdout)))
    assert len(rows) == 98
    assert all(row["exact"] == "true" for row in rows)
