"""Explicit bounds for phi, omega and tau, checked with certified logs."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import intervals as ia
from .arith import euler_phi, omega, tau

PHI_THRESHOLD = 10**20

# n >= 10^20 with factorizations that stress n/phi(n): primorials, prime powers,
# and the threshold itself.
PHI_SAMPLE = (
    10**20,
    2**67,
    3**42,
    2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29 * 31 * 37 * 41 * 43 * 47 * 53 * 59,
    2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29 * 31 * 37 * 41 * 43 * 47 * 53 * 59 * 61 * 67 * 71,
    2**10 * 3**5 * 5**3 * 7**2 * 11 * 13 * 17 * 19 * 23 * 29 * 31 * 37 * 41 * 43,
    10**20 + 39,
    10**25 + 13,
    10**30,
)


@dataclass(frozen=True)
class BoundCheck:
    holds: bool | None
    value: object
    bound: ia.RealApprox
    margin: ia.RealApprox


@dataclass(frozen=True)
class AFBoundReport:
    """phi(n) >= 0.5 n/loglog n (n >= 10^20 only), omega and tau bounds (n >= 3)."""

    n: int
    phi: BoundCheck | None
    omega: BoundCheck | None
    tau: BoundCheck | None

    @property
    def ok(self) -> bool:
        return all(c is None or c.holds for c in (self.phi, self.omega, self.tau))


def _loglog_ratio(n: int) -> ia.RealApprox:
    return ia.log(n) / ia.log_log(n)


def check_phi_bound(n: int, phi_n: int | None = None) -> BoundCheck:
    phi_n = euler_phi(n) if phi_n is None else phi_n
    c = ia.certify(lambda: (phi_n, ia.RealApprox.of(n) / 2 / ia.log_log(n)), ">=")
    return BoundCheck(c.holds, phi_n, c.rhs, c.margin)


def check_omega_bound(n: int, omega_n: int | None = None) -> BoundCheck:
    omega_n = omega(n) if omega_n is None else omega_n
    c = ia.certify(lambda: (omega_n, ia.RealApprox.of("1.4") * _loglog_ratio(n)), "<=")
    return BoundCheck(c.holds, omega_n, c.rhs, c.margin)


def check_tau_bound(n: int, tau_n: int | None = None) -> BoundCheck:
    tau_n = tau(n) if tau_n is None else tau_n
    c = ia.certify(lambda: (tau_n, ia.exp(ia.RealApprox.of("1.1") * _loglog_ratio(n))), "<=")
    return BoundCheck(c.holds, tau_n, c.rhs, c.margin)


def check_af_bounds(n: int) -> AFBoundReport:
    if n < 3:
        return AFBoundReport(n, None, None, None)
    phi = check_phi_bound(n) if n >= PHI_THRESHOLD else None
    return AFBoundReport(n, phi, check_omega_bound(n), check_tau_bound(n))


@dataclass(frozen=True)
class ExhaustiveResult:
    limit: int
    checked: int
    failures: tuple[int, ...]
    rechecked: tuple[int, ...]  # n whose float margin was too thin and went to intervals
    min_margin: float
    argmin: int


def exhaustive_omega_tau(limit: int, which: str) -> ExhaustiveResult:
    """Check the omega ('omega') or tau ('tau') bound for all 3 <= n < limit.

    float64 screening with a relative safety gap of 1e-9; anything inside
    the gap is re-decided with interval arithmetic.
    """
    import numpy as np

    from .arith import arithmetic_sieve

    tables = arithmetic_sieve(limit)
    n = np.arange(limit, dtype=np.float64)
    n[:3] = 3.0
    ratio = np.log(n) / np.log(np.log(n))
    if which == "omega":
        values = tables.omega.astype(np.float64)
        bound = 1.4 * ratio
        margin = bound - values
        exact_check = check_omega_bound
        arr = tables.omega
    elif which == "tau":
        values = np.log(np.maximum(tables.tau, 1).astype(np.float64))
        bound = 1.1 * ratio
        margin = bound - values
        exact_check = check_tau_bound
        arr = tables.tau
    else:
        raise ValueError(which)
    margin[:3] = np.inf
    thin = np.nonzero(margin <= 1e-9 * np.maximum(1.0, np.abs(bound)))[0]
    failures = []
    for k in thin:
        k = int(k)
        if not exact_check(k, int(arr[k])).holds:
            failures.append(k)
    argmin = int(np.argmin(margin))
    return ExhaustiveResult(
        limit, limit - 3, tuple(failures), tuple(int(k) for k in thin), float(margin[argmin]), argmin
    )


def divisor_log_sum_check(n: int) -> tuple[int, int, bool]:
    """sum_{m|n} log m <= tau(n) log n, compared log-free as prod(m) <= n^tau(n)."""
    from .arith import divisors

    prod = math.prod(divisors(n))
    bound = n ** tau(n)
    return prod, bound, prod <= bound
