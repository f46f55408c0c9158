"""Integer cyclotomic polynomials and the two height estimates for Phi_n(gamma)."""

from __future__ import annotations

import threading
from dataclasses import dataclass

from . import intervals as ia
from .arith import divisors, euler_phi, omega
from .errors import HypothesisNotMet, NotAUnit, RootOfUnityAtN
from .field import FieldElement
from .heights import height
from .ideals import PrimeIdeal, Primitivity, classify_primitivity, valuation, valuation_n
from .ledger import Row

MEMO_LIMIT = 10**5

_memo: dict[int, tuple[int, ...]] = {}
_memo_lock = threading.Lock()


def poly_mul(f, g) -> list[int]:
    """Product of coefficient lists (lowest degree first)."""
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def poly_divexact(f, g) -> list[int]:
    """f / g for monic g dividing f exactly over Z."""
    f = list(f)
    dg = len(g) - 1
    if g[-1] != 1:
        raise ValueError("divisor must be monic")
    q = [0] * (len(f) - dg)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i]
        if c:
            q[i - dg] = c
            for j in range(dg + 1):
                f[i - dg + j] -= c * g[j]
    if any(f[:dg]):
        raise ArithmeticError("division is not exact")
    return q


def _coefficients(n: int) -> tuple[int, ...]:
    cached = _memo.get(n)
    if cached is not None:
        return cached
    poly = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        poly = poly_divexact(poly, _coefficients(d))
    coeffs = tuple(poly)
    if n <= MEMO_LIMIT:
        with _memo_lock:
            _memo[n] = coeffs
    return coeffs


@dataclass(frozen=True)
class CycPoly:
    n: int
    coefficients: tuple[int, ...]  # lowest degree first

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __str__(self):
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if not c:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            coef = str(abs(c)) if (abs(c) != 1 or k == 0) else ""
            terms.append(("- " if c < 0 else "+ ") + coef + mono)
        s = " ".join(terms)
        if s.startswith("+ "):
            return s[2:]
        return "-" + s[2:]


def cyclotomic(n: int) -> CycPoly:
    if n < 1:
        raise ValueError("n must be >= 1")
    return CycPoly(n, _coefficients(n))


def eval_cyclotomic(n: int, x: FieldElement) -> FieldElement:
    """Phi_n(x) by Horner's rule, exactly."""
    coeffs = cyclotomic(n).coefficients
    acc = x.field.rational(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _nonzero_phi(gamma: FieldElement, n: int) -> FieldElement:
    value = eval_cyclotomic(n, gamma)
    if value.is_zero:
        raise RootOfUnityAtN(f"Phi_{n}({gamma}) = 0")
    return value


def check_prop21_item1(gamma: FieldElement, n: int, phi_value: FieldElement | None = None) -> Row:
    """|h(Phi_n(gamma)) - phi(n) h(gamma)| <= 2^omega(n) log(pi n)."""
    value = phi_value if phi_value is not None else _nonzero_phi(gamma, n)
    if value.is_zero:
        raise RootOfUnityAtN(f"Phi_{n}({gamma}) = 0")
    tot, w = euler_phi(n), omega(n)

    def build():
        lhs = abs(height(value) - tot * height(gamma))
        rhs = 2**w * ia.log(ia.pi() * n)
        return lhs, rhs

    return Row.compare("prop21.1", build, "<=")


def check_prop21_item2(gamma: FieldElement, n: int, phi_value: FieldElement | None = None) -> Row:
    """log|Phi_n(gamma^sigma)| >= -10^14 d^5 h(gamma) 2^omega(n) log* n, worst embedding."""
    value = phi_value if phi_value is not None else _nonzero_phi(gamma, n)
    if value.is_zero:
        raise RootOfUnityAtN(f"Phi_{n}({gamma}) = 0")
    d = gamma.degree
    w = omega(n)

    def build():
        logs = value.log_abs_embeddings()
        lo = ia.RealApprox.hull(min(r.lo for r in logs), min(r.hi for r in logs))
        rhs = -(10**14) * d**5 * height(gamma) * 2**w * ia.log_star(n)
        return lo, rhs

    return Row.compare("prop21.2", build, ">=")


def check_prop22(
    gamma: FieldElement,
    n: int,
    P: PrimeIdeal,
    phi_value: FieldElement | None = None,
    strict: bool = False,
) -> list[Row]:
    """Primitive divisor facts at one prime P with nu_P(gamma) = 0.

    Primitive P: nu_P(Phi_n(gamma)) >= 1, N(P) = 1 mod n, and nu_P(u_n) >= nu_P(Phi_n(gamma)).
    Non-primitive P dividing u_n: nu_P(Phi_n(gamma)) <= nu_P(n), only for n >= 2^(d+1);
    below that the row is skipped, or HypothesisNotMet is raised when ``strict``.
    """
    if valuation(gamma, P) != 0:
        raise NotAUnit(f"{gamma} is not a unit at {P}")
    value = phi_value if phi_value is not None else _nonzero_phi(gamma, n)
    verdict = classify_primitivity(gamma, n, P)
    tag = f"[{P.name}]"
    v_phi = valuation(value, P)
    if verdict.verdict is Primitivity.PRIMITIVE:
        u = gamma**n - 1
        v_u = valuation(u, P)
        return [
            Row.exact("prop22.1" + tag, v_phi, 1, ">="),
            Row.exact("prop22.1.cong" + tag, P.norm % n, 1 % n, "==", note=f"N(P) = {P.norm}"),
            Row.exact("prop22.1.un" + tag, v_u, v_phi, ">=", note="nu(u_n) against nu(Phi_n)"),
        ]
    if verdict.verdict is Primitivity.NOT_A_DIVISOR:
        return [Row.vacuous("prop22" + tag, v_phi, 0, note="P does not divide u_n")]
    bound = valuation_n(n, P)
    if n < 2 ** (gamma.degree + 1):
        if strict:
            raise HypothesisNotMet(f"n = {n} < 2^(d+1)")
        return [Row.skipped("prop22.2" + tag, v_phi, bound, note="needs n >= 2^(d+1)")]
    return [Row.exact("prop22.2" + tag, v_phi, bound, "<=")]
