"""Command-line interface.

Usage:
    quadlucas factor-seq --gamma "1+1*sqrt(2)" --n 1..6
    quadlucas verify --gamma "1+1*sqrt(2)" --n 3..100
    quadlucas bound-table --gamma "1+1*sqrt(2)" --n 3..100 --format json
    quadlucas primitive-divisors --gamma "(1,-1,-1)+" --n 1..30
    quadlucas cache stats --cache factors.txt

Exit status: 0 ok, 2 bad input (parse error, root of unity), 3 factoring
budget exceeded (affected rows are flagged), 4 an asserted check failed.
"""

from __future__ import annotations

import contextlib
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction

import click

from . import intervals as ia
from .arith import UNLIMITED, FactorBudget, FactorCache, divisors, factor, factor_with_hints, format_factors
from .emit import FORMATS, TableEmitter, dumps
from .errors import DomainError, ParseError, QuadLucasError
from .field import FieldElement, format_element, parse_element
from .ideals import classify_by_definition, classify_primitivity, ideals_above, valuation
from .verifier import _norm_factorization, _phi, build_ledger, scan

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_FAILED = 4

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    gammas: tuple[FieldElement, ...]
    n_range: range
    budget: FactorBudget
    fmt: str
    cache: FactorCache | None
    oracle: bool
    jobs: int


def parse_range(text: str) -> range:
    """``A..B`` (inclusive; empty when B < A) or a single ``N``."""
    s = text.strip()
    try:
        if ".." in s:
            a, b = s.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(s)
    except ValueError:
        raise ParseError(f"bad range {text!r}; expected A..B") from None
    if lo < 1:
        raise ParseError("n must be >= 1")
    return range(lo, hi + 1)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _config(ctx_obj: dict, gammas, n, fmt, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs) -> RunConfig:
    try:
        elements = tuple(parse_element(g) for g in gammas)
        n_range = parse_range(n)
    except ParseError as exc:
        _fail(EXIT_INPUT, str(exc))
    for g in elements:
        if g.is_root_of_unity():
            _fail(EXIT_INPUT, f"{format_element(g)} is a root of unity")
    if precision_ceiling is not None:
        ia.set_precision_ceiling(precision_ceiling)
    try:
        budget = FactorBudget(budget_ms, rho_rounds) if (budget_ms or rho_rounds) else UNLIMITED
    except ValueError as exc:
        _fail(EXIT_INPUT, str(exc))
    if jobs < 1:
        _fail(EXIT_INPUT, "--jobs must be positive")
    return RunConfig(elements, n_range, budget, fmt, FactorCache(cache) if cache else None, oracle, jobs)


def common_options(f):
    options = [
        click.option("--gamma", "gammas", multiple=True, required=True, help='Element literal, "x+y*sqrt(m)" or "(a,b,c)+".'),
        click.option("--n", "n", default="1..20", show_default=True, help="Index range A..B."),
        click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True),
        click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout."),
        click.option("--cache", type=click.Path(dir_okay=False), envvar="QUADLUCAS_CACHE", default=None, help="Factor cache file."),
        click.option("--budget-ms", type=int, default=None, help="Time budget per factorization."),
        click.option("--rho-rounds", type=int, default=None, help="Pollard rho iteration budget per factorization."),
        click.option("--precision-ceiling", type=int, default=None, help="Max interval precision in bits."),
        click.option("--oracle", is_flag=True, help="Cross-check primitivity against the definitional scan."),
        click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes."),
    ]
    for opt in reversed(options):
        f = opt(f)
    return f


def _open(output):
    if output is None:
        return contextlib.nullcontext(click.get_text_stream("stdout"))
    return open(output, "w", encoding="utf-8", newline="\n")


@click.group()
@click.option("-v", "--verbose", count=True)
@click.pass_context
def cli(ctx, verbose):
    """Primitive divisors of gamma^n - 1 in quadratic fields."""
    logging.basicConfig(level=logging.WARNING - 10 * verbose, format="%(levelname)s %(name)s: %(message)s")
    ctx.ensure_object(dict)


def _signed_factors(q: Fraction, num_f, den_f) -> str:
    s = ("-" if q < 0 else "") + (format_factors(num_f.factors) or "1")
    if num_f.unfactored:
        s += " * " + " * ".join(f"[{c}]" for c in num_f.unfactored)
    if q.denominator != 1:
        s += " / " + format_factors(den_f.factors)
    return s


@cli.command("factor-seq")
@common_options
@click.pass_context
def factor_seq(ctx, gammas, n, fmt, output, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs):
    """N(u_n), its factorization, valuations and primitive primes."""
    cfg = _config(ctx.obj, gammas, n, fmt, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs)
    columns = ["gamma", "n", "norm", "factorization", "valuations", "primitive", "exact"]
    status = EXIT_OK
    with _open(output) as out, TableEmitter(out, columns, fmt) as em:
        for gamma in cfg.gammas:
            for k in cfg.n_range:
                hints: set[int] = set()
                for d in divisors(k):
                    hints.update(_norm_factorization(_phi(gamma, d), cfg.cache, cfg.budget).primes)
                u = gamma**k - 1
                q = u.norm()
                num_f = factor_with_hints(q.numerator, hints, cfg.cache, cfg.budget)
                den_f = factor(q.denominator) if q.denominator != 1 else None
                primes = set(num_f.primes) | set(den_f.primes if den_f else ())
                vals = ideals_above(u, sorted(primes))
                prim = []
                for P, v in vals:
                    if v > 0 and valuation(gamma, P) == 0:
                        verdict = classify_primitivity(gamma, k, P)
                        if cfg.oracle and classify_by_definition(gamma, k, P) is not verdict.verdict:
                            log.error("primitivity disagreement at n=%d, %s", k, P.name)
                            status = EXIT_FAILED
                        if verdict.primitive:
                            prim.append(P.name)
                if not num_f.complete and status == EXIT_OK:
                    status = EXIT_BUDGET
                em.write({
                    "gamma": format_element(gamma),
                    "n": k,
                    "norm": str(q),
                    "factorization": _signed_factors(q, num_f, den_f),
                    "valuations": " ".join(f"{P.name}={v}" for P, v in vals),
                    "primitive": " ".join(prim),
                    "exact": num_f.complete,
                })
    sys.exit(status)


@cli.command("verify")
@common_options
@click.pass_context
def verify(ctx, gammas, n, fmt, output, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs):
    """Build the full ledger for every n; exit 4 if an asserted row fails."""
    cfg = _config(ctx.obj, gammas, n, fmt, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs)
    columns = ["gamma", "n", "id", "lhs", "relation", "rhs", "verdict", "margin", "asserted", "note"]
    failures = 0
    flagged = 0
    ledgers = []
    with _open(output) as out:
        em = None if fmt == "json" else TableEmitter(out, columns, fmt)
        for gamma in cfg.gammas:
            for L in _ledgers(gamma, cfg):
                failures += len(L.rows.failures())
                flagged += not L.P.exact
                if em is None:
                    ledgers.append(L.to_dict())
                    continue
                for r in L.rows.rows:
                    em.write({"gamma": format_element(gamma), "n": L.n, **r.to_dict()})
        if em is None:
            out.write(dumps(ledgers))
        else:
            em.close()
    click.echo(f"{failures} asserted failure(s), {flagged} ledger(s) with budget flags", err=True)
    sys.exit(EXIT_FAILED if failures else EXIT_BUDGET if flagged else EXIT_OK)


def _ledger_job(args):
    gamma, k, budget, oracle, path = args
    cache = FactorCache(path) if path else None
    return build_ledger(gamma, k, cache, budget, oracle=oracle)


def _ledgers(gamma, cfg: RunConfig):
    if cfg.jobs <= 1:
        for k in cfg.n_range:
            yield build_ledger(gamma, k, cfg.cache, cfg.budget, oracle=cfg.oracle)
        return
    from concurrent.futures import ProcessPoolExecutor

    path = cfg.cache.path if cfg.cache else None
    with ProcessPoolExecutor(cfg.jobs) as pool:
        yield from pool.map(_ledger_job, [(gamma, k, cfg.budget, cfg.oracle, path) for k in cfg.n_range])


@cli.command("bound-table")
@common_options
@click.pass_context
def bound_table(ctx, gammas, n, fmt, output, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs):
    """P against n exp(0.0001 log n / loglog n)."""
    cfg = _config(ctx.obj, gammas, n, fmt, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs)
    columns = ["gamma", "n", "P", "bound", "ratio", "f1_primitive", "f2_primitive", "exact"]
    flagged = 0
    with _open(output) as out, TableEmitter(out, columns, fmt) as em:
        for gamma in cfg.gammas:
            def emit(row, g=format_element(gamma)):
                em.write({"gamma": g, **row.to_dict(), "bound": row.bound, "ratio": row.ratio})

            rows = scan(gamma, cfg.n_range, emit, cfg.cache, cfg.budget, jobs=cfg.jobs)
            flagged += sum(not r.exact for r in rows)
    sys.exit(EXIT_BUDGET if flagged else EXIT_OK)


@cli.command("primitive-divisors")
@common_options
@click.pass_context
def primitive_divisors(ctx, gammas, n, fmt, output, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs):
    """Primitive prime ideals of u_n (all found among the primes of Phi_n(gamma))."""
    cfg = _config(ctx.obj, gammas, n, fmt, cache, budget_ms, rho_rounds, precision_ceiling, oracle, jobs)
    columns = ["gamma", "n", "ideal", "p", "f", "norm", "valuation", "exact"]
    status = EXIT_OK
    with _open(output) as out, TableEmitter(out, columns, fmt) as em:
        for gamma in cfg.gammas:
            for k in cfg.n_range:
                value = _phi(gamma, k)
                f = _norm_factorization(value, cfg.cache, cfg.budget)
                if not f.complete and status == EXIT_OK:
                    status = EXIT_BUDGET
                for P, v in ideals_above(value, f.primes):
                    if v <= 0 or valuation(gamma, P) != 0:
                        continue
                    verdict = classify_primitivity(gamma, k, P)
                    if cfg.oracle and classify_by_definition(gamma, k, P) is not verdict.verdict:
                        log.error("primitivity disagreement at n=%d, %s", k, P.name)
                        status = EXIT_FAILED
                    if verdict.primitive:
                        em.write({
                            "gamma": format_element(gamma), "n": k, "ideal": P.name, "p": P.p,
                            "f": P.f, "norm": P.norm, "valuation": v, "exact": f.complete,
                        })
    sys.exit(status)


@cli.group("cache")
def cache_group():
    """Factor cache maintenance."""


@cache_group.command("stats")
@click.option("--cache", type=click.Path(dir_okay=False), envvar="QUADLUCAS_CACHE", required=True)
def cache_stats(cache):
    """Entry count, size and skipped lines of a cache file."""
    click.echo(dumps(FactorCache(cache).stats()), nl=False)


def main():
    try:
        cli(obj={})
    except QuadLucasError as exc:
        code = EXIT_INPUT if isinstance(exc, (ParseError, DomainError)) else EXIT_FAILED
        _fail(code, str(exc))


if __name__ == "__main__":
    main()
