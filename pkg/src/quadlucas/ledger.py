"""Ledger rows: one checked (or merely reported) inequality each."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import intervals as ia


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    VACUOUS = "vacuous"
    SKIPPED = "skipped-hypothesis"
    UNDECIDABLE = "undecidable"


_OK = {Verdict.HOLDS, Verdict.VACUOUS, Verdict.SKIPPED}


@dataclass
class Row:
    """``lhs rel rhs`` with a verdict.

    Only rows with ``asserted=True`` count towards a run's exit status;
    report rows record both sides of bounds whose derivation needs n >= n0.
    """

    id: str
    lhs: object
    rhs: object
    verdict: Verdict
    margin: object = None
    asserted: bool = True
    relation: str = "<="
    note: str = ""

    @property
    def ok(self) -> bool:
        return not self.asserted or self.verdict in _OK

    @classmethod
    def compare(
        cls,
        id: str,
        build: Callable[[], tuple],
        relation: str = "<=",
        asserted: bool = True,
        note: str = "",
    ) -> "Row":
        c = ia.certify(build, relation)
        if c.holds is None:
            verdict = Verdict.UNDECIDABLE
        else:
            verdict = Verdict.HOLDS if c.holds else Verdict.FAILS
        return cls(id, c.lhs, c.rhs, verdict, c.margin, asserted, relation, note)

    @classmethod
    def equal(cls, id: str, build: Callable[[], tuple], tolerance: float = 1e-9, asserted: bool = True, note: str = "") -> "Row":
        c = ia.certify_equal(build, tolerance)
        if c.holds is None:
            verdict = Verdict.UNDECIDABLE
        else:
            verdict = Verdict.HOLDS if c.holds else Verdict.FAILS
        margin = ia.RealApprox.of(max(c.lhs.hi, c.rhs.hi) - min(c.lhs.lo, c.rhs.lo))
        return cls(id, c.lhs, c.rhs, verdict, margin, asserted, "==", note)

    @classmethod
    def exact(cls, id: str, lhs, rhs, relation: str = "<=", asserted: bool = True, note: str = "") -> "Row":
        """Compare exact integers / fractions."""
        holds = {
            "<=": lhs <= rhs,
            "<": lhs < rhs,
            ">=": lhs >= rhs,
            ">": lhs > rhs,
            "==": lhs == rhs,
        }[relation]
        if relation in ("<=", "<"):
            margin = rhs - lhs
        elif relation in (">=", ">"):
            margin = lhs - rhs
        else:
            margin = 0 if holds else None
        return cls(id, lhs, rhs, Verdict.HOLDS if holds else Verdict.FAILS, margin, asserted, relation, note)

    @classmethod
    def skipped(cls, id: str, lhs=None, rhs=None, note: str = "", asserted: bool = True) -> "Row":
        return cls(id, lhs, rhs, Verdict.SKIPPED, None, asserted, note=note)

    @classmethod
    def vacuous(cls, id: str, lhs=None, rhs=None, note: str = "") -> "Row":
        return cls(id, lhs, rhs, Verdict.VACUOUS, None, True, note=note)

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "lhs": render(self.lhs),
            "rhs": render(self.rhs),
            "verdict": self.verdict.value,
            "margin": render(self.margin),
            "asserted": self.asserted,
            "relation": self.relation,
        }
        for key, value in (("lhs_err", self.lhs), ("rhs_err", self.rhs)):
            if isinstance(value, ia.RealApprox):
                out[key] = f"{value.err:.3e}"
        if self.note:
            out["note"] = self.note
        return out


def render(value, digits: int = 15):
    """Common cell rendering for CSV and JSON output."""
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, ia.RealApprox):
        return value.render(digits)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return format(value, f".{digits}g")
    return str(value)


@dataclass
class RowSet:
    rows: list[Row] = field(default_factory=list)

    def add(self, row: Row) -> Row:
        self.rows.append(row)
        return row

    def extend(self, rows) -> None:
        self.rows.extend(rows)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.ok]

    def by_id(self, prefix: str) -> list[Row]:
        return [r for r in self.rows if r.id == prefix or r.id.startswith(prefix + "[")]
