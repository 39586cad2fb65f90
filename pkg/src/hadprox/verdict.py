"""Three-valued test outcomes and theorem reports."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping


class UsageError(ValueError):
    """Raised when an operation is called outside its preconditions."""


class Outcome(enum.Enum):
    CONSISTENT = "ConsistentWith"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Verdict:
    """Outcome of a numerical check.

    ``residual`` is the worst observed quantity the check compares against
    its tolerance (larger is worse). ``witness`` holds whatever locates the
    worst case: points, lambda, index n. ``parts`` keeps named sub-verdicts
    and ``series`` keeps plottable (abscissa, value) pairs.
    """

    outcome: Outcome
    residual: float = 0.0
    witness: Mapping[str, Any] = field(default_factory=dict)
    notes: str = ""
    parts: Mapping[str, "Verdict"] = field(default_factory=dict)
    series: Mapping[str, tuple] = field(default_factory=dict)
    details: Mapping[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.outcome is Outcome.CONSISTENT

    @property
    def violated(self) -> bool:
        return self.outcome is Outcome.VIOLATED

    @property
    def inconclusive(self) -> bool:
        return self.outcome is Outcome.INCONCLUSIVE

    @classmethod
    def consistent(cls, residual: float = 0.0, **kw) -> "Verdict":
        return cls(Outcome.CONSISTENT, residual, **kw)

    @classmethod
    def violation(cls, residual: float = math.inf, **kw) -> "Verdict":
        return cls(Outcome.VIOLATED, residual, **kw)

    @classmethod
    def unknown(cls, notes: str, residual: float = math.nan, **kw) -> "Verdict":
        return cls(Outcome.INCONCLUSIVE, residual, notes=notes, **kw)

    @classmethod
    def from_residual(cls, residual: float, tol: float, **kw) -> "Verdict":
        if math.isnan(residual):
            return cls.unknown(kw.pop("notes", "residual is NaN"), **kw)
        outcome = Outcome.CONSISTENT if residual <= tol else Outcome.VIOLATED
        return cls(outcome, residual, **kw)

    def __str__(self) -> str:
        return f"{self.outcome.value} (residual={self.residual:.3g})"


def combine(verdicts: Iterable[Verdict]) -> Outcome:
    """Conjunction: any Violated wins, then any Inconclusive."""
    outs = [v.outcome for v in verdicts]
    if Outcome.VIOLATED in outs:
        return Outcome.VIOLATED
    if Outcome.INCONCLUSIVE in outs:
        return Outcome.INCONCLUSIVE
    return Outcome.CONSISTENT


def all_of(parts: Mapping[str, Verdict], notes: str = "", **kw) -> Verdict:
    """Bundle named sub-verdicts into one conjunctive verdict."""
    outcome = combine(parts.values())
    residuals = [p.residual for p in parts.values() if not math.isnan(p.residual)]
    worst = max(residuals, default=0.0)
    witness: dict = {}
    for name, p in parts.items():
        if p.outcome is outcome and p.witness:
            witness = {"sub_check": name, **p.witness}
            break
    return Verdict(outcome, worst, witness=witness, notes=notes, parts=dict(parts), **kw)


@dataclass
class TheoremReport:
    """Hypotheses and conclusion of one implication, checked on instances.

    The conclusion is only asserted when every hypothesis is ConsistentWith;
    otherwise ``conclusion_verdict`` is Inconclusive and the raw conclusion
    checks are kept for information. ``falsified`` is raised when all
    hypotheses pass and a conclusion check fails.
    """

    theorem_id: str
    hypothesis_verdicts: dict[str, Verdict]
    conclusion_checks: dict[str, Verdict]
    conclusion_verdict: Outcome
    witnesses: list = field(default_factory=list)
    notes: str = ""
    auxiliary: dict[str, Verdict] = field(default_factory=dict)
    falsified: bool = False

    @property
    def outcome(self) -> Outcome:
        return self.conclusion_verdict

    def sub_checks(self) -> list[tuple[str, Verdict]]:
        rows = [(f"hypothesis:{k}", v) for k, v in self.hypothesis_verdicts.items()]
        rows += [(f"conclusion:{k}", v) for k, v in self.conclusion_checks.items()]
        rows += [(f"auxiliary:{k}", v) for k, v in self.auxiliary.items()]
        return rows


def implication(theorem_id: str, hypotheses: Mapping[str, Verdict],
                conclusions: Mapping[str, Verdict], notes: str = "",
                auxiliary: Mapping[str, Verdict] | None = None) -> TheoremReport:
    """Evaluate ``hypotheses => conclusions`` with implication discipline."""
    hyp_ok = all(v.ok for v in hypotheses.values())
    concl = combine(conclusions.values())
    falsified = hyp_ok and concl is Outcome.VIOLATED
    conclusion_verdict = concl if hyp_ok else Outcome.INCONCLUSIVE
    witnesses = [dict(v.witness, check=k) for k, v in conclusions.items() if v.witness]
    if not hyp_ok:
        failing = [k for k, v in hypotheses.items() if not v.ok]
        notes = (notes + "; " if notes else "") + "hypotheses not established: " + ", ".join(failing)
    if falsified:
        notes = (notes + "; " if notes else "") + "FALSIFICATION: hypotheses hold but conclusion fails"
    return TheoremReport(theorem_id, dict(hypotheses), dict(conclusions), conclusion_verdict,
                         witnesses, notes, dict(auxiliary or {}), falsified)
