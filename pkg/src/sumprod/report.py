"""Structured experiment output.

Rows are plain dicts; ratio rows carry ``"assert": "no-assert (implicit constant)"``.
Verdicts must name an assertion id from :data:`ASSERTIONS`, so every pass/fail
line in a report traces back to one module-level invariant.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import __version__

NO_ASSERT = "no-assert (implicit constant)"

ASSERTIONS = {
    # exact-sets
    "sets.plunnecke": "|nB-mB| <= K^(n+m)|A| with K = |A+B|/|A|",
    "sets.plunnecke-subset": "some X in A, |X| >= (1-delta)|A|, has |X+kB| <= (K/delta)^k |X|",
    "sets.ruzsa-triangle": "|C||A-B| <= |A-C||B-C|",
    "sets.sumset-lower": "|A+B| >= |A|+|B|-1",
    # energy-stats
    "energy.triples-oracle": "collinear triples: fast path equals sextuple enumeration",
    "energy.rep-total": "sum of representation counts equals |A||B|",
    "energy.sigma-full": "sigma over (A-A)\\{0} equals |A|^2-|A|",
    # ratio-sets
    "ratio.reflection": "R = 1 - R",
    "ratio.inverse": "{1/r : r in R, r != 0} | {0} = R",
    "ratio.sandwich": "R[A] in D/D in R[A]R[A]",
    "ratio.sandwich-lower": "R[A] in D/D",
    "ratio.sandwich-minus-one": "D/D in R[A]R[A] | {-1}",
    "ratio.negation": "|R| = |-R & (R-1)|",
    "ratio.size-lower": "|R[A]| >= |A|-1",
    "ratio.dyadic-mass": "sigma over popular differences >= |A|^2/2 and buckets partition them",
    "ratio.sigma-identity": "|A| sigma_X = sum over lambda in R_X of x-weighted triple intersections",
    "ratio.sigma-T": "|A|^2 sigma_X^2 <= |R_X| T(A)",
    # incidence-szt
    "szt.incidences": "hashed incidence count equals the naive double loop",
    "szt.pseudo-lines": "pairwise intersections: lines <= 1, hyperbolas <= 2",
    "szt.convex-sample": "tau-rich count <= 4|A||B|^2/tau^3 for convex A",
    "szt.convex-certificate": "(2|I|-1)^2/|I|^2 < 4",
    "szt.d-simple": "1 <= |f(A)+C|^2/(|A||C|) when |f(A)+C| >= max(|A|,|C|)",
    # prime-field
    "fp.subgroup-formula": "|theta| <= 1 in the shifted-intersection formula",
    "fp.many-shifts": "explicit many-shifts bound (only when hypotheses hold)",
    "fp.reflection": "R = 1 - R over F_p",
    "fp.inverse": "R^-1 = R over F_p (0 paired with itself)",
    "fp.sandwich": "R[A] in D/D in R[A]R[A] over F_p",
    "fp.negation": "|R| = |-R & (R-1)| over F_p",
    "fp.triples-oracle": "F_p collinear triples: fast equals oracle",
    "fp.pair-count": "sum over x != 0 of |G & (G+x)| = |G|^2 - |G|",
    "fp.closure": "subgroup is closed under multiplication",
    # extremal-search
    "extremal.gp-size": "|D| = n^2 - n + 1 for A = {2,...,2^n}",
    "extremal.gp-bound": "|DD|, |D/D| <= 25|D|^(3/2)",
    "extremal.gp-cube": "|DD|, |D/D| <= (2n)^3",
    "extremal.clique-valid": "A - A in xi*Gamma | {0}",
    "extremal.clique-oracle": "branch-and-bound clique number equals exhaustive oracle",
    "extremal.paley13": "p=13 quadratic residues: max |A| = 3 with A - A = QR | {0}",
    # cli-runner
    "runner.golden": "ratio CSV is byte-identical across runs",
    "runner.criterion": "a numbered verification criterion passes within its time budget",
}


def jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return value.to_json()
    return value


@dataclass
class Fragment:
    """One computed quantity against a bound with an unspecified constant."""

    quantity: str
    value: Any
    bound_expression: str | None = None
    bound_value: Any = None
    ratio: float | None = None
    side: str | None = None

    def to_json(self) -> dict:
        out = {
            "quantity": self.quantity,
            "value": jsonable(self.value),
            "bound_expression": self.bound_expression,
            "bound_value": jsonable(self.bound_value),
            "ratio": jsonable(self.ratio),
            "assert": NO_ASSERT,
        }
        if self.side:
            out["side"] = self.side
        return out


@dataclass
class Verdict:
    assertion: str
    passed: bool
    witness: Any = None

    def __post_init__(self):
        if self.assertion not in ASSERTIONS:
            raise KeyError(f"unregistered assertion id {self.assertion!r}")

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {
            "assertion": self.assertion,
            "result": "pass" if self.passed else "fail",
            "witness": jsonable(self.witness),
        }


@dataclass
class Report:
    command: str
    config: dict = field(default_factory=dict)
    seed: int | None = None
    rows: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, row) -> None:
        self.rows.append(row.to_json() if hasattr(row, "to_json") else jsonable(row))

    def check(self, verdict: Verdict) -> Verdict:
        self.verdicts.append(verdict)
        return verdict

    @property
    def ok(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def header(self) -> dict:
        return {
            "artifact": "sumprod",
            "version": __version__,
            "command": self.command,
            "config": jsonable(self.config),
            "seed": self.seed,
        }

    def summary(self) -> dict:
        counts: dict = {}
        for v in self.verdicts:
            c = counts.setdefault(v.assertion, {"pass": 0, "fail": 0})
            c["pass" if v.passed else "fail"] += 1
        failed = [v.to_json() for v in self.verdicts if not v.passed][:20]
        return {
            "summary": True,
            "ok": self.ok,
            "rows": len(self.rows),
            "verdicts": counts,
            "failures": failed,
            "notes": self.notes,
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps({"header": self.header()}, sort_keys=True)]
        lines += [json.dumps({"row": r}, sort_keys=True) for r in self.rows]
        lines += [json.dumps({"verdict": v.to_json()}, sort_keys=True) for v in self.verdicts]
        lines.append(json.dumps(self.summary(), sort_keys=True))
        return "\n".join(lines) + "\n"


def rows_to_csv(rows: list, columns: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _csv_cell(r.get(k)) for k in columns})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, Fraction):
        return str(v)
    return v
