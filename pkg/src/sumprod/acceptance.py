"""The verification suite behind ``verify-all``: eight numbered criteria with time budgets."""

from __future__ import annotations

import math
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from sympy import divisors, primerange

from .energy import collinear_triples
from .exact import ExactSet, card_prodset
from .extremal import (
    build_clique_instance,
    clique_oracle,
    geometric_progression_example,
    max_clique,
    paley13_verdict,
    subgroup_difference_sweep,
)
from .field import (
    FpSet,
    PrimeCtx,
    check_subgroup_formula,
    fp_collinear_triples,
    fp_ratio_set,
    fp_sandwich,
    make_subgroup,
)
from .generate import random_rationals
from .incidence import (
    Curve,
    Point,
    convex_certificate,
    convex_sample_verdict,
    count_incidences,
    sample_D_lower,
)
from .inequalities import plunnecke_check, plunnecke_subset_check, ruzsa_triangle_check
from .ratio import (
    check_inverse_identity,
    check_negation_trick,
    check_reflection_identity,
    ratio_set,
    ratio_set_restricted,
    sandwich,
)
from .report import Verdict, rows_to_csv

RATIO_COLUMNS = ["family", "param", "size", "R_log_over_A2", "T_over_A4log", "DD_over_D56_R14"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float
    budget: float
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def in_time(self) -> bool:
        return self.seconds < self.budget

    @property
    def ok(self) -> bool:
        return self.passed and self.in_time

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        extra = "" if self.in_time else " (over time budget)"
        return f"criterion {self.number} [{tag}] {self.title}: {self.seconds:.1f}s of {self.budget:.0f}s{extra}"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "result": "pass" if self.ok else "fail",
            "seconds": round(self.seconds, 3),
            "budget": self.budget,
            "details": self.details,
            "failures": self.failures[:10],
        }


class _Tally:
    """Verdict counts per assertion id, keeping the first few failures."""

    def __init__(self):
        self.counts: dict = {}
        self.failures: list = []

    def add(self, v: Verdict) -> Verdict:
        c = self.counts.setdefault(v.assertion, Counter())
        c["pass" if v.passed else "fail"] += 1
        if not v.passed and len(self.failures) < 10:
            self.failures.append(v.to_json())
        return v

    def ok(self, *ids) -> bool:
        keys = ids or tuple(self.counts)
        return all(self.counts.get(k, Counter())["fail"] == 0 for k in keys)

    def summary(self) -> dict:
        return {k: dict(v) for k, v in sorted(self.counts.items())}


def _random_symmetric_shifts(A: ExactSet, rng: random.Random) -> ExactSet:
    pos = [d for d in (A - A) if d > 0]
    chosen = rng.sample(pos, rng.randint(1, len(pos)))
    return ExactSet(chosen + [-d for d in chosen])


def _random_fp_shifts(D: FpSet, rng: random.Random) -> FpSet:
    nonzero = [d for d in D if d]
    chosen = rng.sample(nonzero, rng.randint(1, len(nonzero)))
    return FpSet(D.ctx, chosen + [-d for d in chosen])


def criterion_1(seed: int = 0, rational_sets: int = 500, field_sets: int = 200) -> CriterionResult:
    """Exact identities over Q and F_p, including the literal sandwich."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    tally, minus_one = _Tally(), _Tally()
    q_missing, fp_missing = Counter(), Counter()
    for _ in range(rational_sets):
        A = random_rationals(rng.randint(2, 30), rng, -60, 60, rng.choice([1, 1, 2, 3, 5]))
        B = random_rationals(rng.randint(2, 8), rng, -60, 60, rng.choice([1, 2]))
        tally.add(check_reflection_identity(ratio_set(A, B)))
        tally.add(check_reflection_identity(ratio_set_restricted(A, _random_symmetric_shifts(A, rng))))
        R = ratio_set(A)
        tally.add(check_inverse_identity(R))
        tally.add(check_negation_trick(R))
        sw = sandwich(A)
        tally.add(sw.verdict())
        q_missing.update(str(m) for m in sw.missing)
        minus_one.add(Verdict("ratio.sandwich-minus-one", sw.lower and set(sw.missing) <= {-1}, {"missing": [str(m) for m in sw.missing[:5]]}))
    primes = list(primerange(5, 200))
    for _ in range(field_sets):
        ctx = PrimeCtx.of(rng.choice(primes))
        A = FpSet(ctx, rng.sample(range(ctx.p), rng.randint(2, min(30, ctx.p))))
        B = FpSet(ctx, rng.sample(range(ctx.p), rng.randint(2, min(8, ctx.p))))
        tally.add(check_reflection_identity(fp_ratio_set(A, B)))
        tally.add(check_reflection_identity(fp_ratio_set(A, X=_random_fp_shifts(A - A, rng))))
        R = fp_ratio_set(A)
        tally.add(check_inverse_identity(R))
        tally.add(check_negation_trick(R))
        v, miss = fp_sandwich(A)
        tally.add(v)
        fp_missing.update("-1" if m == ctx.p - 1 else str(m) for m in miss)
        ok_corr = v.witness["lower"] and set(miss) <= {ctx.p - 1}
        minus_one.add(Verdict("ratio.sandwich-minus-one", ok_corr, {"p": ctx.p, "missing": miss[:5]}))
    seconds = time.perf_counter() - t0
    details = {
        "verdicts": tally.summary(),
        "elements of D/D missing from R[A]R[A]": {"Q": dict(q_missing), "F_p": dict(fp_missing)},
        "D/D in R[A]R[A] | {-1} (side check)": minus_one.summary(),
    }
    return CriterionResult(1, "exact identity suite", tally.ok(), seconds, 60, details, tally.failures)


def criterion_2(n_max: int = 40) -> CriterionResult:
    t0 = time.perf_counter()
    tally = _Tally()
    rows = []
    for n in range(2, n_max + 1):
        frags, verdicts = geometric_progression_example(n)
        for v in verdicts:
            tally.add(v)
        rows.append({"n": n, "|D|": frags[0].value, "|DD|": frags[1].value, "|D/D|": frags[2].value})
    details = {"verdicts": tally.summary(), "last": rows[-1]}
    return CriterionResult(2, "geometric progression example", tally.ok(), time.perf_counter() - t0, 120, details, tally.failures)


def criterion_3(p_max: int = 200, samples: int = 1000, seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    tally = _Tally()
    worst = {1: (0.0, None), 2: (0.0, None), 3: (0.0, None)}
    for p in primerange(3, p_max + 1):
        ctx = PrimeCtx.of(p)
        for d in divisors(p - 1):
            G = make_subgroup(ctx, d)
            for k in (1, 2, 3):
                res = check_subgroup_formula(G, k, None if k == 1 else samples, seed)
                tally.add(res.verdict)
                if res.worst_theta > worst[k][0]:
                    worst[k] = (res.worst_theta, {"p": p, "d": d, "shifts": res.verdict.witness["worst_shifts"]})
    details = {"verdicts": tally.summary(), "worst_theta": {k: {"theta": w, "at": at} for k, (w, at) in worst.items()}}
    return CriterionResult(3, "shifted subgroup intersections", tally.ok(), time.perf_counter() - t0, 120, details, tally.failures)


def random_incidence_instance(rng: random.Random, points: int = 30, curves: int = 30):
    P = [Point.of(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(points)]
    L = []
    for _ in range(curves):
        if rng.random() < 0.5:
            s, t = rng.randint(-2, 2), rng.randint(-2, 2)
            if s == 0 and t == 0:
                t = 1
            L.append(Curve.line(s, t, rng.randint(-4, 4)))
        else:
            alpha = rng.choice([a for a in range(-4, 5) if a])
            L.append(Curve.hyperbola(rng.randint(-3, 3), rng.randint(-3, 3), alpha))
    return P, L


def criterion_4(seed: int = 0, instances: int = 50, p_max: int = 61) -> CriterionResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    tally = _Tally()
    for _ in range(instances):
        A = random_rationals(rng.randint(1, 8), rng, -20, 20, rng.choice([1, 2]))
        fast, slow = collinear_triples(A), collinear_triples(A, mode="oracle")
        tally.add(Verdict("energy.triples-oracle", fast == slow, {"A": A.to_json(), "fast": fast, "oracle": slow}))
        B, C, D = (random_rationals(rng.randint(1, 6), rng, -10, 10) for _ in range(3))
        fast, slow = collinear_triples(A, B, C, D), collinear_triples(A, B, C, D, mode="oracle")
        tally.add(Verdict("energy.triples-oracle", fast == slow, {"A": A.to_json(), "fast": fast, "oracle": slow}))
        ctx = PrimeCtx.of(rng.choice([13, 17, 31, 101]))
        F = FpSet(ctx, rng.sample(range(ctx.p), rng.randint(1, 8)))
        fast, slow = fp_collinear_triples(F), fp_collinear_triples(F, "oracle")
        tally.add(Verdict("fp.triples-oracle", fast == slow, {"A": F.to_json(), "fast": fast, "oracle": slow}))
        P, L = random_incidence_instance(rng)
        h, n = count_incidences(P, L, "hashed"), count_incidences(P, L, "naive")
        tally.add(Verdict("szt.incidences", h == n, {"hashed": h, "naive": n}))
    cliques = 0
    for p in primerange(3, p_max + 1):
        ctx = PrimeCtx.of(p)
        for d in divisors(p - 1):
            G = make_subgroup(ctx, d)
            for xi in G.coset_reps():
                inst = build_clique_instance(ctx, G, xi)
                res, ref = max_clique(inst), clique_oracle(inst)
                cliques += 1
                tally.add(Verdict("extremal.clique-oracle", res.optimal and res.size == ref, {"spec": inst.spec(), "search": res.size, "oracle": ref}))
    details = {"verdicts": tally.summary(), "clique instances": cliques}
    return CriterionResult(4, "oracle equivalences", tally.ok(), time.perf_counter() - t0, 300, details, tally.failures)


def criterion_5(seed: int = 0, sizes=(5, 10, 20), samples: int = 200) -> CriterionResult:
    t0 = time.perf_counter()
    tally = _Tally()
    best = {}
    for n in sizes:
        A = ExactSet(i * i for i in range(1, n + 1))
        frag, drawn = sample_D_lower(A, "add", samples=samples, seed=seed + n)
        tally.add(convex_sample_verdict(A, drawn))
        tally.add(convex_certificate(n))
        best[n] = str(frag.value)
    details = {"verdicts": tally.summary(), "best witnessD": best}
    return CriterionResult(5, "convex sets: sampled rich-set bound", tally.ok(), time.perf_counter() - t0, 600, details, tally.failures)


def criterion_6(seed: int = 0, instances: int = 200) -> CriterionResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    tally = _Tally()

    def small():
        return random_rationals(rng.randint(1, 12), rng, -30, 30, rng.choice([1, 1, 2]))

    for i in range(instances):
        A, B = small(), small()
        n = rng.randint(0, 4)
        m = rng.randint(1 if n == 0 else 0, 4 - n)
        tally.add(plunnecke_check(A, B, n, m))
        tally.add(ruzsa_triangle_check(A, B, small()))
        if i % 4 == 0:
            A10 = random_rationals(rng.randint(1, 10), rng, -30, 30)
            tally.add(plunnecke_subset_check(A10, small(), Fraction(rng.randint(1, 3), 4), kmax=2))
    return CriterionResult(6, "Pluennecke-Ruzsa and Ruzsa triangle", tally.ok(), time.perf_counter() - t0, 30, {"verdicts": tally.summary()}, tally.failures)


def ratio_family(seed: int = 0) -> list:
    """Geometric n in [4, 16] and seeded random integer sets of sizes 8, 16, 32, 64."""
    fam = [("geometric", n, ExactSet(2**i for i in range(1, n + 1))) for n in range(4, 17)]
    rng = random.Random(seed)
    for size in (8, 16, 32, 64):
        fam.append(("random", size, random_rationals(size, rng, -1000, 1000)))
    return fam


def ratio_rows(seed: int = 0) -> list:
    rows = []
    for family, param, A in ratio_family(seed):
        n = len(A)
        D = A - A
        r = len(ratio_set(A))
        dd = card_prodset(D, D)
        rows.append(
            {
                "family": family,
                "param": param,
                "size": n,
                "R_log_over_A2": r * math.log2(n) / (n * n),
                "T_over_A4log": collinear_triples(A) / (n**4 * math.log2(n)),
                "DD_over_D56_R14": dd / (len(D) ** (5 / 6) * r**0.25),
            }
        )
    return rows


def ratio_csv(seed: int = 0) -> str:
    return rows_to_csv(ratio_rows(seed), RATIO_COLUMNS)


def criterion_7(golden: str | Path | None = None, seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    first = ratio_rows(seed)
    text = rows_to_csv(first, RATIO_COLUMNS)
    again = ratio_csv(seed)
    values = [r[c] for r in first for c in RATIO_COLUMNS[3:]]
    finite = all(math.isfinite(v) and v > 0 for v in values)
    deterministic = text == again
    details = {"rows": len(first), "finite_positive": finite, "repeat_identical": deterministic}
    matches = True
    if golden is not None:
        path = Path(golden)
        matches = path.exists() and path.read_text() == text
        details["golden"] = str(path)
        details["golden_identical"] = matches
    v = Verdict("runner.golden", finite and deterministic and matches, details)
    return CriterionResult(7, "ratio report determinism", v.passed, time.perf_counter() - t0, 600, details, [] if v else [v.to_json()])


def criterion_8(p_max: int = 500) -> CriterionResult:
    t0 = time.perf_counter()
    tally = _Tally()
    sweep = subgroup_difference_sweep(3, p_max)
    for v in sweep.verdicts:
        tally.add(v)
    tally.add(paley13_verdict(sweep))
    details = {
        "verdicts": tally.summary(),
        "rows": len(sweep.rows),
        "certified_optimal": sum(r["optimal"] for r in sweep.rows),
        "equality_rows": sum(r["equality_flag"] for r in sweep.rows),
    }
    return CriterionResult(8, "subgroup difference sweep", tally.ok(), time.perf_counter() - t0, 600, details, tally.failures)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def run_all(seed: int = 0, golden=None, only=None) -> list:
    out = []
    for k, fn in CRITERIA.items():
        if only and k not in only:
            continue
        if k == 7:
            out.append(fn(golden=golden, seed=seed))
        elif k in (2, 8):
            out.append(fn())
        else:
            out.append(fn(seed=seed))
    return out
