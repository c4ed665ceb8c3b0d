"""Incidences for lines and the hyperbola family, and SzT-type witness quantities."""

from __future__ import annotations

import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, NamedTuple

from sympy import factorint, integer_nthroot

from .energy import _rep_keys
from .exact import ExactSet, card_prodset, to_rational
from .ratio import ratio_set
from .report import Fragment, Verdict

D_PHI_NOTE = (
    "condition 2 of the d_Phi definition (at least two solutions of s=F(Phi(b,x),y)) "
    "is ambiguous in its quantifiers and is not checked"
)


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x, y) -> "Point":
        return cls(to_rational(x), to_rational(y))


@dataclass(frozen=True)
class Curve:
    """``line``: s*x - t*y = alpha.  ``hyperbola``: (p - x)(y - d) = alpha, alpha != 0."""

    kind: str
    a: Fraction
    b: Fraction
    alpha: Fraction

    def __post_init__(self):
        for name in ("a", "b", "alpha"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))
        if self.kind == "line":
            if self.a == 0 and self.b == 0:
                raise ValueError("line needs (s, t) != (0, 0)")
        elif self.kind == "hyperbola":
            if self.alpha == 0:
                raise ValueError("hyperbola with alpha = 0 degenerates to two lines")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def line(cls, s, t, alpha) -> "Curve":
        return cls("line", s, t, alpha)

    @classmethod
    def hyperbola(cls, p, d, alpha) -> "Curve":
        return cls("hyperbola", p, d, alpha)

    def contains(self, pt: Point) -> bool:
        if self.kind == "line":
            return self.a * pt.x - self.b * pt.y == self.alpha
        return (self.a - pt.x) * (pt.y - self.b) == self.alpha

    def key(self) -> tuple:
        """Canonical identity of the point set (lines are scale-normalized)."""
        if self.kind == "hyperbola":
            return ("hyperbola", self.a, self.b, self.alpha)
        lead = self.a if self.a != 0 else -self.b
        return ("line", self.a / lead, self.b / lead, self.alpha / lead)

    def to_json(self) -> dict:
        names = ("s", "t") if self.kind == "line" else ("p", "d")
        out = {"kind": self.kind}
        for n, v in zip(names + ("alpha",), (self.a, self.b, self.alpha)):
            out[n] = int(v) if v.denominator == 1 else {"n": v.numerator, "d": v.denominator}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Curve":
        if obj["kind"] == "line":
            return cls.line(to_rational(obj["s"]), to_rational(obj["t"]), to_rational(obj["alpha"]))
        return cls.hyperbola(to_rational(obj["p"]), to_rational(obj["d"]), to_rational(obj["alpha"]))


# -- incidence counting --------------------------------------------------------


def count_incidences(points, curves, mode: str = "hashed") -> int:
    points = list(points)
    curves = list(curves)
    if mode == "naive":
        return sum(1 for p in points for c in curves if c.contains(p))
    if mode != "hashed":
        raise ValueError(f"mode must be 'naive' or 'hashed', got {mode!r}")
    by_slope = defaultdict(Counter)  # slope -> intercept -> multiplicity
    vertical = Counter()
    by_branch = defaultdict(Counter)  # (p, alpha) -> d -> multiplicity
    for c in curves:
        if c.kind == "line":
            if c.b == 0:
                vertical[c.alpha / c.a] += 1
            else:
                by_slope[c.a / c.b][-c.alpha / c.b] += 1
        else:
            by_branch[(c.a, c.alpha)][c.b] += 1
    total = 0
    for pt in points:
        total += vertical.get(pt.x, 0)
        for m, intercepts in by_slope.items():
            total += intercepts.get(pt.y - m * pt.x, 0)
        for (p, alpha), ds in by_branch.items():
            if pt.x != p:
                total += ds.get(pt.y - alpha / (p - pt.x), 0)
    return total


def _real_roots(a2: Fraction, a1: Fraction, a0: Fraction, excluded=()) -> float:
    """Distinct real roots of a2 x^2 + a1 x + a0, minus rational roots in ``excluded``."""
    if a2 == 0 and a1 == 0:
        return math.inf if a0 == 0 else 0
    if a2 == 0:
        roots = 1
    else:
        disc = a1 * a1 - 4 * a2 * a0
        roots = 2 if disc > 0 else (1 if disc == 0 else 0)
    for v in set(excluded):
        if a2 * v * v + a1 * v + a0 == 0:
            roots -= 1
    return roots


def intersection_count(c1: Curve, c2: Curve) -> float:
    """Exact number of common points (``inf`` for coincident curves)."""
    if c1.key() == c2.key():
        return math.inf
    if c1.kind == "line" and c2.kind == "line":
        det = -c1.a * c2.b + c1.b * c2.a
        return 1 if det != 0 else 0
    if c1.kind == "hyperbola" and c2.kind == "hyperbola":
        p, d, al = c1.a, c1.b, c1.alpha
        q, e, be = c2.a, c2.b, c2.alpha
        delta = d - e
        return _real_roots(
            delta,
            -delta * (p + q) + (be - al),
            delta * p * q + al * q - be * p,
            excluded=(p, q),
        )
    line, hyp = (c1, c2) if c1.kind == "line" else (c2, c1)
    s, t, al = line.a, line.b, line.alpha
    p, d, be = hyp.a, hyp.b, hyp.alpha
    if t == 0:
        return 0 if al / s == p else 1
    k = al + d * t
    return _real_roots(-s, p * s + k, -p * k - be * t, excluded=(p,))


def pairwise_intersection_bound(curves) -> Verdict:
    """Lines pairwise meet at most once; any pair involving a hyperbola at most twice."""
    worst = {"line": 0, "hyperbola": 0}
    offender = None
    for c1, c2 in combinations(list(curves), 2):
        n = intersection_count(c1, c2)
        kind = "line" if c1.kind == c2.kind == "line" else "hyperbola"
        worst[kind] = max(worst[kind], n)
        limit = 1 if kind == "line" else 2
        if n > limit and offender is None:
            offender = [c1.to_json(), c2.to_json(), "coincident" if n == math.inf else n]
    ok = offender is None
    return Verdict("szt.pseudo-lines", ok, {"max_line_pair": worst["line"], "max_with_hyperbola": worst["hyperbola"], "offender": offender})


# -- SzT-type witnesses ----------------------------------------------------------


@dataclass(frozen=True)
class SzTWitness:
    tau: int
    count: int
    witnessD: Fraction

    def to_json(self) -> dict:
        return {"tau": self.tau, "count": self.count, "witnessD": str(self.witnessD)}


def alpha_counts(A: ExactSet, B: ExactSet, phi: str = "add") -> Counter:
    """``x -> #{(a, b) : a = phi(b, x)}`` (keys are canonical; zero b skipped for mul)."""
    if phi == "add":
        return _rep_keys(A, B, "diff")
    if phi == "mul":
        return _rep_keys(A, B, "quot")
    raise ValueError(f"phi must be 'add' or 'mul', got {phi!r}")


def szt_rich_set(A: ExactSet, B: ExactSet, tau: int, phi: str = "add", counts=None) -> SzTWitness:
    """Size of the tau-rich set and the implied lower certificate for D_phi(A)."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    counts = alpha_counts(A, B, phi) if counts is None else counts
    count = sum(1 for c in counts.values() if c >= tau)
    denom = len(A) * len(B) ** 2
    w = Fraction(count * tau**3, denom) if denom else Fraction(0)
    return SzTWitness(tau, count, w)


def check_rich_accounting(A: ExactSet, B: ExactSet) -> Verdict:
    counts = alpha_counts(A, B, "add")
    total = sum(counts.values())
    ok = total == len(A) * len(B) and all(c <= min(len(A), len(B)) for c in counts.values())
    return Verdict("energy.rep-total", ok, {"sum": total, "|A||B|": len(A) * len(B)})


def default_B_generator(A: ExactSet) -> Callable:
    """Random test sets: integer subsets, progressions, intervals, and pieces of A."""
    lo, hi = int(math.floor(A.min())), int(math.ceil(A.max()))
    width = max(hi - lo, 4)

    def gen(rng: random.Random) -> ExactSet:
        kind = rng.randrange(5)
        size = rng.randint(1, max(2, min(3 * len(A), 40)))
        if kind == 0:
            return ExactSet(rng.sample(range(-width, 2 * width + 1), size))
        if kind == 1:
            step = rng.randint(1, max(1, width // max(size, 1)))
            return ExactSet(rng.randint(-width, width) + i * step for i in range(size))
        if kind == 4:
            return ExactSet(range(1, size + 1))
        if kind == 2:
            elems = list(A)
            return ExactSet(rng.sample(elems, rng.randint(1, len(elems))))
        shift = rng.randint(-width, width)
        return ExactSet(x + shift + rng.choice((0, 0, 1)) for x in A)

    return gen


@dataclass
class DSample:
    B: ExactSet
    witness: SzTWitness


def sample_D_lower(A: ExactSet, phi: str = "add", B_generator=None, samples: int = 100, seed: int = 0, tau: str = "best"):
    """Best certified lower bound for D_phi(A) over sampled ``(B, tau)``.

    ``tau="best"`` takes, for each sampled B, the tau maximizing the witness;
    ``tau="random"`` draws tau uniformly from ``1..|B|``.

    Returns ``(fragment, samples)``; only a lower bound is ever claimed, since
    the constant quantifies over every B.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    gen = B_generator or default_B_generator(A)
    drawn = []
    for _ in range(samples):
        B = gen(rng)
        counts = alpha_counts(A, B, phi)
        if tau == "best":
            # count * tau^3 only changes at the distinct levels of alpha
            levels = sorted(set(counts.values())) or [1]
            w = max((szt_rich_set(A, B, t, phi, counts) for t in levels), key=lambda s: s.witnessD)
        else:
            w = szt_rich_set(A, B, rng.randint(1, max(1, len(B))), phi, counts)
        drawn.append(DSample(B, w))
    best = max(drawn, key=lambda s: s.witness.witnessD)
    frag = Fragment(
        f"D_{phi}(A) lower certificate",
        best.witness.witnessD,
        "count*tau^3/(|A||B|^2)",
        None,
        float(best.witness.witnessD),
        side="lower bound for D_phi(A)",
    )
    return frag, drawn


def convex_sample_verdict(A: ExactSet, drawn: list, constant: int = 4) -> Verdict:
    """Each sample must satisfy count * tau^3 <= constant * |A| |B|^2."""
    worst = max(drawn, key=lambda s: s.witness.witnessD)
    bad = [s for s in drawn if s.witness.count * s.witness.tau**3 > constant * len(A) * len(s.B) ** 2]
    return Verdict(
        "szt.convex-sample",
        not bad,
        {"samples": len(drawn), "max_witnessD": str(worst.witness.witnessD), "violations": len(bad)},
    )


def convex_certificate(n: int) -> Verdict:
    """``(2n - 1)^2 / n^2 < 4`` for the index set I = {1..n}."""
    value = Fraction((2 * n - 1) ** 2, n * n)
    return Verdict("szt.convex-certificate", value < 4, {"|I|": n, "value": str(value)})


# -- exact monotone maps and d~_+ -------------------------------------------------


@dataclass(frozen=True)
class LogLinear:
    """``const + sum_p coeff_p * log2(p)`` over odd primes p, with rational coefficients.

    1 and the log2 of odd primes are linearly independent over Q, so this
    form is canonical and equality is exact.
    """

    const: Fraction
    logs: tuple = ()

    @classmethod
    def rational(cls, q) -> "LogLinear":
        return cls(to_rational(q))

    @classmethod
    def log2(cls, q) -> "LogLinear":
        q = to_rational(q)
        if q <= 0:
            raise ValueError("log2 needs a positive argument")
        coeffs = Counter()
        for prime, e in factorint(q.numerator).items():
            coeffs[prime] += e
        for prime, e in factorint(q.denominator).items():
            coeffs[prime] -= e
        const = Fraction(coeffs.pop(2, 0))
        return cls(const, tuple(sorted((p, Fraction(e)) for p, e in coeffs.items() if e)))

    def __add__(self, other: "LogLinear") -> "LogLinear":
        acc = Counter(dict(self.logs))
        for p, c in other.logs:
            acc[p] += c
        return LogLinear(self.const + other.const, tuple(sorted((p, c) for p, c in acc.items() if c)))

    def __float__(self) -> float:
        return float(self.const) + sum(float(c) * math.log2(p) for p, c in self.logs)


def _exact_root(q: Fraction, k: int) -> Fraction:
    if q < 0:
        raise ValueError("real power map needs a nonnegative argument")
    rn, en = integer_nthroot(q.numerator, k)
    rd, ed = integer_nthroot(q.denominator, k)
    if not (en and ed):
        raise ValueError(f"{q}^(1/{k}) is irrational")
    return Fraction(rn, rd)


@dataclass(frozen=True)
class MonotoneMap:
    """Catalog of exactly computable strictly monotone maps.

    kinds: ``power`` (x^(p/q), params (p, q)), ``log2``, ``log2m1`` (log2(x-1)),
    ``affine`` (lam*x + mu), ``inverse_table`` (g(i) -> i for a strictly
    monotone integer table g(1..n)).
    """

    kind: str
    params: tuple = ()

    def in_domain(self, x: Fraction) -> bool:
        if self.kind == "log2":
            return x > 0
        if self.kind == "log2m1":
            return x > 1
        if self.kind == "power":
            return x >= 0
        if self.kind == "inverse_table":
            return x in self._table()
        return True

    def _table(self) -> dict:
        vals = [to_rational(v) for v in self.params]
        inc = all(u < v for u, v in zip(vals, vals[1:]))
        dec = all(u > v for u, v in zip(vals, vals[1:]))
        if not (inc or dec):
            raise ValueError("inverse_table needs a strictly monotone table")
        return {v: i + 1 for i, v in enumerate(vals)}

    def __call__(self, x) -> LogLinear:
        x = to_rational(x)
        if not self.in_domain(x):
            raise ValueError(f"{x} outside the domain of {self.kind}")
        if self.kind == "log2":
            return LogLinear.log2(x)
        if self.kind == "log2m1":
            return LogLinear.log2(x - 1)
        if self.kind == "affine":
            lam, mu = (to_rational(v) for v in self.params)
            if lam == 0:
                raise ValueError("affine map needs lam != 0")
            return LogLinear.rational(lam * x + mu)
        if self.kind == "power":
            p, q = self.params
            base = _exact_root(x, q)
            if p < 0 and base == 0:
                raise ValueError("negative power of 0")
            return LogLinear.rational(base**p)
        if self.kind == "inverse_table":
            return LogLinear.rational(self._table()[x])
        raise ValueError(f"unknown map kind {self.kind!r}")


@dataclass(frozen=True)
class DTilde:
    value: Fraction
    sumset_size: int
    domain: ExactSet
    c_size: int

    def to_fragment(self) -> Fragment:
        return Fragment(
            "d~_+(A) upper certificate",
            self.value,
            "|f(A)+C|^2/(|A||C|)",
            None,
            float(self.value),
            side="upper bound for d~_+(A)",
        )


def _as_forms(C) -> list:
    return [c if isinstance(c, LogLinear) else LogLinear.rational(c) for c in C]


def d_tilde_plus(A: ExactSet, f: MonotoneMap, C, restrict: bool = False) -> DTilde:
    """``|f(A) + C|^2 / (|A| |C|)`` for one map and one C: an upper certificate.

    ``C`` may hold rationals or :class:`LogLinear` values.  With
    ``restrict=True`` elements of A outside the domain of ``f`` are dropped.
    """
    forms_c = set(_as_forms(C))
    if not forms_c:
        raise ValueError("C must be nonempty")
    dom = ExactSet(x for x in A if f.in_domain(x)) if restrict else A
    if not len(dom):
        raise ValueError("no element of A lies in the domain of f")
    image = {f(x) for x in dom}
    if len(image) != len(dom):
        raise ValueError("f is not injective on A")
    total = {u + v for u in image for v in forms_c}
    return DTilde(Fraction(len(total) ** 2, len(dom) * len(forms_c)), len(total), dom, len(forms_c))


def check_d_simple(A: ExactSet, f: MonotoneMap, C) -> Verdict:
    """If ``|f(A)+C| >= max(|A|, |C|)`` then the certificate is at least 1."""
    res = d_tilde_plus(A, f, C)
    hyp = res.sumset_size >= max(len(res.domain), res.c_size)
    return Verdict(
        "szt.d-simple",
        (not hyp) or res.value >= 1,
        {"hypothesis": hyp, "value": str(res.value)},
    )


def d_times_upper_for_ratio_set(A: ExactSet, B: ExactSet | None = None) -> list:
    """|R|, |RR|, the bound |RR|^2/|R|^2 for D_x(R), and optionally the |RB| ratio."""
    if len(A) < 2:
        raise ValueError("need |A| >= 2")
    R = ratio_set(A).values
    rr = card_prodset(R, R)
    bound = Fraction(rr * rr, len(R) ** 2)
    rows = [
        Fragment("|R[A]|", len(R)),
        Fragment("|RR|", rr),
        Fragment("D_x(R) bound value", bound, "|RR|^2/|R|^2", bound, None, side="upper bound up to a constant"),
    ]
    if B is not None and len(B):
        rb = card_prodset(R, B)
        ref = len(R) ** 2 * math.sqrt(len(B)) / rr
        rows.append(Fragment("|RB|", rb, "|R|^2|B|^(1/2)/|RR|", ref, rb / ref))
    return rows
