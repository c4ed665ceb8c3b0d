"""Arithmetic in F_p: bitset sets, multiplicative subgroups and shifted intersections."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

import mpmath
import numpy as np
from sympy import factorint, integer_nthroot, isprime

from .ratio import RatioSet
from .report import Fragment, Verdict

P_LIMIT = 2**31


@dataclass(frozen=True)
class PrimeCtx:
    p: int
    primitive_root: int

    @classmethod
    def of(cls, p: int) -> "PrimeCtx":
        if not (2 <= p < P_LIMIT) or not isprime(p):
            raise ValueError(f"need a prime p < 2^31, got {p}")
        return cls(p, primitive_root(p))

    def inv(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("0 has no inverse mod p")
        return pow(x, self.p - 2, self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "primitive_root": self.primitive_root}


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = list(factorint(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise ValueError(f"no primitive root mod {p}")


class FpSet:
    """Subset of F_p stored as a Python-int bitset (bit x set iff x is present)."""

    __slots__ = ("ctx", "bits")

    def __init__(self, ctx: PrimeCtx, elements: Iterable[int] = ()):
        self.ctx = ctx
        bits = 0
        for x in elements:
            bits |= 1 << (int(x) % ctx.p)
        self.bits = bits

    @classmethod
    def from_bits(cls, ctx: PrimeCtx, bits: int) -> "FpSet":
        out = cls.__new__(cls)
        out.ctx = ctx
        out.bits = bits
        return out

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def mask(self) -> int:
        return (1 << self.ctx.p) - 1

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self):
        s = bin(self.bits)[:1:-1]
        return (i for i, ch in enumerate(s) if ch == "1")

    @property
    def elements(self) -> list:
        return list(self)

    @property
    def keys(self) -> frozenset:
        return frozenset(self)

    def __contains__(self, x) -> bool:
        return bool(self.bits >> (int(x) % self.p) & 1)

    def _same(self, other: "FpSet") -> None:
        if self.ctx.p != other.ctx.p:
            raise ValueError(f"field mismatch: p={self.ctx.p} vs p={other.ctx.p}")

    def __eq__(self, other) -> bool:
        return isinstance(other, FpSet) and self.ctx.p == other.ctx.p and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.bits))

    def __repr__(self) -> str:
        return f"FpSet(p={self.p}, {self.elements})"

    def __and__(self, other: "FpSet") -> "FpSet":
        self._same(other)
        return FpSet.from_bits(self.ctx, self.bits & other.bits)

    def __or__(self, other: "FpSet") -> "FpSet":
        self._same(other)
        return FpSet.from_bits(self.ctx, self.bits | other.bits)

    def issubset(self, other: "FpSet") -> bool:
        self._same(other)
        return self.bits & ~other.bits == 0

    def shift(self, x: int) -> "FpSet":
        """``self + x`` as a bit rotation."""
        p = self.p
        x %= p
        if x == 0:
            return self
        rot = ((self.bits << x) | (self.bits >> (p - x))) & self.mask
        return FpSet.from_bits(self.ctx, rot)

    def dilate(self, lam: int) -> "FpSet":
        return FpSet(self.ctx, (lam * a for a in self))

    def affine(self, lam, x=0) -> "FpSet":
        lam = int(lam) % self.p
        if lam == 0:
            raise ValueError("affine map needs lam != 0")
        return self.dilate(lam).shift(int(x))

    def __neg__(self) -> "FpSet":
        return self.dilate(-1)

    def reciprocals(self) -> "FpSet":
        return FpSet(self.ctx, (self.ctx.inv(a) for a in self if a))

    def __add__(self, other: "FpSet") -> "FpSet":
        return fp_setops(self, other, "sum")

    def __sub__(self, other: "FpSet") -> "FpSet":
        return fp_setops(self, other, "diff")

    def __mul__(self, other: "FpSet") -> "FpSet":
        return fp_setops(self, other, "prod")

    def __truediv__(self, other: "FpSet") -> "FpSet":
        return fp_setops(self, other, "quot")

    def to_json(self) -> dict:
        return {"p": self.p, "elements": self.elements}

    @classmethod
    def from_json(cls, obj: dict) -> "FpSet":
        ctx = PrimeCtx.of(int(obj["p"]))
        elems = [int(x) for x in obj["elements"]]
        if any(not 0 <= x < ctx.p for x in elems):
            raise ValueError("elements must lie in [0, p)")
        return cls(ctx, elems)


def fp_setops(A: FpSet, B: FpSet, op: str) -> FpSet:
    """Exact A op B mod p; ``quot`` skips b = 0."""
    A._same(B)
    ctx = A.ctx
    if op in ("sum", "diff"):
        bits = 0
        for b in B:
            bits |= A.shift(b if op == "sum" else -b).bits
        return FpSet.from_bits(ctx, bits)
    if op == "prod":
        return FpSet(ctx, (a * b for a in A for b in B))
    if op == "quot":
        invs = [ctx.inv(b) for b in B if b]
        return FpSet(ctx, (a * c for a in A for c in invs))
    raise ValueError(f"unknown operation {op!r}")


# -- subgroups ------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    ctx: PrimeCtx
    order: int
    elements: FpSet

    def coset(self, xi: int) -> FpSet:
        xi %= self.ctx.p
        if xi == 0:
            raise ValueError("coset representative must be nonzero")
        return self.elements.dilate(xi)

    def coset_reps(self) -> list:
        """One representative per coset of the subgroup in F_p*."""
        g = self.ctx.primitive_root
        return [pow(g, j, self.ctx.p) for j in range((self.ctx.p - 1) // self.order)]

    def __len__(self) -> int:
        return self.order

    def spec(self, xi: int = 1) -> dict:
        return {"p": self.ctx.p, "order": self.order, "coset": xi % self.ctx.p}


def make_subgroup(ctx: PrimeCtx, d: int) -> Subgroup:
    p = ctx.p
    if d < 1 or (p - 1) % d:
        raise ValueError(f"order {d} does not divide p-1 = {p - 1}")
    h = pow(ctx.primitive_root, (p - 1) // d, p)
    elems, x = [], 1
    for _ in range(d):
        elems.append(x)
        x = x * h % p
    return Subgroup(ctx, d, FpSet(ctx, elems))


def subgroup_from_spec(obj: dict) -> tuple:
    """``{"p", "order", "coset"}`` -> (subgroup, coset set)."""
    G = make_subgroup(PrimeCtx.of(int(obj["p"])), int(obj["order"]))
    return G, G.coset(int(obj.get("coset", 1)))


def check_subgroup_accounting(G: Subgroup) -> list:
    """Closure ``G*G = G`` and ``sum_{x != 0} |G & (G+x)| = |G|^2 - |G|``."""
    S = G.elements
    closed = (S * S) == S and 1 in S and len(S) == G.order
    total = sum(len(S & S.shift(x)) for x in range(1, G.ctx.p))
    n = G.order
    return [
        Verdict("fp.closure", closed, {"p": G.ctx.p, "order": n}),
        Verdict("fp.pair-count", total == n * n - n, {"sum": total, "expected": n * n - n}),
    ]


def shifted_intersection(G, shifts) -> int:
    """``|G & (G + x_1) & ... & (G + x_k)|``; ``G`` is a Subgroup or an FpSet."""
    S = G.elements if isinstance(G, Subgroup) else G
    shifts = [int(x) % S.p for x in shifts]
    if not shifts:
        raise ValueError("need at least one shift")
    if 0 in shifts or len(set(shifts)) != len(shifts):
        raise ValueError("shifts must be distinct and nonzero mod p")
    bits = S.bits
    for x in shifts:
        bits &= S.shift(x).bits
        if not bits:
            return 0
    return bits.bit_count()


def _shift_tuples(p: int, k: int, samples: int | None, rng: random.Random):
    if samples is None:
        yield from combinations(range(1, p), k)
        return
    if p - 1 < k:
        return
    for _ in range(samples):
        yield tuple(rng.sample(range(1, p), k))


@dataclass
class ThetaResult:
    verdict: Verdict
    worst_theta: float
    tested: int


def check_subgroup_formula(G: Subgroup, k: int, samples: int | None = None, seed: int = 0) -> ThetaResult:
    """Test ``count = |G|^(k+1)/(p-1)^k + theta k 2^(k+3) sqrt(p)`` with ``|theta| <= 1``.

    ``samples=None`` runs every k-subset of nonzero shifts.  The inequality is
    decided exactly by squaring; theta itself is reported as a float.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    p, n = G.ctx.p, G.order
    main = Fraction(n ** (k + 1), (p - 1) ** k)
    scale_sq = k * k * 4 ** (k + 3) * p
    scale = math.sqrt(scale_sq)
    rng = random.Random(seed)
    worst, worst_tuple, tested, ok = 0.0, None, 0, True
    for xs in _shift_tuples(p, k, samples, rng):
        delta = shifted_intersection(G, xs) - main
        tested += 1
        if delta * delta > scale_sq:
            ok = False
        theta = abs(float(delta)) / scale
        if theta > worst or worst_tuple is None:
            worst, worst_tuple = theta, xs
    witness = {"p": p, "order": n, "k": k, "tested": tested, "worst_theta": worst, "worst_shifts": worst_tuple}
    return ThetaResult(Verdict("fp.subgroup-formula", ok, witness), worst, tested)


@dataclass
class ManyShiftsResult:
    hypotheses: dict
    asserted: bool
    verdict: Verdict | None
    reason: str

    def to_json(self) -> dict:
        return {
            "hypotheses": self.hypotheses,
            "asserted": self.asserted,
            "reason": self.reason,
            "verdict": self.verdict.to_json() if self.verdict else None,
        }


def _root_plus_one(n: int, k: int):
    """``n^(1/(2k+1)) + 1`` as an mpf, and whether the root is exact."""
    r, exact = integer_nthroot(n, 2 * k + 1)
    with mpmath.workdps(60):
        val = mpmath.mpf(r) if exact else mpmath.root(n, 2 * k + 1)
        return val + 1, exact


def check_many_shifts_bound(G: Subgroup, k: int, tuples=None, samples: int = 200, seed: int = 0) -> ManyShiftsResult:
    """Evaluate both hypotheses; assert the explicit bound only if both hold.

    With log base 2, ``32 k 2^(20k log(k+1))`` equals ``32 k (k+1)^(20k)``,
    so the first hypothesis is an exact integer comparison.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    p, n = G.ctx.p, G.order
    need1 = 32 * k * (k + 1) ** (20 * k)
    h1 = need1 <= n
    rp1, exact = _root_plus_one(n, k)
    with mpmath.workdps(60):
        rhs2 = 4 * k * n * rp1
        h2 = p >= rhs2 if exact else p > rhs2
        bound = 4 * (k + 1) * rp1 ** (k + 1)
    hyps = {
        "32k(k+1)^(20k) <= |G|": {"holds": h1, "needed": str(need1), "|G|": n},
        "p >= 4k|G|(|G|^(1/(2k+1))+1)": {"holds": bool(h2), "rhs": mpmath.nstr(rhs2, 15), "p": p},
    }
    if not (h1 and h2):
        failed = [name for name, v in hyps.items() if not v["holds"]]
        return ManyShiftsResult(hyps, False, None, "hypotheses unmet, bound not asserted: " + "; ".join(failed))
    rng = random.Random(seed)
    source = tuples if tuples is not None else _shift_tuples(p, k, samples, rng)
    worst, ok = 0, True
    for xs in source:
        c = shifted_intersection(G, xs)
        worst = max(worst, c)
        with mpmath.workdps(60):
            ok &= c <= bound
    v = Verdict("fp.many-shifts", ok, {"worst_count": worst, "bound": mpmath.nstr(bound, 15)})
    return ManyShiftsResult(hyps, True, v, "hypotheses hold")


# -- F_p versions of the set statistics ---------------------------------------


def fp_ratio_set(A: FpSet, B: FpSet | None = None, X: FpSet | None = None) -> RatioSet:
    """``R[A, B]`` over F_p; with ``X`` the restricted ``R_X[A]`` (requires B omitted)."""
    ctx = A.ctx
    if X is not None:
        if B is not None:
            raise ValueError("restricted ratio set takes A and X only")
        if 0 in X or -X != X:
            raise ValueError("shift set must be symmetric without 0")
        vals = set()
        for x in X:
            ix = ctx.inv(x)
            for a in A:
                if (a + x) % ctx.p in A:
                    vals.update((a2 - a) * ix for a2 in A)
        return RatioSet(FpSet(ctx, vals), "R_X[A]", field="Fp")
    B = A if B is None else B
    A._same(B)
    if len(B) < 2:
        raise ValueError("R[A, B] needs |B| >= 2")
    bs = B.elements
    vals = set()
    for b in bs:
        for b1 in bs:
            if b1 != b:
                ib = ctx.inv(b1 - b)
                vals.update((a - b) * ib for a in A)
    return RatioSet(FpSet(ctx, vals), "R[A,B]" if B is not A else "R[A]", field="Fp")


def fp_sandwich(A: FpSet):
    """``R[A] in D/D`` and ``D/D in R[A]R[A]`` over F_p; returns (verdict, missing)."""
    R = fp_ratio_set(A).values
    D = A - A
    DD = D / D
    RR = R * R
    lower = R.issubset(DD)
    missing = (DD.bits & ~RR.bits)
    miss = FpSet.from_bits(A.ctx, missing).elements
    v = Verdict(
        "fp.sandwich",
        lower and not miss,
        {"p": A.p, "lower": lower, "upper": not miss, "missing_from_RR": miss[:5], "R": len(R), "D/D": len(DD)},
    )
    return v, miss


def _triples_fp_oracle(a, p: int) -> int:
    count = 0
    for c in a:
        for d in a:
            for x in a:
                for y in a:
                    lhs = (x - c) * (y - d) % p
                    for x2 in a:
                        u = x2 - c
                        for y2 in a:
                            if u * (y2 - d) % p == lhs:
                                count += 1
    return count


def fp_collinear_triples(A: FpSet, mode: str = "fast") -> int:
    """``T(A)`` over F_p: sextuples with ``(a-c)(b-d) = (a'-c)(b'-d)`` mod p."""
    a, p = A.elements, A.p
    if mode == "oracle":
        return _triples_fp_oracle(a, p)
    if mode != "fast":
        raise ValueError(f"mode must be 'oracle' or 'fast', got {mode!r}")
    if not a:
        return 0
    av = np.asarray(a, dtype=np.int64)
    total = 0
    for c in a:
        x = (av - c) % p
        for d in a:
            y = (av - d) % p
            prods = np.outer(x, y) % p
            counts = np.bincount(prods.ravel(), minlength=1)
            total += int(np.dot(counts, counts))
    return total


def fp_triples_report(A: FpSet) -> Fragment:
    n, p = len(A), A.p
    t = fp_collinear_triples(A)
    bound = n**4.5
    # |A| < p^(2/3) decided exactly as |A|^3 < p^2
    side = "hypothesis |A| < p^(2/3): " + ("holds" if n**3 < p * p else "fails")
    return Fragment("T(A) over F_p", t, "|A|^(9/2)", bound, t / bound if n else None, side=side)


def fp_dd_chain_report(A: FpSet) -> list:
    """|D|, |DD|, |D/D| against ``|D|^(19/24)|R|^(1/4)`` and |R| against ``p^(5/9)``."""
    if len(A) < 2:
        raise ValueError("need |A| >= 2")
    D = A - A
    r = len(fp_ratio_set(A))
    dd, dq = len(D * D), len(D / D)
    scale = len(D) ** (19 / 24) * r**0.25
    pw = A.p ** (5 / 9)
    return [
        Fragment("|D|", len(D)),
        Fragment("|DD|", dd, "|D|^(19/24)|R[A]|^(1/4)", scale, dd / scale),
        Fragment("|D/D|", dq, "|D|^(19/24)|R[A]|^(1/4)", scale, dq / scale),
        Fragment("|R[A]|", r, "p^(5/9)", pw, r / pw, side="raw comparison, constant unspecified"),
    ]


def random_fpset(ctx: PrimeCtx, size: int, rng: random.Random) -> FpSet:
    size = min(size, ctx.p)
    return FpSet(ctx, rng.sample(range(ctx.p), size))

