"""Ratio sets R[A, B], R_X[A] and their exact structural identities."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from . import _kernels
from .energy import _rep_keys, check_symmetric_shifts, collinear_triples, sigma_X
from .exact import ExactSet, _frac, _reduce, card_prodset, card_quotset, quotient_keys
from .report import Fragment, Verdict


@dataclass(frozen=True)
class RatioSet:
    values: ExactSet
    source: str = ""
    field: str = "Q"

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, x) -> bool:
        return x in self.values

    def __iter__(self):
        return iter(self.values)

    def to_json(self):
        return self.values.to_json()


def _integral(*sets: ExactSet):
    L = lcm(*(S.denominator for S in sets))
    return [S.integers(L) for S in sets]


def ratio_keys(a: list, b: list) -> set:
    """Keys of ``(x - y)/(y1 - y)`` over ``x in a``, ``y != y1 in b`` (integers)."""
    out = set()
    for y in b:
        shifted = [x - y for x in a]
        dens = [y1 - y for y1 in b if y1 != y]
        out |= quotient_keys(shifted, dens)
    return out


def ratio_set(A: ExactSet, B: ExactSet | None = None) -> RatioSet:
    """``R[A, B] = {(a - b)/(b1 - b) : a in A, b != b1 in B}``; ``R[A]`` when B is omitted."""
    B = A if B is None else B
    if len(B) < 2:
        raise ValueError("R[A, B] needs |B| >= 2")
    a, b = _integral(A, B)
    return RatioSet(ExactSet._from_keys(ratio_keys(a, b)), "R[A,B]" if B is not A else "R[A]")


def check_restricted_shifts(A: ExactSet, X: ExactSet) -> None:
    check_symmetric_shifts(X)
    if not X.issubset(A - A):
        raise ValueError("shift set must lie inside A - A")


def ratio_set_restricted(A: ExactSet, X: ExactSet) -> RatioSet:
    """``R_X[A] = {(a2 - a)/(a1 - a) : a1 - a in X}``."""
    check_restricted_shifts(A, X)
    a, x = _integral(A, X)
    xs = set(x)
    out = set()
    for base in a:
        shifted = [v - base for v in a]
        dens = [d for d in shifted if d in xs]
        out |= quotient_keys(shifted, dens)
    return RatioSet(ExactSet._from_keys(out), "R_X[A]")


# -- identities ---------------------------------------------------------------


def _ids(R):
    prefix = "fp" if getattr(R, "field", "Q") != "Q" else "ratio"
    return prefix


def check_reflection_identity(R) -> Verdict:
    """``R = 1 - R`` exactly; on failure the witness names an offending element."""
    vals = R.values
    bad = _first_difference(vals.keys, vals.affine(-1, 1).keys)
    return Verdict(
        f"{_ids(R)}.reflection",
        bad is None,
        {"size": len(vals), "counterexample": bad},
    )


def check_inverse_identity(R) -> Verdict:
    """``{1/r : r in R, r != 0} | {0} = R`` (0 has no inverse and pairs with itself)."""
    vals = R.values
    expected = vals.reciprocals().keys | ({0} & vals.keys)
    bad = _first_difference(vals.keys, expected)
    return Verdict(f"{_ids(R)}.inverse", bad is None, {"size": len(vals), "counterexample": bad})


def check_negation_trick(R) -> Verdict:
    """``|R| = |-R & (R - 1)|``."""
    vals = R.values
    rhs = len((-vals) & vals.affine(1, -1))
    return Verdict(f"{_ids(R)}.negation", len(vals) == rhs, {"lhs": len(vals), "rhs": rhs})


def _first_difference(S: frozenset, T: frozenset):
    diff = S ^ T
    if not diff:
        return None
    return str(_frac(min(diff, key=repr)))


# -- sandwich R[A] in D/D in R[A]R[A] ---------------------------------------


@dataclass
class SandwichResult:
    lower: bool
    upper: bool
    missing: list = field(default_factory=list)
    ratio_size: int = 0
    quotient_size: int = 0

    @property
    def passed(self) -> bool:
        return self.lower and self.upper

    def verdict(self, prefix: str = "ratio") -> Verdict:
        return Verdict(
            f"{prefix}.sandwich",
            self.passed,
            {
                "lower": self.lower,
                "upper": self.upper,
                "missing_from_RR": [str(m) for m in self.missing[:5]],
                "R": self.ratio_size,
                "D/D": self.quotient_size,
            },
        )


def sandwich(A: ExactSet, mode: str = "certified") -> SandwichResult:
    """Check ``R[A] in D/D`` and ``D/D in R[A]R[A]`` for ``D = A - A``.

    Both R[A] and D/D are enumerated and the first inclusion is a set test.
    For the second, a quotient ``(p-q)/(s-t)`` factors through R[A] as
    ``[(q-p)/(t-p)] * [(p-t)/(s-t)]`` when ``p != t`` and as
    ``[(p-q)/(s-q)] * [(q-s)/(t-s)]`` when ``q != s``; both factors are
    elements of R[A] by its definition.  Only ``p = t, q = s`` escapes, and
    that quotient is -1.  ``mode="certified"`` therefore settles -1 by
    exhaustive search over R[A] and nothing else.  ``mode="pivot"`` instead
    looks up every factor of every quadruple in the enumerated R[A] and
    searches exhaustively for whatever is left; it is the slow cross-check.
    """
    if len(A) < 2:
        raise ValueError("need |A| >= 2")
    (a,) = _integral(A)
    if mode == "certified":
        return _sandwich_certified(a)
    if mode != "pivot":
        raise ValueError(f"mode must be 'certified' or 'pivot', got {mode!r}")
    res = _sandwich_numpy(a)
    if res is None:
        res = _sandwich_python(a)
    return res


def _sandwich_certified(a: list) -> SandwichResult:
    D = sorted({x - y for x in a for y in a})
    nz = [y for y in D if y]
    res = _kernels.quotient_codes(D, nz)
    rkeys = ratio_keys(a, a)
    if res is None:
        dd = quotient_keys(D, nz)
        lower = rkeys <= dd
        size = len(dd)
    else:
        codes, base = res
        size = len(codes)
        pairs = [(k, 1) if isinstance(k, int) else k for k in rkeys]
        # a reduced quotient of D/D has |num|, den < base
        lower = all(abs(n) < base and d < base for n, d in pairs)
        if lower:
            enc = np.asarray([n * base + d for n, d in pairs], dtype=np.int64)
            lower = bool(_kernels.member(enc, codes).all())
    missing = _leftovers([-1], rkeys)
    return SandwichResult(lower, not missing, missing, len(rkeys), size)


def check_sandwich(A: ExactSet) -> Verdict:
    return sandwich(A).verdict()


def _leftovers(candidates, rkeys: set) -> list:
    missing = []
    nonzero = [k for k in rkeys if k != 0]
    for q in candidates:
        qn, qd = (q, 1) if isinstance(q, int) else q
        found = False
        for r in nonzero:
            rn, rd = (r, 1) if isinstance(r, int) else r
            if _reduce(qn * rd, qd * rn) in rkeys:
                found = True
                break
        if not found:
            missing.append(_frac(q))
    return sorted(missing)


def _sandwich_python(a: list) -> SandwichResult:
    rkeys = ratio_keys(a, a)
    D = sorted({x - y for x in a for y in a})
    dd = quotient_keys(D, [y for y in D if y])
    lower = rkeys <= dd
    verified = set()
    for p in a:
        for q in a:
            for s in a:
                for t in a:
                    if s == t:
                        continue
                    if p != t:
                        r1, r2 = _reduce(q - p, t - p), _reduce(p - t, s - t)
                    elif q != s:
                        r1, r2 = _reduce(p - q, s - q), _reduce(q - s, t - s)
                    else:
                        continue
                    if r1 in rkeys and r2 in rkeys:
                        verified.add(_reduce(p - q, s - t))
    missing = _leftovers(dd - verified, rkeys)
    return SandwichResult(lower, not missing, missing, len(rkeys), len(dd))


def _decode(code: int, base: int):
    n, d = divmod(int(code), base)
    return n if d == 1 else (n, d)


def _sandwich_numpy(a: list):
    if len(a) > 60:
        return None
    D = sorted({x - y for x in a for y in a})
    res = _kernels.quotient_codes(D, [y for y in D if y])
    if res is None:
        return None
    ddcodes, base = res
    av = np.asarray(sorted(a), dtype=np.int64) - min(a)
    n = len(av)
    P, Q, S = np.meshgrid(av, av, av, indexing="ij")
    ok = Q != P
    rcodes = np.unique(_kernels.encode((S - P)[ok], (Q - P)[ok], base))
    lower = bool(_kernels.member(rcodes, ddcodes).all())
    q, s, t = (g.ravel() for g in np.meshgrid(av, av, av, indexing="ij"))
    keep = s != t
    q, s, t = q[keep], s[keep], t[keep]
    verified = []
    for i in range(n):
        p = av[i]
        use1 = t != p
        good = use1 | (q != s)
        r1n = np.where(use1, q - p, p - q)
        r1d = np.where(use1, t - p, np.where(good, s - q, 1))
        r2n = np.where(use1, p - t, q - s)
        r2d = np.where(use1, s - t, np.where(good, t - s, 1))
        hit = good & _kernels.member(_kernels.encode(r1n, r1d, base), rcodes)
        hit &= _kernels.member(_kernels.encode(r2n, r2d, base), rcodes)
        verified.append(np.unique(_kernels.encode((p - q)[hit], (s - t)[hit], base)))
    ver = np.unique(np.concatenate(verified))
    left = ddcodes[~_kernels.member(ddcodes, ver)]
    rkeys = {_decode(c, base) for c in rcodes.tolist()}
    missing = _leftovers([_decode(c, base) for c in left.tolist()], rkeys)
    return SandwichResult(lower, not missing, missing, len(rcodes), len(ddcodes))


# -- dyadic popularity partition ---------------------------------------------


@dataclass
class Bucket:
    j: int
    lower: Fraction
    upper: Fraction
    elements: ExactSet
    sigma: int

    def to_json(self) -> dict:
        return {"j": self.j, "size": len(self.elements), "sigma": self.sigma}


@dataclass
class DyadicPartition:
    delta0: Fraction
    popular: ExactSet
    sigma_popular: int
    buckets: list

    @property
    def best(self) -> Bucket:
        """Bucket with the largest sigma (smallest j on ties)."""
        return max(self.buckets, key=lambda b: (b.sigma, -b.j))

    def to_json(self) -> dict:
        return {
            "delta0": str(self.delta0),
            "buckets": [b.to_json() for b in self.buckets],
        }


def dyadic_partition(A: ExactSet) -> DyadicPartition:
    """Split ``D' = {x in D : |A & (A+x)| > |A|^2/(2|D|)}`` into dyadic popularity levels.

    Bucket ``j >= 1`` holds ``delta0 * 2^(j-1) < |A & (A+x)| <= delta0 * 2^j``;
    ``ceil(log2(2|D|)) + 1`` buckets are kept, empty ones included.
    """
    if len(A) < 2:
        raise ValueError("need |A| >= 2")
    pops = _rep_keys(A, A, "diff")
    n, nd = len(A), len(pops)
    delta0 = Fraction(n * n, 2 * nd)
    nbuckets = (2 * nd - 1).bit_length() + 1
    members = defaultdict(list)
    popular = []
    for k, c in pops.items():
        if c <= delta0:
            continue
        popular.append(k)
        j = 1
        while c > delta0 * 2**j:
            j += 1
        members[j].append((k, c))
    buckets = []
    for j in range(1, nbuckets + 1):
        items = members.get(j, [])
        buckets.append(
            Bucket(
                j,
                delta0 * 2 ** (j - 1),
                delta0 * 2**j,
                ExactSet._from_keys(k for k, _ in items),
                sum(c for _, c in items),
            )
        )
    if any(j > nbuckets for j in members):
        raise AssertionError("popularity exceeded the bucket cap")
    sigma = sum(pops[k] for k in popular)
    return DyadicPartition(delta0, ExactSet._from_keys(popular), sigma, buckets)


def check_dyadic(A: ExactSet) -> Verdict:
    part = dyadic_partition(A)
    pops = _rep_keys(A, A, "diff")
    seen = set()
    ok = True
    for b in part.buckets:
        if seen & b.elements.keys:
            ok = False
        seen |= b.elements.keys
        for k in b.elements.keys:
            if not (b.lower < pops[k] <= b.upper):
                ok = False
    ok &= seen == part.popular.keys
    ok &= sum(b.sigma for b in part.buckets) == part.sigma_popular
    ok &= 2 * part.sigma_popular >= len(A) ** 2
    return Verdict(
        "ratio.dyadic-mass",
        ok,
        {"sigma": part.sigma_popular, "half_square": Fraction(len(A) ** 2, 2), "best_j": part.best.j},
    )


# -- sigma_X and T(A) ----------------------------------------------------------


@dataclass
class SigmaChain:
    sigma: int
    ratio_size: int
    triples: int
    weights: Counter
    identity_holds: bool
    support_inside: bool

    def verdicts(self, n: int) -> list:
        sq = sum(w * w for w in self.weights.values())
        return [
            Verdict(
                "ratio.sigma-identity",
                self.identity_holds and self.support_inside,
                {"n_sigma": n * self.sigma, "sum_weights": sum(self.weights.values())},
            ),
            Verdict(
                "ratio.sigma-T",
                n * n * self.sigma**2 <= self.ratio_size * sq <= self.ratio_size * self.triples,
                {
                    "lhs": n * n * self.sigma**2,
                    "middle": self.ratio_size * sq,
                    "rhs": self.ratio_size * self.triples,
                },
            ),
        ]


def sigma_chain(A: ExactSet, X: ExactSet) -> SigmaChain:
    """Weights ``w(l) = sum_x |A & (A+x) & (A+l*x)|`` behind the bound on ``|R_X[A]|``.

    ``sum_l w(l) = |A| sigma_X(A)`` exactly, ``w`` is supported on ``R_X[A]``,
    and Cauchy-Schwarz gives ``|A|^2 sigma_X^2 <= |R_X| sum w^2 <= |R_X| T(A)``.
    """
    s = sigma_X(A, X)
    R = ratio_set_restricted(A, X)
    a, x = _integral(A, X)
    aset = set(a)
    w = Counter()
    for shift in x:
        for p in a:
            if p - shift not in aset:
                continue
            for q in a:
                w[_reduce(p - q, shift)] += 1
    identity = sum(w.values()) == len(A) * s
    inside = set(w) <= R.values.keys
    t = collinear_triples(A)
    return SigmaChain(s, len(R), t, w, identity, inside)


# -- reports -----------------------------------------------------------------


def dd_chain_report(A: ExactSet) -> list:
    """|D|, |DD|, |D/D|, |R[A]| and the normalized ratios (data only)."""
    if len(A) < 2:
        raise ValueError("need |A| >= 2")
    n = len(A)
    D = A - A
    dd = card_prodset(D, D)
    dq = card_quotset(D, D)
    r = len(ratio_set(A))
    scale = len(D) ** (5 / 6) * r**0.25
    return [
        Fragment("|A|", n),
        Fragment("|D|", len(D)),
        Fragment("|DD|", dd, "|D|^(5/6)|R[A]|^(1/4)", scale, dd / scale),
        Fragment("|D/D|", dq, "|D|^(5/6)|R[A]|^(1/4)", scale, dq / scale),
        Fragment("|R[A]|", r, "|A|^2/log2|A|", n * n / math.log2(n), r * math.log2(n) / (n * n)),
    ]


def question_row(A: ExactSet) -> dict:
    """Exploration of ``|R[A]|`` against ``|A-A|`` and ``|A/A|``; nothing is asserted."""
    r = len(ratio_set(A))
    return {
        "|A|": len(A),
        "|R[A]|": r,
        "|A-A|": len(A - A),
        "|A/A|": card_quotset(A, A),
        "assert": "no-assert (exploration)",
    }
