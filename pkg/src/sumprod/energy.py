"""Representation counts, energies, sigma_X and the collinear-triple count T."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from math import lcm

import numpy as np

from . import _kernels
from .exact import ExactSet, _frac, _reduce, to_rational
from .report import Fragment


def rep_count(A: ExactSet, B: ExactSet, x) -> int:
    """``|A & (B + x)|``: the number of solutions of ``a - b = x``."""
    x = to_rational(x)
    return sum(1 for b in B if b + x in A)


def representations(A: ExactSet, B: ExactSet, op: str = "diff") -> Counter:
    """Representation function of ``A op B`` as a Counter keyed by Fraction.

    ``op`` is one of ``sum``, ``diff``, ``prod``, ``quot``; zero divisors are
    skipped for ``quot``.
    """
    return Counter({_frac(k): c for k, c in _rep_keys(A, B, op).items()})


def _rep_keys(A: ExactSet, B: ExactSet, op: str) -> Counter:
    if op in ("sum", "diff"):
        L = lcm(A.denominator, B.denominator)
        a, b = A.integers(L), B.integers(L)
        if op == "sum":
            raw = Counter(x + y for x in a for y in b)
        else:
            raw = Counter(x - y for x in a for y in b)
    elif op == "prod":
        LA, LB = A.denominator, B.denominator
        L = LA * LB
        a, b = A.integers(LA), B.integers(LB)
        raw = Counter(x * y for x in a for y in b)
    elif op == "quot":
        L = lcm(A.denominator, B.denominator)
        a, b = A.integers(L), B.integers(L)
        return Counter(_reduce(x, y) for x in a for y in b if y)
    else:
        raise ValueError(f"unknown operation {op!r}")
    if L == 1:
        return raw
    return Counter({_reduce(v, L): c for v, c in raw.items()})


def mult_energy(A: ExactSet, B: ExactSet | None = None) -> int:
    """``E^x(A, B)``: the number of solutions of ``ab = a'b'``."""
    B = A if B is None else B
    a, b = A.integers(A.denominator), B.integers(B.denominator)
    if a and b and len(a) * len(b) > 4096:
        if _kernels.product_safe(max(map(abs, a)), max(map(abs, b))):
            return _kernels.energy_from_products(
                np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
            )
    counts = Counter(x * y for x in a for y in b)
    return sum(c * c for c in counts.values())


def phi_energy(A: ExactSet, B: ExactSet, phi: str = "add") -> int:
    """``sum_x alpha(x)^2`` where ``alpha(x) = #{(a, b): a = phi(b, x)}``."""
    if phi == "add":
        counts = _rep_keys(A, B, "diff")
    elif phi == "mul":
        counts = _rep_keys(A, B, "quot")
    else:
        raise ValueError(f"phi must be 'add' or 'mul', got {phi!r}")
    return sum(c * c for c in counts.values())


def check_symmetric_shifts(X: ExactSet) -> None:
    if 0 in X:
        raise ValueError("shift set must not contain 0")
    if -X != X:
        raise ValueError("shift set must be symmetric (X = -X)")


def sigma_X(A: ExactSet, X: ExactSet) -> int:
    """``sum_{x in X} |A & (A + x)|`` for a symmetric shift set without 0."""
    check_symmetric_shifts(X)
    return popularity_sum(A, X)


def popularity_sum(A: ExactSet, X) -> int:
    # no symmetry check; used by the dyadic partition where 0 may appear
    counts = _rep_keys(A, A, "diff")
    total = 0
    for x in X:
        q = to_rational(x)
        k = q.numerator if q.denominator == 1 else (q.numerator, q.denominator)
        total += counts.get(k, 0)
    return total


def popularity(A: ExactSet) -> dict:
    """``x -> |A & (A + x)|`` over ``x in A - A``."""
    return {_frac(k): c for k, c in _rep_keys(A, A, "diff").items()}


# -- collinear triples ------------------------------------------------------


def _common_integers(*sets: ExactSet):
    L = lcm(*(S.denominator for S in sets))
    return [S.integers(L) for S in sets]


def _triples_oracle(a, b, c, d) -> int:
    count = 0
    for ci in c:
        for di in d:
            for x in a:
                for y in b:
                    lhs = (x - ci) * (y - di)
                    for x2 in a:
                        u = x2 - ci
                        for y2 in b:
                            if u * (y2 - di) == lhs:
                                count += 1
    return count


def _triples_fast_chunk(a, b, cs, d, use_numpy: bool) -> int:
    total = 0
    if use_numpy:
        av = np.asarray(a, dtype=np.int64)
        bv = np.asarray(b, dtype=np.int64)
        for ci in cs:
            x = av - ci
            for di in d:
                total += _kernels.energy_from_products(x, bv - di)
        return total
    for ci in cs:
        xs = [x - ci for x in a]
        for di in d:
            ys = [y - di for y in b]
            counts = Counter(u * v for u in xs for v in ys)
            total += sum(n * n for n in counts.values())
    return total


def collinear_triples(
    A: ExactSet,
    B: ExactSet | None = None,
    C: ExactSet | None = None,
    D: ExactSet | None = None,
    mode: str = "fast",
    threads: int = 1,
) -> int:
    """``T(A, B, C, D)``: sextuples with ``(a-c)(b-d) = (a'-c)(b'-d)``.

    ``T(A)`` is the one-argument call.  ``mode="oracle"`` enumerates every
    sextuple; ``mode="fast"`` sums multiplicative energies of shifted copies.
    """
    B = A if B is None else B
    C = A if C is None else C
    D = C if D is None else D
    a, b, c, d = _common_integers(A, B, C, D)
    if mode == "oracle":
        return _triples_oracle(a, b, c, d)
    if mode != "fast":
        raise ValueError(f"mode must be 'oracle' or 'fast', got {mode!r}")
    if not (a and b and c and d):
        return 0
    span_a = max(abs(x - y) for x in (min(a), max(a)) for y in (min(c), max(c)))
    span_b = max(abs(x - y) for x in (min(b), max(b)) for y in (min(d), max(d)))
    use_numpy = len(a) * len(b) >= 64 and _kernels.product_safe(span_a, span_b)
    c = sorted(c)
    if threads <= 1 or len(c) < 2:
        return _triples_fast_chunk(a, b, c, d, use_numpy)
    parts = [c[i::threads] for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(lambda cs: _triples_fast_chunk(a, b, cs, d, use_numpy), parts))


def T_ratio_report(A: ExactSet, threads: int = 1) -> Fragment:
    if len(A) < 2:
        raise ValueError("need |A| >= 2")
    n = len(A)
    t = collinear_triples(A, threads=threads)
    bound = n**4 * math.log2(n)
    return Fragment("T(A)", t, "|A|^4 log2|A|", bound, t / bound)


def energy_ratio_report(A: ExactSet) -> Fragment:
    n = len(A)
    e = mult_energy(A)
    return Fragment("E^x(A)", e, "|A|^2", n * n, e / (n * n) if n else None)


__all__ = [
    "rep_count",
    "representations",
    "mult_energy",
    "phi_energy",
    "sigma_X",
    "popularity",
    "collinear_triples",
    "T_ratio_report",
]
