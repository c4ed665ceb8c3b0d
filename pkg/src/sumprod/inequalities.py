"""Exact checks of the Pluennecke-Ruzsa and Ruzsa triangle inequalities."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

from .exact import ExactSet, iterated_sumset
from .report import Verdict


def plunnecke_check(A: ExactSet, B: ExactSet, n: int, m: int) -> Verdict:
    """``|nB - mB| <= K^(n+m) |A|`` with ``K = |A+B|/|A|``, cleared of denominators."""
    if not len(A) or not len(B):
        raise ValueError("A and B must be nonempty")
    if n < 0 or m < 0 or n + m < 1:
        raise ValueError("need n, m >= 0 with n + m >= 1")
    s = len(A + B)
    lhs = len(iterated_sumset(B, n, m))
    e = n + m
    ok = lhs * len(A) ** (e - 1) <= s**e
    return Verdict("sets.plunnecke", ok, {"n": n, "m": m, "|nB-mB|": lhs, "|A+B|": s, "|A|": len(A)})


def plunnecke_subset_witness(A: ExactSet, B: ExactSet, delta, kmax: int = 3, max_size: int = 14):
    """Search for X in A, ``|X| >= (1-delta)|A|``, with ``|X+kB| <= (K/delta)^k |X|`` for k <= kmax.

    Larger subsets are tried first.  Returns (X or None, subsets examined).
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if len(A) > max_size:
        raise ValueError(f"exhaustive subset search limited to |A| <= {max_size}")
    n = len(A)
    s = len(A + B)
    kB = [iterated_sumset(B, k, 0) for k in range(1, kmax + 1)]
    need = math.ceil((1 - delta) * n)
    elems = list(A)
    tried = 0
    for size in range(n, max(need, 1) - 1, -1):
        for sub in combinations(elems, size):
            tried += 1
            X = ExactSet(sub)
            # |X+kB| delta^k |A|^k <= |A+B|^k |X|
            if all(
                len(X + kB[k - 1]) * delta**k * n**k <= Fraction(s) ** k * size for k in range(1, kmax + 1)
            ):
                return X, tried
    return None, tried


def plunnecke_subset_check(A: ExactSet, B: ExactSet, delta, kmax: int = 3) -> Verdict:
    X, tried = plunnecke_subset_witness(A, B, delta, kmax)
    return Verdict(
        "sets.plunnecke-subset",
        X is not None,
        {"delta": str(Fraction(delta)), "kmax": kmax, "X": X.to_json() if X is not None else None, "tried": tried},
    )


def ruzsa_triangle_check(A: ExactSet, B: ExactSet, C: ExactSet) -> Verdict:
    """``|C| |A - B| <= |A - C| |B - C|``."""
    lhs = len(C) * len(A - B)
    rhs = len(A - C) * len(B - C)
    return Verdict("sets.ruzsa-triangle", lhs <= rhs, {"lhs": lhs, "rhs": rhs})


def sumset_lower_check(A: ExactSet, B: ExactSet) -> Verdict:
    if not len(A) or not len(B):
        raise ValueError("A and B must be nonempty")
    s = len(A + B)
    return Verdict("sets.sumset-lower", s >= len(A) + len(B) - 1, {"|A+B|": s, "|A|": len(A), "|B|": len(B)})
