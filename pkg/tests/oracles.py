"""Naive reference implementations, deliberately independent of the package code."""

from fractions import Fraction
from itertools import combinations, product


def F(values):
    return {Fraction(v) for v in values}


def sums(A, B):
    return {a + b for a in A for b in B}


def diffs(A, B):
    return {a - b for a in A for b in B}


def prods(A, B):
    return {a * b for a in A for b in B}


def quots(A, B):
    return {a / b for a in A for b in B if b != 0}


def ratio(A, B=None):
    B = A if B is None else B
    return {(a - b) / (b1 - b) for a in A for b in B for b1 in B if b1 != b}


def ratio_restricted(A, X):
    return {(a2 - a) / (a1 - a) for a in A for a1 in A for a2 in A if a1 - a in X}


def energy_mul(A, B):
    return sum(1 for a, b, c, d in product(A, B, A, B) if a * b == c * d)


def triples(A, B, C, D):
    return sum(
        1
        for a, a2, b, b2, c, d in product(A, A, B, B, C, D)
        if (a - c) * (b - d) == (a2 - c) * (b2 - d)
    )


def triples_mod(A, p):
    return sum(
        1
        for a, a2, b, b2, c, d in product(A, A, A, A, A, A)
        if ((a - c) * (b - d) - (a2 - c) * (b2 - d)) % p == 0
    )


def subgroup_by_roots(p, d):
    """Elements of order dividing d: the d-th roots of unity mod p."""
    return {x for x in range(1, p) if pow(x, d, p) == 1}


def max_difference_set(p, allowed):
    """Largest A in Z/p with 0 in A and all nonzero differences in ``allowed`` (tiny p only)."""
    best = 1
    others = list(range(1, p))
    for size in range(2, p + 1):
        found = False
        for rest in combinations(others, size - 1):
            A = (0,) + rest
            if all((x - y) % p in allowed for x in A for y in A if x != y):
                found = True
                break
        if not found:
            break
        best = size
    return best
