# Vectorized exact counting over int64.  Every entry point checks magnitudes
# first and returns None when an intermediate could overflow; callers then
# fall back to Python integers.
from __future__ import annotations

import numpy as np

_LIMIT = 2**62
_CHUNK = 1 << 21


def _bound(values) -> int:
    return max((abs(int(v)) for v in values), default=0)


def product_safe(*bounds: int) -> bool:
    prod = 1
    for b in bounds:
        prod *= max(b, 1)
    return prod < _LIMIT


def _blocks(x: np.ndarray, width: int):
    step = max(1, _CHUNK // max(width, 1))
    for i in range(0, len(x), step):
        yield x[i : i + step]


def product_count(a, b):
    """``|{x*y}|`` or None if unsafe."""
    if not product_safe(_bound(a), _bound(b)):
        return None
    x = np.asarray(list(a), dtype=np.int64)
    y = np.asarray(list(b), dtype=np.int64)
    if len(x) == 0 or len(y) == 0:
        return 0
    parts = [np.unique(np.multiply.outer(blk, y).ravel()) for blk in _blocks(x, len(y))]
    return int(len(np.unique(np.concatenate(parts))))


def quotient_codes(a, b):
    """Sorted unique codes of reduced ``x/y`` (``0 not in b``), or None if unsafe.

    Code is ``num * base + den`` with ``den > 0`` reduced and ``base`` larger
    than every possible denominator, so distinct rationals get distinct codes.
    """
    ba, bb = _bound(a), _bound(b)
    base = bb + 1
    if not product_safe(ba + 1, base + 1, 2):
        return None
    x = np.asarray(list(a), dtype=np.int64)
    y = np.asarray(list(b), dtype=np.int64)
    if len(x) == 0 or len(y) == 0:
        return np.empty(0, dtype=np.int64), base
    parts = []
    for blk in _blocks(x, len(y)):
        num = np.repeat(blk, len(y))
        den = np.tile(y, len(blk))
        parts.append(np.unique(encode(num, den, base)))
    return np.unique(np.concatenate(parts)), base


def encode(num: np.ndarray, den: np.ndarray, base: int) -> np.ndarray:
    g = np.gcd(num, den)
    g = np.where(den < 0, -g, g)
    return (num // g) * base + den // g


def quotient_count(a, b):
    res = quotient_codes(a, b)
    return None if res is None else int(len(res[0]))


def energy_from_products(x: np.ndarray, y: np.ndarray) -> int:
    _, counts = np.unique(np.multiply.outer(x, y).ravel(), return_counts=True)
    return int(np.dot(counts, counts))


def member(codes: np.ndarray, sorted_codes: np.ndarray) -> np.ndarray:
    if len(sorted_codes) == 0:
        return np.zeros(len(codes), dtype=bool)
    idx = np.searchsorted(sorted_codes, codes)
    idx = np.minimum(idx, len(sorted_codes) - 1)
    return sorted_codes[idx] == codes
