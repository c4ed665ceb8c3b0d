"""Exact rational scalars and canonical finite sets.

Elements are kept as canonical keys: a plain ``int`` for integers and a
reduced ``(numerator, denominator)`` tuple otherwise.  Keys hash and compare
cheaply, which matters because quotient sets of difference sets reach
millions of elements.  Everything crossing the public surface is a
:class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Union

Rational = Fraction
Key = Union[int, tuple]


def to_rational(value) -> Fraction:
    """Coerce ints, Fractions, numeric strings and ``{"n", "d"}`` dicts."""
    if isinstance(value, bool):
        raise TypeError("booleans are not set elements")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, dict):
        return Fraction(int(value["n"]), int(value["d"]))
    raise TypeError(f"cannot represent {value!r} exactly")


def _key(x) -> Key:
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    q = to_rational(x)
    if q.denominator == 1:
        return q.numerator
    return (q.numerator, q.denominator)


def _reduce(n: int, d: int) -> Key:
    # d != 0
    if d < 0:
        n, d = -n, -d
    if n % d == 0:
        return n // d
    g = gcd(n, d)
    return (n // g, d // g)


def _pair(k: Key) -> tuple:
    if isinstance(k, int):
        return (k, 1)
    return k


def _frac(k: Key) -> Fraction:
    if isinstance(k, int):
        return Fraction(k)
    return Fraction(k[0], k[1])


class ExactSet:
    """Immutable finite set of rationals, iterated in ascending order."""

    __slots__ = ("_keys", "_sorted")

    def __init__(self, elements: Iterable = ()):
        self._keys = frozenset(_key(x) for x in elements)
        self._sorted = None

    @classmethod
    def _from_keys(cls, keys) -> "ExactSet":
        obj = cls.__new__(cls)
        obj._keys = keys if isinstance(keys, frozenset) else frozenset(keys)
        obj._sorted = None
        return obj

    # -- container protocol -------------------------------------------------
    def __len__(self) -> int:
        return len(self._keys)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        try:
            return _key(x) in self._keys
        except (TypeError, ValueError, ZeroDivisionError):
            return False

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactSet):
            return NotImplemented
        return self._keys == other._keys

    def __hash__(self) -> int:
        return hash(self._keys)

    def __repr__(self) -> str:
        shown = ", ".join(str(x) for x in self.elements[:12])
        if len(self) > 12:
            shown += ", ..."
        return f"ExactSet({{{shown}}})"

    @property
    def elements(self) -> tuple:
        """Ascending tuple of Fractions (computed once)."""
        if self._sorted is None:
            if self.is_integral:
                self._sorted = tuple(Fraction(k) for k in sorted(self._keys))
            else:
                self._sorted = tuple(sorted(_frac(k) for k in self._keys))
        return self._sorted

    @property
    def keys(self) -> frozenset:
        return self._keys

    @property
    def is_integral(self) -> bool:
        return all(isinstance(k, int) for k in self._keys)

    @property
    def denominator(self) -> int:
        """Least common denominator of the elements (1 for the empty set)."""
        return lcm(1, *(k[1] for k in self._keys if not isinstance(k, int)))

    def integers(self, scale: int = 1) -> list:
        """Elements multiplied by ``scale``; ``scale`` must clear all denominators."""
        out = []
        for k in self._keys:
            n, d = _pair(k)
            q, r = divmod(n * scale, d)
            if r:
                raise ValueError(f"scale {scale} does not clear denominator {d}")
            out.append(q)
        return out

    def min(self) -> Fraction:
        return self.elements[0]

    def max(self) -> Fraction:
        return self.elements[-1]

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "ExactSet") -> "ExactSet":
        return sumset(self, other)

    def __sub__(self, other: "ExactSet") -> "ExactSet":
        return diffset(self, other)

    def __mul__(self, other: "ExactSet") -> "ExactSet":
        return prodset(self, other)

    def __truediv__(self, other: "ExactSet") -> "ExactSet":
        return quotset(self, other)

    def __neg__(self) -> "ExactSet":
        return ExactSet._from_keys(
            -k if isinstance(k, int) else (-k[0], k[1]) for k in self._keys
        )

    def __or__(self, other: "ExactSet") -> "ExactSet":
        return ExactSet._from_keys(self._keys | other._keys)

    def __and__(self, other: "ExactSet") -> "ExactSet":
        return ExactSet._from_keys(self._keys & other._keys)

    def issubset(self, other: "ExactSet") -> bool:
        return self._keys <= other._keys

    def affine(self, lam, x=0) -> "ExactSet":
        return affine(self, lam, x)

    def reciprocals(self) -> "ExactSet":
        """``{1/a : a in A, a != 0}``."""
        out = set()
        for k in self._keys:
            n, d = _pair(k)
            if n:
                out.add(_reduce(d, n))
        return ExactSet._from_keys(out)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> list:
        return [
            int(q) if q.denominator == 1 else {"n": q.numerator, "d": q.denominator}
            for q in self.elements
        ]

    @classmethod
    def from_json(cls, data: list) -> "ExactSet":
        return cls(to_rational(v) for v in data)


def _scaled(A: ExactSet, B: ExactSet):
    L = lcm(A.denominator, B.denominator)
    return A.integers(L), B.integers(L), L


def _from_scaled(values, L: int) -> ExactSet:
    if L == 1:
        return ExactSet._from_keys(set(values))
    return ExactSet._from_keys(_reduce(v, L) for v in set(values))


def sumset(A: ExactSet, B: ExactSet) -> ExactSet:
    a, b, L = _scaled(A, B)
    return _from_scaled({x + y for x in a for y in b}, L)


def diffset(A: ExactSet, B: ExactSet) -> ExactSet:
    a, b, L = _scaled(A, B)
    return _from_scaled({x - y for x in a for y in b}, L)


def prodset(A: ExactSet, B: ExactSet) -> ExactSet:
    LA, LB = A.denominator, B.denominator
    a, b = A.integers(LA), B.integers(LB)
    return _from_scaled({x * y for x in a for y in b}, LA * LB)


def quotset(A: ExactSet, B: ExactSet) -> ExactSet:
    """``{a/b : b != 0}``; empty when ``B`` has no nonzero element."""
    a, b, _ = _scaled(A, B)
    b = [y for y in b if y]
    return ExactSet._from_keys(quotient_keys(a, b))


def quotient_keys(a, b) -> set:
    """Canonical keys of ``{x/y}`` for integer lists (``0 not in b``)."""
    out = set()
    add = out.add
    for y in b:
        if y == 1:
            out.update(a)
            continue
        for x in a:
            if x % y == 0:
                add(x // y)
            else:
                g = gcd(x, y)
                if y < 0:
                    g = -g
                add((x // g, y // g))
    return out


def affine(A: ExactSet, lam, x=0) -> ExactSet:
    """``lam * A + x``; ``lam`` must be nonzero."""
    lam, x = to_rational(lam), to_rational(x)
    if lam == 0:
        raise ValueError("affine map needs a nonzero dilation")
    if lam in (1, -1) and x.denominator == 1:
        # unit dilation plus integer shift keeps keys reduced: no gcd needed
        s, t = int(lam), int(x)
        return ExactSet._from_keys(
            s * k + t if isinstance(k, int) else (s * k[0] + t * k[1], k[1]) for k in A.keys
        )
    out = set()
    for k in A.keys:
        n, d = _pair(k)
        # (n/d)*lam + x with lam = ln/ld, x = xn/xd
        num = n * lam.numerator * x.denominator + x.numerator * d * lam.denominator
        den = d * lam.denominator * x.denominator
        out.add(_reduce(num, den))
    return ExactSet._from_keys(out)


def iterated_sumset(B: ExactSet, n: int, m: int) -> ExactSet:
    """``nB - mB`` (``n, m >= 0``, not both zero)."""
    if n < 0 or m < 0 or n + m == 0:
        raise ValueError("need n, m >= 0 with n + m >= 1")
    acc = None
    for _ in range(n):
        acc = B if acc is None else acc + B
    for _ in range(m):
        acc = -B if acc is None else acc - B
    return acc


def arithmetic_progression(n: int, start=0, step=1) -> ExactSet:
    start, step = to_rational(start), to_rational(step)
    return ExactSet(start + i * step for i in range(n))


def card_prodset(A: ExactSet, B: ExactSet) -> int:
    """``|AB|`` without materializing the set when the int64 kernel is safe."""
    from . import _kernels

    if len(A) * len(B) > 50_000:
        n = _kernels.product_count(A.integers(A.denominator), B.integers(B.denominator))
        if n is not None:
            return n
    return len(prodset(A, B))


def card_quotset(A: ExactSet, B: ExactSet) -> int:
    from . import _kernels

    if len(A) * len(B) > 50_000:
        a, b, _ = _scaled(A, B)
        n = _kernels.quotient_count(a, [y for y in b if y])
        if n is not None:
            return n
    return len(quotset(A, B))
