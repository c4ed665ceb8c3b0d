import math
import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sumprod.exact import ExactSet
from sumprod.incidence import (
    Curve,
    LogLinear,
    MonotoneMap,
    Point,
    alpha_counts,
    check_d_simple,
    check_rich_accounting,
    convex_certificate,
    convex_sample_verdict,
    count_incidences,
    d_tilde_plus,
    d_times_upper_for_ratio_set,
    intersection_count,
    pairwise_intersection_bound,
    sample_D_lower,
    szt_rich_set,
)
from sumprod.ratio import ratio_set

coef = st.fractions(min_value=-4, max_value=4, max_denominator=3)
nonzero = coef.filter(lambda q: q != 0)
lines = st.tuples(coef, coef, coef).filter(lambda t: t[:2] != (0, 0)).map(lambda t: Curve.line(*t))
hyperbolas = st.builds(Curve.hyperbola, coef, coef, nonzero)
curves = st.one_of(lines, hyperbolas)


def grid(k):
    return [Point.of(x, y) for x in range(k) for y in range(k)]


def grid_lines(k):
    pts = grid(k)
    out = {}
    for p, q in combinations(pts, 2):
        s, t = q.y - p.y, q.x - p.x
        c = Curve.line(s, t, s * p.x - t * p.y)
        out[c.key()] = c
    return list(out.values())


def test_incidence_examples():
    diag = Curve.line(1, 1, 0)
    assert count_incidences([Point.of(0, 0), Point.of(1, 1)], [diag]) == 2
    assert count_incidences(grid(2), [diag, Curve.line(0, -1, 0)]) == 4
    L = grid_lines(3)
    # 8 lines carry three grid points, 12 carry two
    assert len(L) == 20
    assert count_incidences(grid(3), L, "naive") == count_incidences(grid(3), L) == 3 * 8 + 2 * 12


def test_hyperbola_incidences():
    h = Curve.hyperbola(0, 0, 1)  # -x*y = 1
    pts = [Point.of(1, -1), Point.of(-1, 1), Point.of(2, Fraction(-1, 2)), Point.of(0, 5)]
    assert count_incidences(pts, [h]) == 3 == count_incidences(pts, [h], "naive")


@settings(max_examples=40)
@given(
    st.lists(st.tuples(coef, coef), max_size=12).map(lambda ps: [Point.of(*p) for p in ps]),
    st.lists(curves, max_size=8),
)
def test_hashed_equals_naive(points, L):
    assert count_incidences(points, L) == count_incidences(points, L, "naive")


def test_curve_validation_and_json():
    with pytest.raises(ValueError):
        Curve.hyperbola(1, 2, 0)
    with pytest.raises(ValueError):
        Curve.line(0, 0, 1)
    for c in (Curve.line(1, Fraction(-2, 3), 5), Curve.hyperbola(1, 0, Fraction(1, 2))):
        assert Curve.from_json(c.to_json()) == c
    assert Curve.line(1, -2, 3).to_json() == {"kind": "line", "s": 1, "t": -2, "alpha": 3}


def test_intersection_examples():
    assert intersection_count(Curve.line(1, 1, 0), Curve.line(1, -1, 0)) == 1
    assert intersection_count(Curve.line(1, 1, 0), Curve.line(1, 1, 3)) == 0
    assert intersection_count(Curve.line(2, 2, 2), Curve.line(1, 1, 1)) == math.inf
    n = intersection_count(Curve.hyperbola(1, 0, 1), Curve.hyperbola(2, 1, 1))
    assert n <= 2
    assert n == _sympy_count(Curve.hyperbola(1, 0, 1), Curve.hyperbola(2, 1, 1))


def _equation(c, x, y):
    a, b, al = (sympy.Rational(v.numerator, v.denominator) for v in (c.a, c.b, c.alpha))
    if c.kind == "line":
        return a * x - b * y - al
    return (a - x) * (y - b) - al


def _sympy_count(c1, c2):
    x, y = sympy.symbols("x y")
    sols = sympy.solve([_equation(c1, x, y), _equation(c2, x, y)], [x, y], dict=True)
    return sum(1 for s in sols if s[x].is_real and s[y].is_real)


@settings(max_examples=50)
@given(curves, curves)
def test_intersections_match_sympy(c1, c2):
    if c1.key() == c2.key():
        assert intersection_count(c1, c2) == math.inf
        return
    assert intersection_count(c1, c2) == _sympy_count(c1, c2)


@settings(max_examples=30)
@given(st.lists(curves, max_size=6, unique_by=lambda c: c.key()))
def test_pseudo_line_family(L):
    v = pairwise_intersection_bound(L)
    assert v.passed
    assert v.witness["max_line_pair"] <= 1 and v.witness["max_with_hyperbola"] <= 2


def test_pseudo_line_reports_coincident_pair():
    v = pairwise_intersection_bound([Curve.line(1, 1, 0), Curve.line(2, 2, 0)])
    assert not v.passed and v.witness["offender"][2] == "coincident"


def test_rich_set_examples():
    A = ExactSet([1, 2, 3])
    w = szt_rich_set(A, A, 1)
    assert (w.count, w.witnessD) == (5, Fraction(5, 27))
    assert szt_rich_set(A, A, 4).count == 0
    G = ExactSet([1, 2, 4])
    reps = alpha_counts(G, G, "mul")
    assert szt_rich_set(G, G, 2, "mul").count == sum(1 for c in reps.values() if c >= 2) == 3
    with pytest.raises(ValueError):
        szt_rich_set(A, A, 0)


sets = st.lists(st.integers(-15, 15), min_size=1, max_size=8, unique=True).map(ExactSet)


@given(sets, sets)
def test_rich_count_monotone_and_accounted(A, B):
    counts = [szt_rich_set(A, B, t).count for t in range(1, len(B) + 2)]
    assert counts == sorted(counts, reverse=True)
    assert counts[0] == len(A - B)
    assert check_rich_accounting(A, B).passed


def test_convex_set_samples_stay_below_four():
    A = ExactSet([1, 4, 9, 16, 25])
    frag, drawn = sample_D_lower(A, "add", samples=200, seed=3)
    assert frag.value < 4
    assert convex_sample_verdict(A, drawn).passed
    assert frag.side.startswith("lower bound")
    assert convex_certificate(5).passed


def test_singleton_witness_at_most_one():
    frag, drawn = sample_D_lower(ExactSet([7]), "add", samples=50, seed=1)
    assert frag.value <= 1
    assert all(s.witness.witnessD <= 1 for s in drawn)


def test_random_tau_sampling_and_mul():
    G = ExactSet([2**i for i in range(1, 9)])
    frag, drawn = sample_D_lower(G, "mul", samples=30, seed=0, tau="random")
    assert len(drawn) == 30 and frag.value >= 0
    with pytest.raises(ValueError):
        sample_D_lower(G, samples=0)


def test_fixed_generator_matches_rich_set():
    A = ExactSet([1, 4, 9])
    B = ExactSet([0, 1])
    frag, drawn = sample_D_lower(A, B_generator=lambda rng: B, samples=2)
    best = max(szt_rich_set(A, B, t).witnessD for t in (1, 2))
    assert frag.value == best


def test_loglinear_is_exact():
    assert LogLinear.log2(8) == LogLinear.rational(3)
    assert LogLinear.log2(6) == LogLinear.log2(2) + LogLinear.log2(3)
    assert LogLinear.log2(Fraction(3, 4)) == LogLinear(Fraction(-2), ((3, Fraction(1)),))
    assert LogLinear.log2(3) != LogLinear.log2(5)
    assert abs(float(LogLinear.log2(12)) - math.log2(12)) < 1e-12
    with pytest.raises(ValueError):
        LogLinear.log2(0)


def test_monotone_map_catalog():
    sq = MonotoneMap("power", (1, 2))
    assert sq(Fraction(9, 4)) == LogLinear.rational(Fraction(3, 2))
    with pytest.raises(ValueError):
        sq(2)
    assert MonotoneMap("affine", (2, 1))(3) == LogLinear.rational(7)
    assert MonotoneMap("inverse_table", (1, 4, 9))(9) == LogLinear.rational(3)
    with pytest.raises(ValueError):
        MonotoneMap("inverse_table", (1, 9, 4))(9)
    with pytest.raises(ValueError):
        MonotoneMap("log2m1")(1)


def test_d_tilde_examples():
    sq = MonotoneMap("power", (1, 2))
    res = d_tilde_plus(ExactSet([1, 4, 9, 16]), sq, [1, 2, 3, 4])
    assert res.value == Fraction(49, 16)
    assert res.to_fragment().side.startswith("upper bound")
    A = ExactSet([2, 5, 11])
    assert d_tilde_plus(A, MonotoneMap("affine", (1, 0)), [0]).value == len(A)


def test_d_tilde_log_example():
    R = ratio_set(ExactSet([0, 1, 2])).values
    C = [LogLinear.log2(r) for r in R if r > 0]
    res = d_tilde_plus(R, MonotoneMap("log2m1"), C, restrict=True)
    # only x = 2 lies in the domain; f(2) = 0, so f(A)+C = C and the value is |C| = 3
    assert len(res.domain) == 1
    assert res.value == 3


def test_d_tilde_errors():
    with pytest.raises(ValueError):
        d_tilde_plus(ExactSet([1, 2]), MonotoneMap("power", (2, 1)), [])
    with pytest.raises(ValueError):
        d_tilde_plus(ExactSet([-1, 1]), MonotoneMap("power", (2, 1)), [0])
    with pytest.raises(ValueError):
        d_tilde_plus(ExactSet([0]), MonotoneMap("log2"), [0], restrict=True)


@given(sets, st.lists(st.integers(-10, 10), min_size=1, max_size=5, unique=True))
def test_d_simple(A, C):
    assert check_d_simple(A, MonotoneMap("affine", (3, -1)), C).passed


def test_d_times_for_ratio_sets():
    rows = {f.quantity: f for f in d_times_upper_for_ratio_set(ExactSet([0, 1]))}
    assert rows["|R[A]|"].value == 2 and rows["|RR|"].value == 2
    assert rows["D_x(R) bound value"].value == 1
    rows = {f.quantity: f for f in d_times_upper_for_ratio_set(ExactSet([0, 1, 2]))}
    R = ratio_set(ExactSet([0, 1, 2])).values
    rr = len({a * b for a in R for b in R})
    assert rows["D_x(R) bound value"].value == Fraction(rr * rr, 25)
    rng = random.Random(5)
    A = ExactSet(rng.sample(range(-50, 50), 12))
    R = ratio_set(A).values
    rows = d_times_upper_for_ratio_set(A, R)
    assert rows[-1].quantity == "|RB|" and rows[-1].ratio > 0
    with pytest.raises(ValueError):
        d_times_upper_for_ratio_set(ExactSet([1]))
