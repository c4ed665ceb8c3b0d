from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from sumprod.energy import collinear_triples
from sumprod.exact import ExactSet
from sumprod.ratio import (
    check_dyadic,
    check_inverse_identity,
    check_negation_trick,
    check_reflection_identity,
    dd_chain_report,
    dyadic_partition,
    question_row,
    ratio_set,
    ratio_set_restricted,
    sandwich,
    sigma_chain,
)

sets2 = st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=4), min_size=2, max_size=9, unique=True).map(ExactSet)
h = Fraction(1, 2)


def S(*xs):
    return ExactSet(xs)


def test_ratio_set_examples():
    assert ratio_set(S(0, 1, 2)).values == S(-1, 0, h, 1, 2)
    assert ratio_set(S(0, 1)).values == S(0, 1)
    A, B = S(0, 3, h), S(1, 5, -2)
    assert ratio_set(A.affine(1, 7), B.affine(1, 7)).values == ratio_set(A, B).values
    with pytest.raises(ValueError):
        ratio_set(S(1, 2), S(1))


def test_restricted_examples():
    assert ratio_set_restricted(S(0, 1, 2), S(-1, 1)).values == S(-1, 0, 1, 2)
    assert ratio_set_restricted(S(0, 1), S(-1, 1)).values == S(0, 1)
    A = S(0, 1, 3, 7)
    X = ExactSet(x for x in A - A if x != 0)
    assert ratio_set_restricted(A, X).values == ratio_set(A).values
    with pytest.raises(ValueError):
        ratio_set_restricted(A, S(1))
    with pytest.raises(ValueError):
        ratio_set_restricted(A, S(5, -5))


def test_identity_examples():
    for A in (S(0, 1, 2), S(0, 1)):
        R = ratio_set(A)
        assert check_reflection_identity(R).passed
        assert check_inverse_identity(R).passed
        v = check_negation_trick(R)
        assert v.passed and v.witness["lhs"] == len(R)
    assert check_negation_trick(ratio_set(S(0, 1, 2))).witness["rhs"] == 5


def test_sandwich_passes_when_a_difference_repeats():
    res = sandwich(S(0, 1, 2))
    assert res.passed
    assert res.quotient_size == 7


@pytest.mark.parametrize("A", [[0, 1], [2, 4, 8, 16], [0, 1, 3]])
def test_sandwich_upper_inclusion_fails_only_at_minus_one(A):
    # -1 lies in D/D, yet R[A]R[A] misses it when no difference repeats
    E = oracles.F(A)
    D = oracles.diffs(E, E)
    R = oracles.ratio(E)
    missing = oracles.quots(D, D) - oracles.prods(R, R)
    assert missing == {Fraction(-1)}
    res = sandwich(ExactSet(A))
    assert res.lower and not res.upper
    assert res.missing == [Fraction(-1)]
    assert not res.verdict().passed


@given(sets2)
def test_sandwich_matches_brute_force(A):
    E = set(A)
    D = oracles.diffs(E, E)
    R = oracles.ratio(E)
    DD = oracles.quots(D, D)
    RR = oracles.prods(R, R)
    res = sandwich(A)
    assert res.lower == (R <= DD)
    assert set(res.missing) == DD - RR
    assert res.ratio_size == len(R) and res.quotient_size == len(DD)
    # the corrected inclusion always holds
    assert DD <= RR | {Fraction(-1)}


@given(sets2)
def test_certified_and_pivot_modes_agree(A):
    a, b = sandwich(A), sandwich(A, "pivot")
    assert (a.lower, a.upper, a.missing) == (b.lower, b.upper, b.missing)


@given(sets2, sets2)
def test_ratio_set_matches_oracle(A, B):
    assert set(ratio_set(A, B)) == oracles.ratio(set(A), set(B))


@given(sets2, st.data())
def test_identities_hold(A, data):
    B = data.draw(sets2)
    assert check_reflection_identity(ratio_set(A, B)).passed
    pos = sorted(x for x in A - A if x > 0)
    chosen = data.draw(st.lists(st.sampled_from(pos), min_size=1, unique=True))
    X = ExactSet(chosen + [-x for x in chosen])
    RX = ratio_set_restricted(A, X)
    assert set(RX) == oracles.ratio_restricted(set(A), set(X))
    assert check_reflection_identity(RX).passed
    R = ratio_set(A)
    assert check_inverse_identity(R).passed
    assert check_negation_trick(R).passed
    assert len(R) >= len(A) - 1


@given(sets2, st.fractions(min_value=-9, max_value=9, max_denominator=5).filter(lambda q: q != 0), st.fractions(min_value=-9, max_value=9, max_denominator=5))
def test_affine_invariance(A, lam, x):
    B = ExactSet([0, 3, Fraction(1, 3)])
    assert ratio_set(A.affine(lam, x), B.affine(lam, x)).values == ratio_set(A, B).values


def test_reflection_failure_is_reported():
    from sumprod.ratio import RatioSet

    bad = RatioSet(S(0, 2), "hand-made")
    v = check_reflection_identity(bad)
    assert not v.passed and v.witness["counterexample"] is not None


def test_dyadic_two_points():
    part = dyadic_partition(S(0, 1))
    assert part.delta0 == Fraction(2, 3)
    assert part.popular == S(-1, 0, 1)
    assert len(part.buckets) == 4
    assert part.to_json()["buckets"][0] == {"j": 1, "size": 2, "sigma": 2}


def test_dyadic_progression_popularity():
    A = ExactSet(range(10))
    part = dyadic_partition(A)
    D = A - A
    delta0 = Fraction(100, 2 * len(D))
    assert part.delta0 == delta0
    assert set(part.popular) == {x for x in D if 10 - abs(x) > delta0}
    assert check_dyadic(A).passed


@given(sets2)
def test_dyadic_mass(A):
    part = dyadic_partition(A)
    assert 2 * part.sigma_popular >= len(A) ** 2
    assert check_dyadic(A).passed
    union = set()
    for b in part.buckets:
        assert not union & set(b.elements)
        union |= set(b.elements)
    assert union == set(part.popular)


@given(sets2, st.data())
def test_sigma_chain(A, data):
    pos = sorted(x for x in A - A if x > 0)
    chosen = data.draw(st.lists(st.sampled_from(pos), min_size=1, unique=True))
    X = ExactSet(chosen + [-x for x in chosen])
    ch = sigma_chain(A, X)
    n = len(A)
    assert sum(ch.weights.values()) == n * ch.sigma
    assert n * n * ch.sigma**2 <= ch.ratio_size * collinear_triples(A)
    assert all(v.passed for v in ch.verdicts(n))


def test_dd_chain_small_geometric():
    rows = {f.quantity: f for f in dd_chain_report(S(2, 4, 8))}
    assert rows["|D|"].value == 7
    assert rows["|DD|"].value == 13
    assert rows["|D/D|"].value == 15
    assert rows["|R[A]|"].value == len(oracles.ratio(oracles.F([2, 4, 8])))
    assert all(f.to_json()["assert"].startswith("no-assert") for f in rows.values())


def test_question_row_asserts_nothing():
    row = question_row(S(0, 1, 3, 7))
    assert row["assert"] == "no-assert (exploration)"
    assert row["|A-A|"] == 13
