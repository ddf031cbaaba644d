from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from math import gcd, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reidnum.core import (
    ALEPH0,
    UNCOUNTABLE,
    Cardinal,
    Cyclic,
    FgAbelianGroup,
    Free,
    GroupError,
    GroupExpr,
    IntegerMatrix,
    Localized,
    LocalizedUnit,
    Neg,
    PadicIntegers,
    ParseError,
    PerComponent,
    Prufer,
    Rationals,
    ReducedLift,
    ReidemeisterResult,
    ScalarMul,
    ShapeError,
    Theta,
    TruncatedCyclicFamily,
    Unit,
    at_least,
    cardinal_mul,
    check_relation_preserving,
    finite,
    interleave_phi_matrix,
    interleave_psi_matrix,
    normalize_fg,
    parse_endo,
    parse_group,
    primary_decomposition,
    render_endo,
    theta_matrix,
    two_exponents,
)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]

atoms = st.one_of(
    st.integers(1, 5).map(Free),
    st.integers(2, 200).map(Cyclic),
    st.sampled_from(SMALL_PRIMES).map(PadicIntegers),
    st.sampled_from(SMALL_PRIMES).map(Prufer),
    st.integers(1, 4).map(Rationals),
    st.builds(
        lambda xs, mode: TruncatedCyclicFamily(tuple(sorted(xs)), mode),
        st.lists(st.sampled_from([2, 4, 8, 3, 9, 5]), min_size=1, max_size=4),
        st.sampled_from(["sum", "prod"]),
    ),
)


@st.composite
def group_exprs(draw):
    parts = draw(st.lists(atoms, max_size=5))
    primes = draw(st.lists(st.sampled_from(SMALL_PRIMES), unique=True, max_size=3))
    return GroupExpr(tuple(parts) + tuple(Localized(p) for p in primes))


@given(group_exprs())
def test_group_render_parse_round_trip(g):
    assert parse_group(g.render()) == g


def test_parse_examples():
    g = parse_group("Z^2 + Z/4 + Zhat(3)")
    assert g.summands == (Free(2), Cyclic(4), Localized(3))
    assert parse_group("0") == GroupExpr(())
    assert GroupExpr(()).render() == "0"
    assert parse_group("Q^3").summands == (Rationals(3),)
    assert parse_group("Fam(prod; 2,4,8)").summands == (TruncatedCyclicFamily((2, 4, 8), "prod"),)


@pytest.mark.parametrize("text", ["Z/", "Zhat(3", "Z + + Z", "W", "Z Z"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_group(text)


@pytest.mark.parametrize("text", ["Z/1", "Zhat(4)", "Zp(6)", "Zhat(3) + Zhat(3)"])
def test_group_errors(text):
    with pytest.raises(GroupError):
        parse_group(text)


ENDOS = [
    IntegerMatrix(((0, 1), (1, 0))),
    Unit(Fraction(-9)),
    Unit(Fraction(1, 3)),
    ScalarMul(6),
    Neg(),
    Theta(5),
    PerComponent((Unit(Fraction(9)), Neg())),
    ReducedLift(Theta(2)),
    ReducedLift(PerComponent((Neg(), ScalarMul(3)))),
]


@pytest.mark.parametrize("endo", ENDOS, ids=render_endo)
def test_endo_round_trip(endo):
    assert parse_endo(render_endo(endo)) == endo


def test_endo_parse_errors():
    for bad in ["matrix:[[1,2]", "unit:", "diag:[neg", "theta:x", "frob"]:
        with pytest.raises(ParseError):
            parse_endo(bad)


# -- cardinals --------------------------------------------------------------

cardinals = st.one_of(
    st.integers(1, 10**6).map(finite),
    st.integers(1, 10**6).map(at_least),
    st.just(ALEPH0),
    st.just(UNCOUNTABLE),
)


@given(cardinals, cardinals)
def test_cardinal_mul_commutes(a, b):
    assert cardinal_mul(a, b) == cardinal_mul(b, a)


@given(cardinals, cardinals, cardinals)
def test_cardinal_mul_associates(a, b, c):
    assert cardinal_mul(cardinal_mul(a, b), c) == cardinal_mul(a, cardinal_mul(b, c))


def test_cardinal_mul_table():
    f, lb = finite(3), at_least(4)
    assert cardinal_mul(f, finite(5)) == finite(15)
    assert cardinal_mul(f, lb) == at_least(12)
    assert cardinal_mul(f, ALEPH0) == ALEPH0
    assert cardinal_mul(lb, ALEPH0) == ALEPH0
    assert cardinal_mul(ALEPH0, ALEPH0) == ALEPH0
    for x in (f, lb, ALEPH0, UNCOUNTABLE):
        assert cardinal_mul(x, UNCOUNTABLE) == UNCOUNTABLE
        assert cardinal_mul(x, finite(1)) == x


@given(cardinals)
def test_cardinal_json_round_trip(c):
    obj = c.to_json()
    assert all(isinstance(v, str) for v in obj.values())
    assert Cardinal.from_json(obj) == c


def test_large_values_stay_strings():
    assert finite(2**100).to_json() == {"kind": "finite", "value": str(2**100)}


# -- finitely generated groups ----------------------------------------------

def _element_order_census(moduli):
    """Multiset of element orders, computed by brute force."""
    counts = Counter()
    for x in itertools.product(*(range(m) for m in moduli)):
        o = 1
        for xi, m in zip(x, moduli):
            k = m // gcd(xi, m)
            o = o * k // gcd(o, k)
        counts[o] += 1
    return counts


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 12), min_size=1, max_size=4).filter(lambda xs: prod(xs) <= 3000))
def test_normalize_matches_element_order_census(orders):
    g = normalize_fg(0, orders)
    assert g.order == prod(orders)
    assert _element_order_census(orders) == _element_order_census(g.invariant_factors)
    for a, b in zip(g.invariant_factors, g.invariant_factors[1:]):
        assert b % a == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(2, 30), min_size=1, max_size=4))
def test_primary_decomposition(orders):
    g = normalize_fg(0, orders)
    parts = primary_decomposition(g)
    assert prod(h.order for h in parts.values()) == g.order
    for p, h in parts.items():
        for d in h.invariant_factors:
            while d % p == 0:
                d //= p
            assert d == 1


def test_normalize_examples():
    assert normalize_fg(0, [2, 3]).invariant_factors == (6,)
    assert normalize_fg(0, [4, 6]).invariant_factors == (2, 12)
    assert normalize_fg(2, [2, 2]).moduli() == (0, 0, 2, 2)
    with pytest.raises(GroupError):
        FgAbelianGroup(0, (4, 6))


# -- units, matrices ----------------------------------------------------------

def test_localized_unit():
    u = LocalizedUnit.from_rational(Fraction(-9))
    assert u.value == -9 and u.is_unit_of({3}) and not u.is_unit_of({5})
    assert LocalizedUnit.power(2, -3).value == Fraction(1, 8)


def test_theta_blocks():
    assert theta_matrix(2) == ((1, 1), (-1, 0))
    assert theta_matrix(3) == ((0, -1, 0), (1, 0, 1), (0, 1, 1))
    assert len(theta_matrix(7)) == 7


def test_interleave_matrices_are_inverse():
    for n in range(1, 9):
        A, B = interleave_phi_matrix(n), interleave_psi_matrix(n)
        P = [[sum(A[i][t] * B[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        assert P == [[int(i == j) for j in range(n)] for i in range(n)]


def test_relation_preserving():
    check_relation_preserving(((1, 2), (0, 1)), (2, 4))
    with pytest.raises(ShapeError):
        check_relation_preserving(((1, 0), (1, 1)), (2, 4))
    assert two_exponents((2, 4, 8)) == (1, 2, 3)


def test_result_validation():
    with pytest.raises(ValueError):
        ReidemeisterResult(finite(2), "nonsense")
    r = ReidemeisterResult(finite(2), "oracle", ((0,), (1,)))
    assert r.to_json()["representatives"] == [[0], [1]]
