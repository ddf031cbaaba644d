from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reidnum.core import (
    ALEPH0,
    UNCOUNTABLE,
    FgAbelianGroup,
    GroupExpr,
    IntegerMatrix,
    Localized,
    LocalizedUnit,
    Prufer,
    Rationals,
    ReidemeisterResult,
    ReidnumError,
    ShapeError,
    at_least,
    divisible_split,
    finite,
    parse_endo,
    parse_group,
)
from reidnum.engine import (
    LocalizedFamily,
    in_localized_multiple,
    index_localized,
    is_automorphism,
    r_lower_bound_truncated,
    reidemeister,
    reidemeister_divisible,
    reidemeister_family,
    reidemeister_fg,
    reidemeister_localized,
    reidemeister_padic,
    reidemeister_product_localized_symbolic,
    reidemeister_reduced_lift,
    reidemeister_sum_localized,
    spectrum_localized,
)
from reidnum.oracle import FiniteGroupTable, reidemeister_oracle
from reidnum.verify import padic_residue_r, random_endomorphism, random_moduli


def rnum(group: str, endo: str):
    return reidemeister(parse_group(group), parse_endo(endo)).number


@pytest.mark.parametrize(
    "group, endo, expected",
    [
        ("Z^2", "theta:2", finite(1)),
        ("Z/4", "neg", finite(2)),
        ("Zhat(3)", "unit:1", ALEPH0),
        ("Zhat(3)", "unit:-9", finite(10)),
        ("Zhat(3)", "unit:9", finite(8)),
        ("Zhat(2)", "unit:-1", finite(1)),
        ("Zp(5)", "mul:6", finite(5)),
        ("Zp(3)", "mul:2", finite(1)),
        ("Zp(2)", "neg", finite(2)),
        ("Q^3", "theta:3", finite(1)),
        ("Q", "mul:2", finite(1)),
        ("Q", "mul:1", ALEPH0),
        ("Prufer(5)", "neg", finite(1)),
        ("Zhat(3) + Zhat(5)", "diag:[unit:9,neg]", finite(16)),
        ("Z", "matrix:[[1]]", ALEPH0),
        ("Z", "matrix:[[-1]]", finite(2)),
        ("Z/6", "mul:1", finite(6)),
        ("Z/4 + Z/3", "neg", finite(2)),
        ("Zhat(2)", "neg", finite(1)),
        ("Z/7", "neg", finite(1)),
        ("Q + Z/4", "lift:(neg)", finite(2)),
        ("Prufer(3) + Z^2", "lift:(theta:2)", finite(1)),
        ("Q + Z", "lift:(mul:1)", ALEPH0),
        ("0", "neg", finite(1)),
    ],
)
def test_router_examples(group, endo, expected):
    assert rnum(group, endo) == expected


def test_fg_examples():
    assert reidemeister_fg((4,), [[3]]).number == finite(2)
    assert reidemeister_fg((5,), [[2]]).number == finite(1)
    assert reidemeister_fg((6,), [[1]]).number == finite(6)
    assert reidemeister_fg(FgAbelianGroup(1, ()), [[-1]]).number == finite(2)
    with pytest.raises(ShapeError):
        reidemeister_fg((4,), [[1, 0]])
    with pytest.raises(ShapeError):
        rnum("Z^2", "theta:3")


@pytest.mark.parametrize("seed", range(25))
def test_fg_engine_matches_oracle(seed):
    rng = random.Random(1000 + seed)
    moduli = random_moduli(rng, 4096)
    M = random_endomorphism(rng, moduli)
    assert reidemeister_fg(moduli, M).number == reidemeister_oracle(FiniteGroupTable(moduli), M).number


def test_localized_examples():
    assert reidemeister_localized(3, 9).number == finite(8)
    assert reidemeister_localized(3, -9).number == finite(10)
    assert reidemeister_localized(2, -1).number == finite(1)
    assert reidemeister_localized(3, 1).number == ALEPH0
    with pytest.raises(ShapeError):
        reidemeister_localized(3, 5)


@settings(max_examples=60)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(-12, 12), st.sampled_from([1, -1]))
def test_localized_unit_inverse_invariance(p, m, sign):
    u = LocalizedUnit.power(p, m, sign)
    inv = LocalizedUnit.power(p, -m, sign)
    assert reidemeister_localized(p, u).number == reidemeister_localized(p, inv).number


def test_index_lemma_examples():
    assert index_localized(5, 8) == finite(8)
    assert index_localized(3, 9) == finite(1)
    assert index_localized(3, 18) == finite(2)
    # cosets {0, 1} + 18 Z[1/3]
    assert in_localized_multiple(Fraction(18, 27), 18, 3)
    assert not in_localized_multiple(Fraction(1), 18, 3)
    assert in_localized_multiple(Fraction(1, 1) - Fraction(19, 1), 18, 3)


def test_spectrum_examples():
    def values(p, m):
        return set(spectrum_localized(p, m).values)

    assert values(3, 2) == {finite(2), finite(4), finite(8), finite(10), ALEPH0}
    assert values(2, 1) == {finite(1), finite(3), ALEPH0}
    assert values(5, 1) == {finite(2), finite(4), finite(6), ALEPH0}
    rep = spectrum_localized(3, 2)
    assert rep.includes_infinity
    for v, units in rep.witnesses.items():
        for u in units:
            assert reidemeister_localized(3, u).number == v


def test_sum_and_family():
    assert reidemeister_sum_localized([(3, 9), (5, -1)]).number == finite(16)
    assert reidemeister_sum_localized([(3, 1)]).number == ALEPH0
    inf = reidemeister_sum_localized([], True, True)
    assert inf.number == ALEPH0
    with pytest.raises(ReidnumError):
        reidemeister_sum_localized([(3, 9), (3, -1)])
    assert reidemeister_family(LocalizedFamily((3, 5)), {3: 9, 5: -1}).number == finite(16)
    assert reidemeister_family(LocalizedFamily(infinite=True, mode="prod")).number == UNCOUNTABLE


def test_lower_bound_examples():
    assert r_lower_bound_truncated({p: -1 for p in (3, 5, 7)}, 10) == at_least(8)
    assert r_lower_bound_truncated({3: 9}, 3) == at_least(8)
    assert r_lower_bound_truncated({}, 2) == at_least(1)


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.sampled_from([3, 5, 7, 11, 13, 17]), st.sampled_from([1, -1, 2, 1 / 2]), max_size=4))
def test_lower_bound_monotone(raw):
    units = {}
    for p, kind in raw.items():
        units[p] = {1: 1, -1: -1, 2: p, 0.5: Fraction(1, p)}[kind]
    bounds = [r_lower_bound_truncated(units, b).value for b in (3, 10, 20, 50)]
    assert bounds == sorted(bounds)
    assert all(b.bit_length() >= 1 for b in bounds)


def test_symbolic_product():
    r = reidemeister_product_localized_symbolic(True)
    assert r.number == UNCOUNTABLE and r.certificate == "cited-symbolic" and r.cites
    with pytest.raises(ReidnumError):
        reidemeister_product_localized_symbolic(False)
    with pytest.raises(ReidnumError):
        reidemeister_product_localized_symbolic(True, "sum")


def test_padic_examples():
    assert reidemeister_padic(3, 2, 4).number == finite(1)
    assert reidemeister_padic(2, -1, 4).number == finite(2)
    assert reidemeister_padic(5, 6, 3).number == finite(5)
    assert reidemeister_padic(5, 1, 3).number == UNCOUNTABLE
    low = reidemeister_padic(5, 26, 2)
    assert low.number == at_least(25) and low.certificate == "lower-bound"
    with pytest.raises(ShapeError):
        reidemeister_padic(3, 3, 2)


@pytest.mark.parametrize("p, u", [(3, 2), (5, 2), (7, 2), (2, -1), (5, 6), (3, 10), (2, 5)])
def test_padic_matches_residue_rings(p, u):
    r = reidemeister_padic(p, u, 8).number
    for j in range(1, 7):
        if p**j > 50_000:
            break
        # |coker(u - 1)| on Z/p^j stabilises at p^v once j > v
        rj = padic_residue_r(p, u, j)
        assert rj == min(r.value, p**j)


def test_divisible_dichotomy():
    for q in (2, -1, 3, Fraction(1, 2), Fraction(-7, 3)):
        assert reidemeister_divisible(Rationals(1), q).number == finite(1)
    assert reidemeister_divisible(Rationals(1), 1).number == ALEPH0
    for p in (2, 3, 5):
        for q in (-3, -1, 0, 2, 5, 7):
            assert reidemeister_divisible(Prufer(p), q).number == finite(1)
        assert reidemeister_divisible(Prufer(p), 1).number == ALEPH0
    with pytest.raises(ShapeError):
        reidemeister_divisible(Prufer(3), Fraction(1, 2))
    with pytest.raises(ShapeError):
        reidemeister_divisible(Localized(3), 2)


def test_reduced_lift_pass_through():
    inner = ReidemeisterResult(finite(5), "snf")
    assert reidemeister_reduced_lift(parse_group("Q"), inner).number == finite(5)
    inner = ReidemeisterResult(ALEPH0, "snf")
    assert reidemeister_reduced_lift(parse_group("Prufer(3)"), inner).number == ALEPH0
    inner = ReidemeisterResult(finite(1), "snf")
    assert reidemeister_reduced_lift(parse_group("Q + Prufer(7)"), inner).number == finite(1)
    with pytest.raises(ShapeError):
        reidemeister_reduced_lift(parse_group("Z"), inner)


def test_divisible_split_examples():
    assert divisible_split(parse_group("Q + Z/4")) == (parse_group("Q"), parse_group("Z/4"))
    assert divisible_split(parse_group("Z^2")) == (GroupExpr(()), parse_group("Z^2"))
    assert divisible_split(parse_group("Prufer(5) + Zhat(3)")) == (
        parse_group("Prufer(5)"),
        parse_group("Zhat(3)"),
    )


def test_is_automorphism():
    assert is_automorphism(parse_group("Z^2"), parse_endo("theta:2"))
    assert not is_automorphism(parse_group("Z"), parse_endo("mul:2"))
    assert is_automorphism(parse_group("Z/5"), parse_endo("mul:2"))
    assert is_automorphism(parse_group("Zhat(2)"), parse_endo("mul:2"))
    assert not is_automorphism(parse_group("Zhat(3)"), parse_endo("mul:2"))
    assert is_automorphism(parse_group("Z/2 + Z/4"), IntegerMatrix(((1, 1), (2, 1))))
