from __future__ import annotations

import random
from fractions import Fraction

import pytest

from reidnum import constructions as C
from reidnum.core import (
    ALEPH0,
    IntegerMatrix,
    ReidnumError,
    ShapeError,
    finite,
    interleave_phi_matrix,
    parse_group,
)
from reidnum.oracle import FiniteGroupTable, reidemeister_oracle


@pytest.mark.parametrize("n", range(2, 17))
def test_theta(n):
    r = C.theta(n)
    assert r.ok and r.claimed_r == finite(1)


@pytest.mark.parametrize("n", [2, 4, 10])
def test_pairing(n):
    assert C.pairing_automorphism(n).ok


def test_pairing_rejects_odd():
    with pytest.raises(ShapeError):
        C.pairing_automorphism(3)


@pytest.mark.parametrize("exps", [(1,), (1, 2), (1, 1, 1), (1, 2, 3), (2, 2, 3, 3), tuple(range(1, 11))])
def test_interleave_pair(exps):
    phi, psi = C.interleave_phi(exps), C.interleave_psi(exps)
    assert phi.ok and psi.ok
    assert phi.claim_scope == "family"
    assert psi.claimed_r.is_finite


def test_interleave_truncation_values():
    # the truncation keeps a fixed last coordinate, so R = 2^{n_N}
    for exps, expected in [((1, 2), 4), ((1, 1, 1), 2), ((1, 2, 3), 8), ((2, 2, 2, 2), 4)]:
        moduli = tuple(2**e for e in exps)
        M = interleave_phi_matrix(len(exps))
        assert reidemeister_oracle(FiniteGroupTable(moduli), M).number == finite(expected)
        assert C.interleave_phi(exps).notes


def test_window_surjective():
    for n in range(1, 9):
        assert C.window_surjective(tuple(range(1, n + 1)))


def test_interleave_rejects_bad_exponents():
    with pytest.raises(ShapeError):
        C.interleave_phi((2, 1))
    with pytest.raises(ShapeError):
        C.interleave_phi(())


@pytest.mark.parametrize(
    "orders, expected",
    [((3, 9, 5), 1), ((4, 4), 1), ((2, 4, 8), 64), ((2, 2, 3), 1), ((8, 8, 8, 27), 1)],
)
def test_assembler_examples(orders, expected):
    rec = C.finite_cyclic_assembler(orders)
    assert rec.ok and rec.claimed_r == finite(expected)


def test_assembler_random():
    rng = random.Random(11)
    pps = [2, 4, 8, 16, 3, 9, 27, 5, 25, 7, 11]
    for _ in range(20):
        orders, total = [], 1
        while True:
            o = rng.choice(pps)
            if total * o > 4096:
                break
            orders.append(o)
            total *= o
        assert C.finite_cyclic_assembler(orders).ok


def test_assembler_rejects_non_prime_power():
    with pytest.raises(ShapeError):
        C.finite_cyclic_assembler((6,))


@pytest.mark.parametrize(
    "group, expected",
    [("Z/4 + Z/3", finite(2)), ("Zhat(2)", finite(1)), ("Z/7", finite(1)), ("Z^2", finite(4)),
     ("Zp(2)", finite(2)), ("Q + Prufer(3)", finite(1)), ("Z/2 + Z/8 + Z/6", finite(8))],
)
def test_negation(group, expected):
    rec = C.negation(parse_group(group))
    assert rec.ok and rec.claimed_r == expected


@pytest.mark.parametrize(
    "div, inner, expected",
    [("Q", C.negation(parse_group("Z/4")), finite(2)),
     ("Prufer(3)", C.theta(2), finite(1))],
)
def test_reduced_lift(div, inner, expected):
    rec = C.reduced_lift(parse_group(div), inner)
    assert rec.ok and rec.claimed_r == expected


def test_reduced_lift_identity_inner():
    inner = C.ConstructionRecipe(
        "id", {}, parse_group("Z"), IntegerMatrix(((1,),)), ALEPH0, ()
    )
    rec = C.reduced_lift(parse_group("Q"), inner)
    assert rec.ok and rec.claimed_r == ALEPH0


def test_reduced_lift_rejects_reduced_part():
    with pytest.raises(ShapeError):
        C.reduced_lift(parse_group("Z"), C.theta(2))


@pytest.mark.parametrize(
    "p1, p2, cand, n",
    [(3, 5, 1, 1), (3, 5, Fraction(9, 5), 3), (2, 7, Fraction(6, 49), 2)],
)
def test_hom_vanishing(p1, p2, cand, n):
    w = C.hom_vanishing_witness(p1, p2, cand)
    assert w.n == n and w.holds


def test_hom_vanishing_errors():
    with pytest.raises(ReidnumError):
        C.hom_vanishing_witness(3, 3, 1)
    with pytest.raises(ReidnumError):
        C.hom_vanishing_witness(3, 5, 0)
    with pytest.raises(ReidnumError):
        C.hom_vanishing_witness(3, 5, Fraction(1, 7))


def test_family_non_isomorphism():
    assert C.family_non_isomorphism_witness([3, 5], [5, 3]) is None
    p, ws = C.family_non_isomorphism_witness([3, 5], [5, 7])
    assert p == 3 and all(w.holds for w in ws)


def test_recipe_json_uses_strings():
    obj = C.theta(3).to_json()
    assert obj["claimedR"] == {"kind": "finite", "value": "1"}
    assert obj["parameters"] == {"n": "3"}
