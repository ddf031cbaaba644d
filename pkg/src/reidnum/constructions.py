"""Explicit automorphisms with small Reidemeister numbers, each shipped with checked obligations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

import numpy as np
import sympy

from .core import (
    Cardinal,
    Cyclic,
    GroupExpr,
    IntegerMatrix,
    InterleavePhi,
    InterleavePsi,
    Neg,
    Rationals,
    ReducedLift,
    ReidnumError,
    ShapeError,
    Free,
    Theta,
    TruncatedCyclicFamily,
    block_diag,
    cardinal_prod,
    check_relation_preserving,
    finite,
    interleave_phi_matrix,
    interleave_psi_matrix,
    prime_power,
    render_endo,
    theta_matrix,
    valuation,
)
from .engine import atom_index, is_automorphism, reidemeister, reidemeister_divisible
from .oracle import DEFAULT_MAX_ORDER, FiniteGroupTable, image_subgroup, reidemeister_oracle
from .snf import cokernel_cardinal, relation_matrix


@dataclass(frozen=True)
class Obligation:
    statement: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"statement": self.statement, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ConstructionRecipe:
    """An endomorphism of ``group`` together with its claimed R and discharged obligations.

    ``claim_scope`` says what ``claimed_r`` refers to: the finite group itself
    (``"group"``) or the infinite family the finite window belongs to (``"family"``).
    """

    name: str
    parameters: dict
    group: GroupExpr
    endo: object
    claimed_r: Cardinal
    obligations: tuple[Obligation, ...]
    claim_scope: str = "group"
    notes: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(o.passed for o in self.obligations)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "parameters": _stringify(self.parameters),
            "group": self.group.render(),
            "endo": render_endo(self.endo),
            "claimedR": self.claimed_r.to_json(),
            "claimScope": self.claim_scope,
            "obligations": [o.to_json() for o in self.obligations],
            "ok": self.ok,
            "notes": list(self.notes),
        }


def _stringify(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, dict):
        return {k: _stringify(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_stringify(x) for x in v]
    return v


def _ob(statement: str, passed: bool, detail: str = "") -> Obligation:
    return Obligation(statement, bool(passed), detail)


def _matmul(A, B):
    return [[sum(A[i][t] * B[t][j] for t in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _is_identity_mod(P, moduli) -> bool:
    n = len(moduli)
    return all((P[i][j] - (i == j)) % moduli[i] == 0 for i in range(n) for j in range(n))


# ---------------------------------------------------------------------------
# theta_n on A^n
# ---------------------------------------------------------------------------

def theta(n: int) -> ConstructionRecipe:
    """Block-diagonal theta_n in GL(n, Z) with det(theta_n - Id) = 1, so R = 1 on any A^n."""
    if n < 2:
        raise ShapeError("theta needs n >= 2")
    M = theta_matrix(n)
    shifted = sympy.Matrix(M) - sympy.eye(n)
    det_shift = int(shifted.det())
    det = int(sympy.Matrix(M).det())
    coker = cokernel_cardinal([[M[i][j] - (i == j) for j in range(n)] for i in range(n)])
    obligations = (
        _ob("det(theta - Id) = 1", det_shift == 1, f"det = {det_shift}"),
        _ob("theta in GL(n, Z)", abs(det) == 1, f"det(theta) = {det}"),
        _ob("coker(theta - Id) is trivial", coker == finite(1), f"|coker| = {coker}"),
    )
    return ConstructionRecipe("theta", {"n": n}, GroupExpr((Free(n),)), Theta(n), finite(1), obligations)


def pairing_automorphism(n: int) -> ConstructionRecipe:
    """theta_2 on consecutive coordinate pairs of an even-size window of a power A^alpha."""
    if n < 2 or n % 2:
        raise ShapeError("pairing needs an even size >= 2")
    M = block_diag([((1, 1), (-1, 0))] * (n // 2))
    g = GroupExpr((Free(n),))
    r = reidemeister(g, IntegerMatrix(M))
    obligations = (
        _ob("pairs cover the window", len(M) == n),
        _ob("R = 1 on Z^n", r.number == finite(1), str(r.number)),
    )
    return ConstructionRecipe("pairing", {"n": n}, g, IntegerMatrix(M), finite(1), obligations)


# ---------------------------------------------------------------------------
# Interleave maps on prod Z/2^{n_i}
# ---------------------------------------------------------------------------

def _check_exponents(exponents: Sequence[int]) -> tuple[int, ...]:
    exps = tuple(int(e) for e in exponents)
    if not exps:
        raise ShapeError("need at least one exponent")
    if any(e < 1 for e in exps):
        raise ShapeError("exponents must be positive")
    if any(a > b for a, b in zip(exps, exps[1:])):
        raise ShapeError("exponents must be nondecreasing")
    return exps


def _exhaustive_inverse(moduli, A, B) -> bool:
    coords = FiniteGroupTable(moduli).coords()
    mod = np.array(moduli, dtype=np.int64)
    a = np.array(A, dtype=np.int64) % mod[:, None]
    b = np.array(B, dtype=np.int64) % mod[:, None]
    return bool((((coords @ b.T) % mod) @ a.T % mod == coords).all())


def window_surjective(exponents: Sequence[int]) -> bool:
    """phi - Id maps the window of N+1 coordinates onto the window of N coordinates."""
    exps = _check_exponents(exponents)
    n = len(exps)
    big = interleave_phi_matrix(n + 1)
    moduli = [2**e for e in exps]
    rel = relation_matrix(moduli)
    block = [[big[i][j] - (i == j) for j in range(n + 1)] + rel[i] for i in range(n)]
    return cokernel_cardinal(block, (n, n + 1 + n)) == finite(1)


def _interleave(exponents, which: str, exhaustive_bound: int) -> ConstructionRecipe:
    exps = _check_exponents(exponents)
    n = len(exps)
    moduli = tuple(2**e for e in exps)
    phi, psi = interleave_phi_matrix(n), interleave_psi_matrix(n)
    group = GroupExpr((TruncatedCyclicFamily(moduli, "prod"),))
    mine = phi if which == "phi" else psi
    endo = InterleavePhi() if which == "phi" else InterleavePsi()
    try:
        check_relation_preserving(mine, moduli)
        well_defined = True
    except ShapeError:
        well_defined = False
    obligations = [
        _ob("well defined on the truncation", well_defined),
        _ob("phi o psi = Id", _is_identity_mod(_matmul(phi, psi), moduli)),
        _ob("psi o phi = Id", _is_identity_mod(_matmul(psi, phi), moduli)),
    ]
    order = prod(moduli)
    if order <= exhaustive_bound:
        obligations.append(_ob("phi o psi = Id on every element", _exhaustive_inverse(moduli, phi, psi)))
        obligations.append(_ob("psi o phi = Id on every element", _exhaustive_inverse(moduli, psi, phi)))
    notes: tuple[str, ...] = ()
    claimed = finite(1)
    scope = "family"
    if which == "phi":
        obligations.append(_ob("phi - Id maps the (N+1)-window onto the N-window", window_surjective(exps)))
        trunc = reidemeister(group, endo).number
        notes = (
            f"on the {n}-coordinate truncation itself R = {trunc}: "
            "the last row of phi - Id vanishes once later coordinates are read as 0",
        )
    else:
        claimed = reidemeister(group, endo).number
        scope = "group"
    return ConstructionRecipe(
        f"interleave_{which}", {"exponents": list(exps)}, group, endo, claimed,
        tuple(obligations), scope, notes,
    )


def interleave_phi(exponents: Sequence[int], exhaustive_bound: int = 1 << 12) -> ConstructionRecipe:
    return _interleave(exponents, "phi", exhaustive_bound)


def interleave_psi(exponents: Sequence[int], exhaustive_bound: int = 1 << 12) -> ConstructionRecipe:
    return _interleave(exponents, "psi", exhaustive_bound)


# ---------------------------------------------------------------------------
# Direct sums of finite cyclic groups
# ---------------------------------------------------------------------------

def finite_cyclic_assembler(orders: Sequence[int], max_order: int = DEFAULT_MAX_ORDER) -> ConstructionRecipe:
    """An automorphism of a finite sum of cyclic prime-power groups with small R.

    Odd-primary summands get multiplication by 2, each repeated 2-power order
    gets theta on its block, and singleton 2-power orders get the identity.
    """
    odd, twos = [], {}
    for o in orders:
        pp = prime_power(int(o))
        if pp is None:
            raise ShapeError(f"{o} is not a prime power")
        if pp[0] == 2:
            twos.setdefault(pp[1], []).append(o)
        else:
            odd.append(int(o))
    blocks, moduli, residual = [], [], []
    for o in odd:
        blocks.append(((2,),))
        moduli.append(o)
    for e in sorted(twos):
        k = len(twos[e])
        moduli.extend([2**e] * k)
        if k >= 2:
            blocks.append(theta_matrix(k))
        else:
            blocks.append(((1,),))
            residual.append(2**e)
    M = block_diag(blocks) if blocks else ()
    group = GroupExpr(tuple(Cyclic(m) for m in moduli))
    endo = IntegerMatrix(M)
    claimed = finite(prod(residual))
    engine_r = reidemeister(group, endo).number
    obligations = [
        _ob("automorphism", is_automorphism(group, endo)),
        _ob("claimed R is finite", claimed.is_finite),
        _ob("engine R = claimed R", engine_r == claimed, str(engine_r)),
    ]
    if prod(moduli) <= max_order:
        oracle_r = reidemeister_oracle(FiniteGroupTable(tuple(moduli), group), endo, max_order, False).number
        obligations.append(_ob("oracle R = claimed R", oracle_r == claimed, str(oracle_r)))
    params = {"orders": sorted(int(o) for o in orders), "arrangement": moduli}
    return ConstructionRecipe("assembler", params, group, endo, claimed, tuple(obligations))


# ---------------------------------------------------------------------------
# Negation and the divisible lift
# ---------------------------------------------------------------------------

def _index_of_doubles(g: GroupExpr) -> Cardinal:
    """[A : 2A], computed atom by atom without going through R."""
    parts = []
    for atom in g:
        if isinstance(atom, Free):
            parts.append(finite(2**atom.rank))
        elif isinstance(atom, (Cyclic, TruncatedCyclicFamily)):
            moduli = GroupExpr((atom,)).moduli()
            n = len(moduli)
            two = [[2 * (i == j) for j in range(n)] + r for i, r in enumerate(relation_matrix(moduli))]
            parts.append(cokernel_cardinal(two, (n, 2 * n)))
        elif isinstance(atom, Rationals):
            parts.append(finite(1))
        else:
            parts.append(atom_index(atom, Fraction(2)))
    return cardinal_prod(parts)


def negation(g: GroupExpr, max_order: int = DEFAULT_MAX_ORDER) -> ConstructionRecipe:
    """x -> -x with R = [A : 2A]."""
    claimed = _index_of_doubles(g)
    engine_r = reidemeister(g, Neg()).number
    obligations = [_ob("engine R(neg) = [A : 2A]", engine_r == claimed, str(engine_r))]
    if g.is_finite and prod(g.moduli()) <= max_order:
        table = FiniteGroupTable.from_expr(g)
        oracle_r = reidemeister_oracle(table, Neg(), max_order, False).number
        doubles = image_subgroup(table, IntegerMatrix(_scalar_rows(2, len(table.moduli))), max_order)
        obligations.append(_ob("oracle R(neg) = [A : 2A]", oracle_r == claimed, str(oracle_r)))
        obligations.append(
            _ob("R(neg) * |2A| = |A|", claimed.value * doubles.order == table.order,
                f"{claimed.value} * {doubles.order} vs {table.order}")
        )
    return ConstructionRecipe("neg", {"group": g.render()}, g, Neg(), claimed, tuple(obligations))


def _scalar_rows(k: int, n: int):
    return tuple(tuple(k * (i == j) for j in range(n)) for i in range(n))


def reduced_lift(divisible: GroupExpr, inner: ConstructionRecipe) -> ConstructionRecipe:
    """(m, n) -> (-m, inner(n)) on divisible + inner.group, with the same R as inner."""
    for atom in divisible:
        if not atom.divisible:
            raise ShapeError(f"{atom.render()} is not divisible")
    group = GroupExpr(divisible.summands + inner.group.summands)
    endo = ReducedLift(inner.endo)
    lifted = reidemeister(group, endo).number
    base = reidemeister(inner.group, inner.endo).number
    obligations = (
        _ob("inner obligations hold", inner.ok),
        _ob("-1 has R = 1 on the divisible part",
            all(reidemeister_divisible(a, -1).number == finite(1) for a in divisible)),
        _ob("R(lift) = R(inner)", lifted == base, f"{lifted} vs {base}"),
    )
    params = {"divisible": divisible.render(), "inner": inner.name}
    return ConstructionRecipe(
        "lift", params, group, endo, inner.claimed_r, obligations, inner.claim_scope, inner.notes
    )


# ---------------------------------------------------------------------------
# Hom(Z[1/p1], Z[1/p2]) = 0
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomVanishingWitness:
    """candidate / p1**n is not in Z[1/p2], so candidate cannot be the image of 1."""

    p1: int
    p2: int
    candidate: Fraction
    n: int

    @property
    def holds(self) -> bool:
        q = self.candidate / self.p1**self.n
        den = q.denominator
        while den % self.p2 == 0:
            den //= self.p2
        return den != 1


def hom_vanishing_witness(p1: int, p2: int, candidate) -> HomVanishingWitness:
    """Exponent n past which the nonzero candidate stops being divisible by p1**n in Z[1/p2]."""
    if p1 == p2:
        raise ReidnumError("primes must differ")
    candidate = Fraction(candidate)
    if candidate == 0:
        raise ReidnumError("candidate must be nonzero")
    d = candidate.denominator
    while d % p2 == 0:
        d //= p2
    if d != 1:
        raise ReidnumError(f"{candidate} is not an element of Z[1/{p2}]")
    w = HomVanishingWitness(p1, p2, candidate, valuation(candidate.numerator, p1) + 1)
    assert w.holds
    return w


def family_non_isomorphism_witness(primes_a: Sequence[int], primes_b: Sequence[int]):
    """For distinct prime sets, a prime p in one but not the other and the refutation that 1 in Z[1/p] maps anywhere nonzero.

    Returns None when the sets agree.
    """
    a, b = set(primes_a), set(primes_b)
    if a == b:
        return None
    p = min(a ^ b)
    other = sorted(b if p in a else a)
    return p, tuple(hom_vanishing_witness(p, q, 1) for q in other)
