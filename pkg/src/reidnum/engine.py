"""Closed-form Reidemeister numbers, spectra of Z[1/p], and R-infinity certificates.

The router :func:`reidemeister` dispatches a (group, endomorphism) pair:
finitely generated groups go through the Smith normal form, localizations
and p-adic integers through closed forms, divisible atoms through the
divisible dichotomy, and direct sums through the product rule.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Mapping, Sequence

from sympy import primerange

from .core import (
    ALEPH0,
    FG_ATOMS,
    SCALAR_ENDOS,
    UNCOUNTABLE,
    Cardinal,
    Cyclic,
    FgAbelianGroup,
    Free,
    GroupExpr,
    IntegerMatrix,
    InterleavePhi,
    InterleavePsi,
    Localized,
    LocalizedUnit,
    PadicIntegers,
    PerComponent,
    Prufer,
    Rationals,
    ReducedLift,
    ReidemeisterResult,
    ReidnumError,
    ShapeError,
    Theta,
    at_least,
    cardinal_prod,
    coprime_part,
    divisible_split,
    finite,
    lower_fg,
    scalar_of,
    theta_matrix,
    valuation,
)
from .snf import cokernel_cardinal, cokernel_with_relations, relation_matrix, smith_normal_form

UNCOUNTABLE_PRODUCT = "product-of-localizations-uncountable"


@dataclass(frozen=True)
class LocalizedFamily:
    """Direct sum or product of Z[1/p] over a set of primes.

    ``primes`` lists a finite family; ``infinite=True`` stands for an infinite
    prime set whose members are not enumerated.
    """

    primes: tuple[int, ...] = ()
    mode: str = "sum"
    infinite: bool = False

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(sorted(self.primes)))
        if self.mode not in ("sum", "prod"):
            raise ReidnumError(f"family mode must be 'sum' or 'prod', got {self.mode!r}")
        if len(set(self.primes)) != len(self.primes):
            raise ReidnumError("duplicate primes in family")
        if not self.infinite and not self.primes:
            raise ReidnumError("a finite family needs at least one prime")


# ---------------------------------------------------------------------------
# Finitely generated groups
# ---------------------------------------------------------------------------

def reidemeister_fg(g, M) -> ReidemeisterResult:
    """R(M) on an fg group given canonically (FgAbelianGroup) or as a cyclic presentation."""
    moduli = g.moduli() if isinstance(g, FgAbelianGroup) else tuple(g)
    rows = M.rows if isinstance(M, IntegerMatrix) else tuple(tuple(int(x) for x in r) for r in M)
    n = len(moduli)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ShapeError(f"expected a {n}x{n} matrix")
    rel = relation_matrix(moduli)
    k = sum(1 for m in moduli if m)
    return ReidemeisterResult(cokernel_with_relations(rows, rel, k), "snf")


# ---------------------------------------------------------------------------
# Localizations Z[1/p]
# ---------------------------------------------------------------------------

def _as_unit(u) -> LocalizedUnit:
    return u if isinstance(u, LocalizedUnit) else LocalizedUnit.from_rational(u)


def reidemeister_localized(p: int, u) -> ReidemeisterResult:
    """R of multiplication by a unit +-p^m of Z[1/p]."""
    u = _as_unit(u)
    if not u.is_unit_of({p}):
        raise ShapeError(f"{u} is not a unit of Z[1/{p}]")
    d = u.value - 1
    if d == 0:
        return ReidemeisterResult(ALEPH0, "closed-form")
    return ReidemeisterResult(finite(coprime_part(d.numerator, p)), "closed-form")


def index_localized(p: int, m: int) -> Cardinal:
    """[Z[1/p] : m Z[1/p]]."""
    if m < 2:
        raise ValueError("index_localized needs m >= 2")
    return finite(coprime_part(m, p))


def in_localized_multiple(x: Fraction, m: int, p: int) -> bool:
    """Whether x lies in m Z[1/p], i.e. x/m has a p-power denominator."""
    den = (Fraction(x) / m).denominator
    while den % p == 0:
        den //= p
    return den == 1


@dataclass(frozen=True)
class SpectrumReport:
    p: int
    m_max: int
    values: tuple[Cardinal, ...]
    witnesses: Mapping[Cardinal, tuple[LocalizedUnit, ...]]
    includes_infinity: bool

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "mmax": str(self.m_max),
            "values": [v.to_json() for v in self.values],
            "witnesses": [
                {"value": v.to_json(), "units": [str(u) for u in self.witnesses[v]]}
                for v in self.values
            ],
            "includesInfinity": self.includes_infinity,
        }


def spectrum_localized(p: int, m_max: int) -> SpectrumReport:
    """R over all units +-p^m of Z[1/p] with |m| <= m_max."""
    if m_max < 1:
        raise ValueError("m_max must be positive")
    witnesses: dict[Cardinal, list[LocalizedUnit]] = {}
    for m in range(-m_max, m_max + 1):
        for sign in (1, -1):
            u = LocalizedUnit.power(p, m, sign)
            witnesses.setdefault(reidemeister_localized(p, u).number, []).append(u)
    values = tuple(sorted(witnesses, key=Cardinal.sort_key))
    identity = LocalizedUnit.power(p, 0)
    return SpectrumReport(
        p,
        m_max,
        values,
        {v: tuple(ws) for v, ws in witnesses.items()},
        includes_infinity=any(identity in ws for ws in witnesses.values()),
    )


def reidemeister_sum_localized(
    entries: Sequence[tuple[int, object]],
    default_is_identity: bool = True,
    family_is_infinite: bool = False,
) -> ReidemeisterResult:
    """R of a componentwise automorphism of a direct sum of Z[1/p] over distinct primes.

    Maps between Z[1/p] and Z[1/q] for p != q are zero, so every automorphism
    is componentwise and the product rule applies.  For an infinite family the
    listed entries are the exceptions to the default component.
    """
    primes = [p for p, _ in entries]
    if len(set(primes)) != len(primes):
        raise ReidnumError("duplicate primes in family")
    parts = [reidemeister_localized(p, u) for p, u in entries]
    if family_is_infinite:
        why = (
            "identity components have R = aleph0"
            if default_is_identity
            else "infinitely many odd-prime components each have R >= 2"
        )
        return ReidemeisterResult(ALEPH0, "product-rule", notes=(f"infinite family: {why}",))
    return ReidemeisterResult(cardinal_prod(r.number for r in parts), "product-rule")


def r_lower_bound_truncated(units: Mapping[int, object] | Iterable[tuple[int, object]], prime_bound: int) -> Cardinal:
    """Certified lower bound for R of any extension of the given units to all primes.

    Each odd prime p <= prime_bound contributes max(2, R(u_p)); missing primes
    default to the identity, which contributes 2.
    """
    units = dict(units)
    bound = 1
    for p in primerange(3, prime_bound + 1):
        r = reidemeister_localized(p, units.get(p, 1)).number
        bound *= max(2, r.value) if r.is_finite else 2
    return at_least(bound)


def reidemeister_product_localized_symbolic(family_is_infinite: bool, mode: str = "prod") -> ReidemeisterResult:
    """Uncountably many classes for every automorphism of an infinite product of Z[1/p].

    Cited, not computed.
    """
    if mode != "prod":
        raise ReidnumError("the symbolic path is for products; use reidemeister_sum_localized for sums")
    if not family_is_infinite:
        raise ReidnumError("finite families are handled by the product rule")
    return ReidemeisterResult(UNCOUNTABLE, "cited-symbolic", cites=UNCOUNTABLE_PRODUCT)


def reidemeister_family(family: LocalizedFamily, units: Mapping[int, object] | None = None) -> ReidemeisterResult:
    """R for an automorphism of a localized family given by its non-identity components."""
    units = dict(units or {})
    if not family.infinite:
        extra = set(units) - set(family.primes)
        if extra:
            raise ShapeError(f"units given for primes {sorted(extra)} outside the family")
        return reidemeister_sum_localized([(p, units.get(p, 1)) for p in family.primes])
    if family.mode == "prod":
        return reidemeister_product_localized_symbolic(True, "prod")
    return reidemeister_sum_localized(sorted(units.items()), True, True)


# ---------------------------------------------------------------------------
# p-adic integers and divisible atoms
# ---------------------------------------------------------------------------

def reidemeister_padic(p: int, u, k: int) -> ReidemeisterResult:
    """R of multiplication by a p-adic unit u known modulo p^k."""
    if k < 1:
        raise ValueError("precision must be at least 1")
    u = Fraction(u)
    if u.denominator % p == 0 or u.numerator % p == 0:
        raise ShapeError(f"{u} is not a unit of Z_{p}")
    if u == 1:
        # Id - phi = 0, so the classes are the elements of Z_p
        return ReidemeisterResult(UNCOUNTABLE, "closed-form")
    pk = p**k
    residue = (u.numerator * pow(u.denominator, -1, pk) - 1) % pk
    if residue == 0:
        return ReidemeisterResult(
            at_least(pk),
            "lower-bound",
            notes=(f"u = 1 mod {p}^{k}; v_{p}(u - 1) is not resolved at this precision",),
        )
    return ReidemeisterResult(finite(p ** valuation(residue, p)), "closed-form")


def _admissible_divisible(atom, q: Fraction) -> None:
    if isinstance(atom, Rationals):
        if q == 0:
            raise ShapeError("zero is not admissible on Q here")
    elif isinstance(atom, Prufer):
        if q.denominator != 1:
            raise ShapeError(f"only integer scalars are admissible on Prufer({atom.p})")
    else:
        raise ShapeError(f"{atom.render()} is not divisible")


def reidemeister_divisible(atom, q) -> ReidemeisterResult:
    """R of multiplication by q on Q^a or a Prufer group: 1 or aleph0, nothing else."""
    q = scalar_of(q) if isinstance(q, SCALAR_ENDOS) else Fraction(q)
    _admissible_divisible(atom, q)
    # nonzero multiples of a divisible group are the whole group
    number = ALEPH0 if q == 1 else finite(1)
    assert number in (finite(1), ALEPH0)
    return ReidemeisterResult(number, "closed-form")


def reidemeister_reduced_lift(divisible_part: GroupExpr, inner: ReidemeisterResult) -> ReidemeisterResult:
    """R of (m, n) -> (-m, phi(n)) on M + N equals R(phi) since 2M = M."""
    for atom in divisible_part:
        if not atom.divisible:
            raise ShapeError(f"{atom.render()} is not divisible")
        if reidemeister_divisible(atom, -1).number != finite(1):
            raise AssertionError("negation on a divisible atom must have R = 1")
    if not divisible_part.summands:
        return inner
    note = f"lifted through divisible part {divisible_part.render()} by (m, n) -> (-m, phi(n))"
    return replace(inner, notes=inner.notes + (note,))


# ---------------------------------------------------------------------------
# Index of d A in A for a single rank-one atom
# ---------------------------------------------------------------------------

def atom_index(atom, d: Fraction) -> Cardinal:
    """[A : dA] for a rank-one atom A and a scalar d acting on it."""
    d = Fraction(d)
    if isinstance(atom, Free):
        if d.denominator != 1:
            raise ShapeError(f"{d} does not act on Z")
        return ALEPH0 if d == 0 else finite(abs(d.numerator))
    if isinstance(atom, Cyclic):
        return finite(gcd(int(d), atom.n))
    if isinstance(atom, Localized):
        if coprime_part(d.denominator, atom.p) != 1:
            raise ShapeError(f"{d} does not act on Z[1/{atom.p}]")
        return ALEPH0 if d == 0 else finite(coprime_part(d.numerator, atom.p))
    if isinstance(atom, PadicIntegers):
        if d.denominator % atom.p == 0:
            raise ShapeError(f"{d} does not act on Z_{atom.p}")
        return UNCOUNTABLE if d == 0 else finite(atom.p ** valuation(d.numerator, atom.p))
    if isinstance(atom, (Rationals, Prufer)):
        if isinstance(atom, Prufer) and d.denominator != 1:
            raise ShapeError(f"{d} is not admissible on Prufer({atom.p})")
        return ALEPH0 if d == 0 else finite(1)
    raise ShapeError(f"no rank-one index for {atom!r}")


# ---------------------------------------------------------------------------
# Router
# ---------------------------------------------------------------------------

def _combine(results: list[ReidemeisterResult]) -> ReidemeisterResult:
    if len(results) == 1:
        return results[0]
    number = cardinal_prod(r.number for r in results)
    notes = tuple(n for r in results for n in r.notes)
    if any(r.certificate == "cited-symbolic" for r in results):
        raise ReidnumError("cannot combine a cited result with computed ones")
    cert = "lower-bound" if number.kind == "atLeast" else "product-rule"
    return ReidemeisterResult(number, cert, notes=notes)


def _scalar_on_atom(atom, q: Fraction) -> ReidemeisterResult:
    if isinstance(atom, Localized):
        p = atom.p
        if coprime_part(q.denominator, p) != 1:
            raise ShapeError(f"{q} does not act on Z[1/{p}]")
        if q != 0 and coprime_part(q.numerator, p) == 1:
            return reidemeister_localized(p, q)
        return ReidemeisterResult(atom_index(atom, q - 1), "closed-form")
    if isinstance(atom, PadicIntegers):
        p = atom.p
        if q.denominator % p == 0:
            raise ShapeError(f"{q} does not act on Z_{p}")
        if q.numerator % p:
            k = 1 if q == 1 else valuation((q - 1).numerator, p) + 1
            return reidemeister_padic(p, q, k)
        return ReidemeisterResult(atom_index(atom, q - 1), "closed-form")
    if isinstance(atom, (Rationals, Prufer)):
        return reidemeister_divisible(atom, q)
    raise ShapeError(f"unsupported atom {atom!r}")


def _slot_atoms(group: GroupExpr) -> list:
    slots = []
    for atom in group:
        if isinstance(atom, Rationals):
            slots.extend([Rationals(1)] * atom.rank)
        else:
            slots.append(atom)
    return slots


def _homogeneous_matrix(group: GroupExpr, endo) -> tuple[object, tuple[tuple[int, ...], ...]]:
    slots = _slot_atoms(group)
    if len(set(slots)) != 1:
        raise ShapeError("matrix maps need a finitely generated group or a power A^n of one atom")
    n = len(slots)
    if isinstance(endo, IntegerMatrix):
        if endo.dim != n:
            raise ShapeError(f"matrix is {endo.dim}x{endo.dim} but the group has {n} generators")
        return slots[0], endo.rows
    if isinstance(endo, Theta):
        if endo.n != n:
            raise ShapeError(f"theta:{endo.n} on a group with {n} generators")
        return slots[0], theta_matrix(n)
    if isinstance(endo, (InterleavePhi, InterleavePsi)):
        raise ShapeError("interleave maps act on 2-power cyclic groups only")
    raise ShapeError(f"unsupported endomorphism {endo!r}")


def reidemeister(group: GroupExpr, endo) -> ReidemeisterResult:
    """Exact Reidemeister number of ``endo`` on ``group``."""
    if not group.summands:
        return ReidemeisterResult(finite(1), "closed-form")
    if group.is_finitely_generated:
        moduli, M = lower_fg(group, endo)
        return reidemeister_fg(moduli, M)
    if isinstance(endo, ReducedLift):
        div, red = divisible_split(group)
        return reidemeister_reduced_lift(div, reidemeister(red, endo.inner))
    if isinstance(endo, PerComponent):
        if len(endo.parts) != len(group.summands):
            raise ShapeError(
                f"diag has {len(endo.parts)} parts but the group has {len(group.summands)} summands"
            )
        return _combine([reidemeister(GroupExpr((a,)), e) for a, e in zip(group, endo.parts)])
    if isinstance(endo, SCALAR_ENDOS):
        q = scalar_of(endo)
        fg = [a for a in group if isinstance(a, FG_ATOMS)]
        results = [reidemeister(GroupExpr(tuple(fg)), endo)] if fg else []
        results += [_scalar_on_atom(a, q) for a in group if not isinstance(a, FG_ATOMS)]
        return _combine(results)
    atom, M = _homogeneous_matrix(group, endo)
    n = len(M)
    snf = smith_normal_form([[M[i][j] - (i == j) for j in range(n)] for i in range(n)])
    return ReidemeisterResult(cardinal_prod(atom_index(atom, d) for d in snf.divisors), "snf")


def is_automorphism(group: GroupExpr, endo) -> bool:
    if not group.summands:
        return True
    if group.is_finitely_generated:
        moduli, M = lower_fg(group, endo)
        rel = relation_matrix(moduli)
        n = len(moduli)
        k = sum(1 for m in moduli if m)
        block = [list(M[i]) + rel[i] for i in range(n)]
        # fg abelian groups are Hopfian: onto implies one-to-one
        return cokernel_cardinal(block, (n, n + k)) == finite(1)
    if isinstance(endo, ReducedLift):
        return is_automorphism(divisible_split(group)[1], endo.inner)
    if isinstance(endo, PerComponent):
        if len(endo.parts) != len(group.summands):
            raise ShapeError("diag length does not match the group")
        return all(is_automorphism(GroupExpr((a,)), e) for a, e in zip(group, endo.parts))
    if isinstance(endo, SCALAR_ENDOS):
        q = scalar_of(endo)
        fg = [a for a in group if isinstance(a, FG_ATOMS)]
        if fg and not is_automorphism(GroupExpr(tuple(fg)), endo):
            return False
        return all(_scalar_is_unit(a, q) for a in group if not isinstance(a, FG_ATOMS))
    atom, M = _homogeneous_matrix(group, endo)
    det = prod(smith_normal_form(M).divisors)
    return _scalar_is_unit(atom, Fraction(det)) if det else False


def _scalar_is_unit(atom, q: Fraction) -> bool:
    if q == 0:
        return False
    if isinstance(atom, Localized):
        return coprime_part(q.numerator, atom.p) == 1 and coprime_part(q.denominator, atom.p) == 1
    if isinstance(atom, PadicIntegers):
        return q.numerator % atom.p != 0 and q.denominator % atom.p != 0
    if isinstance(atom, Prufer):
        return q.denominator == 1 and q.numerator % atom.p != 0
    return True  # Rationals
