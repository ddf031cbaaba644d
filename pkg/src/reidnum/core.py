"""Data model: cardinals, abelian group expressions, endomorphism descriptors.

Everything here is an immutable value.  Group expressions are built from a
small set of rank-one atoms; endomorphisms are shape-tagged descriptors that
only acquire meaning once they are paired with a group (see :func:`lower_fg`
and the engine router).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence, Union

from sympy import factorint, isprime


class ReidnumError(ValueError):
    """Base class for all library errors."""


class ParseError(ReidnumError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text = text
        self.position = position
        where = f" at position {position}" if text else ""
        super().__init__(f"{message}{where}")


class GroupError(ReidnumError):
    """A group expression violates a structural invariant."""


class ShapeError(ReidnumError):
    """An endomorphism descriptor does not fit the target group."""


class InfeasibleError(ReidnumError):
    """The request cannot be answered by enumeration (infinite or too large)."""


# ---------------------------------------------------------------------------
# Cardinals
# ---------------------------------------------------------------------------

FINITE = "finite"
ALEPH0_KIND = "aleph0"
UNCOUNTABLE_KIND = "uncountable"
AT_LEAST = "atLeast"

_KIND_RANK = {FINITE: 0, AT_LEAST: 1, ALEPH0_KIND: 2, UNCOUNTABLE_KIND: 3}


@dataclass(frozen=True)
class Cardinal:
    """A Reidemeister number: exact finite, aleph_0, uncountable, or a lower bound.

    ``atLeast`` only ever comes out of truncated certificates.
    """

    kind: str
    value: int | None = None

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown cardinal kind {self.kind!r}")
        if self.kind in (FINITE, AT_LEAST):
            if not isinstance(self.value, int) or self.value < 1:
                raise ValueError(f"{self.kind} cardinal needs a positive integer, got {self.value!r}")
        elif self.value is not None:
            raise ValueError(f"{self.kind} cardinal carries no value")

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def is_infinite(self) -> bool:
        return self.kind in (ALEPH0_KIND, UNCOUNTABLE_KIND)

    def sort_key(self):
        return (_KIND_RANK[self.kind], self.value or 0)

    def to_json(self) -> dict:
        if self.value is None:
            return {"kind": self.kind}
        return {"kind": self.kind, "value": str(self.value)}

    @classmethod
    def from_json(cls, obj: dict) -> Cardinal:
        kind = obj["kind"]
        if kind in (FINITE, AT_LEAST):
            return cls(kind, int(obj["value"]))
        return cls(kind)

    def __str__(self) -> str:
        if self.kind == FINITE:
            return str(self.value)
        if self.kind == AT_LEAST:
            return f">={self.value}"
        return self.kind


def finite(n: int) -> Cardinal:
    return Cardinal(FINITE, int(n))


def at_least(n: int) -> Cardinal:
    return Cardinal(AT_LEAST, int(n))


ALEPH0 = Cardinal(ALEPH0_KIND)
UNCOUNTABLE = Cardinal(UNCOUNTABLE_KIND)


def cardinal_mul(a: Cardinal, b: Cardinal) -> Cardinal:
    """Cardinal product as used by the product rule R(f + g) = R(f) R(g)."""
    top = max(a.kind, b.kind, key=_KIND_RANK.__getitem__)
    if top in (ALEPH0_KIND, UNCOUNTABLE_KIND):
        return Cardinal(top)
    return Cardinal(top, a.value * b.value)


def cardinal_prod(items: Iterable[Cardinal]) -> Cardinal:
    out = finite(1)
    for c in items:
        out = cardinal_mul(out, c)
    return out


# ---------------------------------------------------------------------------
# Number-theoretic helpers
# ---------------------------------------------------------------------------

def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def coprime_part(n: int, p: int) -> int:
    """|n| with every factor p removed."""
    n = abs(n)
    if n == 0:
        raise ValueError("coprime part of zero is undefined")
    while n % p == 0:
        n //= p
    return n


def prime_power(n: int) -> tuple[int, int] | None:
    """(p, e) if n = p**e with e >= 1, else None."""
    if n < 2:
        return None
    f = factorint(n)
    if len(f) != 1:
        return None
    ((p, e),) = f.items()
    return p, e


def _require_prime(p: int, what: str) -> None:
    if not isinstance(p, int) or not isprime(p):
        raise GroupError(f"{what} needs a prime, got {p!r}")


# ---------------------------------------------------------------------------
# Group atoms and expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Free:
    rank: int = 1
    divisible = False

    def __post_init__(self):
        if self.rank < 1:
            raise GroupError("free rank must be at least 1")

    def render(self) -> str:
        return "Z" if self.rank == 1 else f"Z^{self.rank}"


@dataclass(frozen=True)
class Cyclic:
    n: int
    divisible = False

    def __post_init__(self):
        if self.n < 2:
            raise GroupError("cyclic order must be at least 2")

    def render(self) -> str:
        return f"Z/{self.n}"


@dataclass(frozen=True)
class Localized:
    """Z[1/p]: rationals whose denominator is a power of ``p``."""

    p: int
    divisible = False

    def __post_init__(self):
        _require_prime(self.p, "Zhat")

    @property
    def invertible_primes(self) -> frozenset[int]:
        return frozenset({self.p})

    def render(self) -> str:
        return f"Zhat({self.p})"


@dataclass(frozen=True)
class PadicIntegers:
    p: int
    divisible = False

    def __post_init__(self):
        _require_prime(self.p, "Zp")

    def render(self) -> str:
        return f"Zp({self.p})"


@dataclass(frozen=True)
class Prufer:
    p: int
    divisible = True

    def __post_init__(self):
        _require_prime(self.p, "Prufer")

    def render(self) -> str:
        return f"Prufer({self.p})"


@dataclass(frozen=True)
class Rationals:
    rank: int = 1
    divisible = True

    def __post_init__(self):
        if self.rank < 1:
            raise GroupError("rational rank must be at least 1")

    def render(self) -> str:
        return "Q" if self.rank == 1 else f"Q^{self.rank}"


@dataclass(frozen=True)
class TruncatedCyclicFamily:
    """A finite window of a direct sum/product of cyclic prime-power groups."""

    orders: tuple[int, ...]
    mode: str = "sum"
    divisible = False

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(o) for o in self.orders))
        if self.mode not in ("sum", "prod"):
            raise GroupError(f"family mode must be 'sum' or 'prod', got {self.mode!r}")
        if not self.orders:
            raise GroupError("family needs at least one order")
        for o in self.orders:
            if prime_power(o) is None:
                raise GroupError(f"family order {o} is not a prime power")
        if any(a > b for a, b in zip(self.orders, self.orders[1:])):
            raise GroupError("family orders must be nondecreasing")

    def render(self) -> str:
        return f"Fam({self.mode};{','.join(map(str, self.orders))})"


Atom = Union[Free, Cyclic, Localized, PadicIntegers, Prufer, Rationals, TruncatedCyclicFamily]
FG_ATOMS = (Free, Cyclic, TruncatedCyclicFamily)


def atom_dimension(atom: Atom) -> int:
    if isinstance(atom, (Free, Rationals)):
        return atom.rank
    if isinstance(atom, TruncatedCyclicFamily):
        return len(atom.orders)
    return 1


@dataclass(frozen=True)
class GroupExpr:
    summands: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        seen = set()
        for atom in self.summands:
            if isinstance(atom, Localized):
                if atom.p in seen:
                    raise GroupError(f"duplicate localized prime {atom.p}")
                seen.add(atom.p)

    def __iter__(self):
        return iter(self.summands)

    def __len__(self):
        return len(self.summands)

    def render(self) -> str:
        if not self.summands:
            return "0"
        return " + ".join(a.render() for a in self.summands)

    __str__ = render

    @property
    def dimension(self) -> int:
        return sum(atom_dimension(a) for a in self.summands)

    @property
    def is_finitely_generated(self) -> bool:
        return all(isinstance(a, FG_ATOMS) for a in self.summands)

    @property
    def is_finite(self) -> bool:
        return all(isinstance(a, (Cyclic, TruncatedCyclicFamily)) for a in self.summands)

    def moduli(self) -> tuple[int, ...]:
        """Cyclic presentation of a finitely generated expression, 0 marking a free generator."""
        if not self.is_finitely_generated:
            raise ShapeError(f"{self.render()} is not finitely generated")
        out: list[int] = []
        for a in self.summands:
            if isinstance(a, Free):
                out.extend([0] * a.rank)
            elif isinstance(a, Cyclic):
                out.append(a.n)
            else:
                out.extend(a.orders)
        return tuple(out)


def divisible_split(g: GroupExpr) -> tuple[GroupExpr, GroupExpr]:
    div = [a for a in g.summands if a.divisible]
    red = [a for a in g.summands if not a.divisible]
    return GroupExpr(tuple(div)), GroupExpr(tuple(red))


# ---------------------------------------------------------------------------
# Group grammar
# ---------------------------------------------------------------------------

_TERM_PATTERNS = [
    (re.compile(r"Z/(\d+)"), lambda m: Cyclic(int(m[1]))),
    (re.compile(r"Zhat\(\s*(\d+)\s*\)"), lambda m: Localized(int(m[1]))),
    (re.compile(r"Zp\(\s*(\d+)\s*\)"), lambda m: PadicIntegers(int(m[1]))),
    (re.compile(r"Prufer\(\s*(\d+)\s*\)"), lambda m: Prufer(int(m[1]))),
    (
        re.compile(r"Fam\(\s*(sum|prod)\s*;\s*(\d+(?:\s*,\s*\d+)*)\s*\)"),
        lambda m: TruncatedCyclicFamily(tuple(int(x) for x in m[2].split(",")), m[1]),
    ),
    (re.compile(r"Z(?:\^(\d+))?"), lambda m: Free(int(m[1]) if m[1] else 1)),
    (re.compile(r"Q(?:\^(\d+))?"), lambda m: Rationals(int(m[1]) if m[1] else 1)),
]
_WS = re.compile(r"\s*")


def parse_group(text: str) -> GroupExpr:
    """Parse the ASCII group grammar, e.g. ``"Z^2 + Z/4 + Zhat(3)"``."""
    if text.strip() == "0":
        return GroupExpr(())
    pos = _WS.match(text, 0).end()
    atoms = []
    while True:
        for pattern, build in _TERM_PATTERNS:
            m = pattern.match(text, pos)
            if m:
                try:
                    atoms.append(build(m))
                except GroupError as exc:
                    raise GroupError(f"{exc} (term at position {pos})") from None
                pos = _WS.match(text, m.end()).end()
                break
        else:
            raise ParseError("expected a group term", text, pos)
        if pos == len(text):
            break
        if text[pos] != "+":
            raise ParseError("expected '+'", text, pos)
        pos = _WS.match(text, pos + 1).end()
    return GroupExpr(tuple(atoms))


# ---------------------------------------------------------------------------
# Finitely generated groups in canonical form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^rank + Z/d1 + ... + Z/dk with d1 | d2 | ... | dk, each di >= 2."""

    rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", tuple(int(d) for d in self.invariant_factors))
        if self.rank < 0:
            raise GroupError("rank must be nonnegative")
        ds = self.invariant_factors
        if any(d < 2 for d in ds):
            raise GroupError("invariant factors must be at least 2")
        if any(b % a for a, b in zip(ds, ds[1:])):
            raise GroupError(f"invariant factors {ds} do not form a divisibility chain")

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def order(self) -> int:
        if self.rank:
            raise InfeasibleError("group has a free part")
        return prod(self.invariant_factors)

    def moduli(self) -> tuple[int, ...]:
        return (0,) * self.rank + self.invariant_factors

    def to_expr(self) -> GroupExpr:
        atoms: list = [Free(self.rank)] if self.rank else []
        atoms.extend(Cyclic(d) for d in self.invariant_factors)
        return GroupExpr(tuple(atoms))

    def __str__(self) -> str:
        return self.to_expr().render()


def _invariant_from_elementary(powers: dict[int, list[int]]) -> tuple[int, ...]:
    """Regroup prime powers {p: [e, ...]} into an invariant-factor chain."""
    cols = max((len(es) for es in powers.values()), default=0)
    factors = [1] * cols
    for p, es in powers.items():
        for i, e in enumerate(sorted(es, reverse=True)):
            factors[cols - 1 - i] *= p**e
    return tuple(factors)


def _elementary(orders: Iterable[int]) -> dict[int, list[int]]:
    powers: dict[int, list[int]] = {}
    for n in orders:
        for p, e in factorint(n).items():
            powers.setdefault(p, []).append(e)
    return powers


def normalize_fg(rank: int, torsion_orders: Sequence[int]) -> FgAbelianGroup:
    if any(n < 2 for n in torsion_orders):
        raise GroupError("torsion orders must be at least 2")
    return FgAbelianGroup(rank, _invariant_from_elementary(_elementary(torsion_orders)))


def primary_decomposition(g: FgAbelianGroup) -> dict[int, FgAbelianGroup]:
    if g.rank:
        raise GroupError("primary decomposition needs a finite group")
    return {
        p: FgAbelianGroup(0, tuple(sorted(p**e for e in es)))
        for p, es in sorted(_elementary(g.invariant_factors).items())
    }


# ---------------------------------------------------------------------------
# Units of localizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalizedUnit:
    """sign * prod(q**e) over a finite set of primes q."""

    sign: int = 1
    exponents: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        exps = tuple(sorted((int(q), int(e)) for q, e in dict(self.exponents).items() if e != 0))
        for q, _ in exps:
            if not isprime(q):
                raise ValueError(f"{q} is not prime")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def from_rational(cls, x) -> LocalizedUnit:
        x = Fraction(x)
        if x == 0:
            raise ValueError("zero is not a unit")
        exps = dict(factorint(abs(x.numerator)))
        for q, e in factorint(x.denominator).items():
            exps[q] = exps.get(q, 0) - e
        return cls(1 if x > 0 else -1, tuple(exps.items()))

    @classmethod
    def power(cls, p: int, m: int, sign: int = 1) -> LocalizedUnit:
        return cls(sign, ((p, m),))

    @property
    def value(self) -> Fraction:
        v = Fraction(self.sign)
        for q, e in self.exponents:
            v *= Fraction(q) ** e
        return v

    @property
    def primes(self) -> frozenset[int]:
        return frozenset(q for q, _ in self.exponents)

    def is_unit_of(self, invertible: Iterable[int]) -> bool:
        return self.primes <= frozenset(invertible)

    def exponent(self, p: int) -> int:
        return dict(self.exponents).get(p, 0)

    def __str__(self) -> str:
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# Endomorphism descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegerMatrix:
    """Acts on column vectors: column j is the image of generator j."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ShapeError("endomorphism matrix must be square")
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Unit:
    unit: LocalizedUnit

    def __post_init__(self):
        if not isinstance(self.unit, LocalizedUnit):
            object.__setattr__(self, "unit", LocalizedUnit.from_rational(self.unit))


@dataclass(frozen=True)
class ScalarMul:
    k: int


@dataclass(frozen=True)
class PerComponent:
    parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Neg:
    pass


@dataclass(frozen=True)
class Mul2:
    pass


@dataclass(frozen=True)
class Theta:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ShapeError("theta needs n >= 2")


@dataclass(frozen=True)
class InterleavePhi:
    pass


@dataclass(frozen=True)
class InterleavePsi:
    pass


@dataclass(frozen=True)
class ReducedLift:
    inner: object


Endomorphism = Union[
    IntegerMatrix, Unit, ScalarMul, PerComponent, Neg, Mul2, Theta,
    InterleavePhi, InterleavePsi, ReducedLift,
]

SCALAR_ENDOS = (ScalarMul, Neg, Mul2, Unit)


def scalar_of(endo) -> Fraction:
    """The rational scalar behind a scalar-type descriptor."""
    if isinstance(endo, ScalarMul):
        return Fraction(endo.k)
    if isinstance(endo, Neg):
        return Fraction(-1)
    if isinstance(endo, Mul2):
        return Fraction(2)
    if isinstance(endo, Unit):
        return endo.unit.value
    raise TypeError(f"{endo!r} is not a scalar map")


def render_endo(endo) -> str:
    if isinstance(endo, IntegerMatrix):
        return "matrix:" + json.dumps([list(r) for r in endo.rows], separators=(",", ":"))
    if isinstance(endo, Unit):
        return f"unit:{endo.unit}"
    if isinstance(endo, ScalarMul):
        return f"mul:{endo.k}"
    if isinstance(endo, Neg):
        return "neg"
    if isinstance(endo, Mul2):
        return "mul:2"
    if isinstance(endo, Theta):
        return f"theta:{endo.n}"
    if isinstance(endo, InterleavePhi):
        return "iphi"
    if isinstance(endo, InterleavePsi):
        return "ipsi"
    if isinstance(endo, PerComponent):
        return "diag:[" + ",".join(render_endo(e) for e in endo.parts) + "]"
    if isinstance(endo, ReducedLift):
        return f"lift:({render_endo(endo.inner)})"
    raise TypeError(f"not an endomorphism descriptor: {endo!r}")


_INT = re.compile(r"[+-]?\d+")
_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?")


def _balanced_end(text: str, pos: int) -> int:
    if pos >= len(text) or text[pos] != "[":
        raise ParseError("expected '['", text, pos)
    depth = 0
    for i in range(pos, len(text)):
        if text[i] == "[":
            depth += 1
        elif text[i] == "]":
            depth -= 1
            if depth == 0:
                return i + 1
    raise ParseError("unbalanced '['", text, pos)


def _parse_endo_at(text: str, pos: int):
    def expect(lit: str, at: int) -> int:
        if not text.startswith(lit, at):
            raise ParseError(f"expected {lit!r}", text, at)
        return at + len(lit)

    if text.startswith("matrix:", pos):
        start = pos + len("matrix:")
        end = _balanced_end(text, start)
        try:
            rows = json.loads(text[start:end])
        except json.JSONDecodeError:
            raise ParseError("malformed matrix JSON", text, start) from None
        if not isinstance(rows, list) or not all(
            isinstance(r, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in r)
            for r in rows
        ):
            raise ParseError("matrix must be a 2-D integer array", text, start)
        return IntegerMatrix(tuple(tuple(r) for r in rows)), end
    if text.startswith("unit:", pos):
        m = _RATIONAL.match(text, pos + 5)
        if not m:
            raise ParseError("expected a signed rational", text, pos + 5)
        value = Fraction(m[0])
        if value == 0:
            raise ParseError("zero is not a unit", text, pos + 5)
        return Unit(LocalizedUnit.from_rational(value)), m.end()
    if text.startswith("mul:", pos):
        m = _INT.match(text, pos + 4)
        if not m:
            raise ParseError("expected an integer", text, pos + 4)
        return ScalarMul(int(m[0])), m.end()
    if text.startswith("theta:", pos):
        m = re.compile(r"\d+").match(text, pos + 6)
        if not m:
            raise ParseError("expected a dimension", text, pos + 6)
        return Theta(int(m[0])), m.end()
    if text.startswith("diag:[", pos):
        parts = []
        at = pos + len("diag:[")
        while True:
            part, at = _parse_endo_at(text, at)
            parts.append(part)
            if text.startswith(",", at):
                at += 1
                continue
            at = expect("]", at)
            return PerComponent(tuple(parts)), at
    if text.startswith("lift:(", pos):
        inner, at = _parse_endo_at(text, pos + len("lift:("))
        return ReducedLift(inner), expect(")", at)
    for word, cls in (("neg", Neg), ("iphi", InterleavePhi), ("ipsi", InterleavePsi)):
        if text.startswith(word, pos):
            return cls(), pos + len(word)
    raise ParseError("unknown endomorphism", text, pos)


def parse_endo(text: str):
    """Parse an endomorphism descriptor, e.g. ``"diag:[neg,theta:2]"``."""
    text = text.strip()
    endo, end = _parse_endo_at(text, 0)
    if end != len(text):
        raise ParseError("trailing input", text, end)
    return endo


# ---------------------------------------------------------------------------
# Named integer matrices
# ---------------------------------------------------------------------------

THETA2 = ((1, 1), (-1, 0))
THETA3 = ((0, -1, 0), (1, 0, 1), (0, 1, 1))


def block_diag(blocks: Sequence[Sequence[Sequence[int]]]) -> tuple[tuple[int, ...], ...]:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    at = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            out[at + i][at:at + k] = list(b[i])
        at += k
    return tuple(tuple(r) for r in out)


def theta_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    """theta_2 blocks first, then one theta_3 block when n is odd."""
    if n < 2:
        raise ShapeError("theta needs n >= 2")
    if n % 2 == 0:
        return block_diag([THETA2] * (n // 2))
    return block_diag([THETA2] * ((n - 3) // 2) + [THETA3])


def interleave_phi_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    """Output 2k-1 = a_{2k-1}+a_{2k}+a_{2k+1}, output 2k = a_{2k}+a_{2k+1} (1-based); a_i = 0 past n."""
    rows = []
    for i in range(n):  # 0-based row i is 1-based output i+1
        row = [0] * n
        span = (i, i + 1, i + 2) if i % 2 == 0 else (i, i + 1)
        for j in span:
            if j < n:
                row[j] = 1
        rows.append(tuple(row))
    return tuple(rows)


def interleave_psi_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    """Output 2k-1 = a_{2k-1}-a_{2k}, output 2k = a_{2k}-a_{2k+1}+a_{2k+2} (1-based); a_i = 0 past n."""
    rows = []
    for i in range(n):
        row = [0] * n
        coeffs = ((i, 1), (i + 1, -1)) if i % 2 == 0 else ((i, 1), (i + 1, -1), (i + 2, 1))
        for j, c in coeffs:
            if j < n:
                row[j] = c
        rows.append(tuple(row))
    return tuple(rows)


def two_exponents(moduli: Sequence[int]) -> tuple[int, ...]:
    """Exponents n_i of moduli 2**n_i, checked nondecreasing."""
    exps = []
    for m in moduli:
        if m < 2 or m & (m - 1):
            raise ShapeError(f"interleave maps need 2-power orders, got {m}")
        exps.append(m.bit_length() - 1)
    if any(a > b for a, b in zip(exps, exps[1:])):
        raise ShapeError("interleave maps need nondecreasing orders")
    return tuple(exps)


# ---------------------------------------------------------------------------
# Lowering onto cyclic presentations
# ---------------------------------------------------------------------------

def check_relation_preserving(matrix: Sequence[Sequence[int]], moduli: Sequence[int]) -> None:
    """Generator j of order m_j must map to an element killed by m_j."""
    for i, mi in enumerate(moduli):
        for j, mj in enumerate(moduli):
            image = mj * matrix[i][j]
            if (image != 0) if mi == 0 else (image % mi):
                raise ShapeError(
                    f"matrix entry ({i},{j}) = {matrix[i][j]} does not respect orders {mi} <- {mj}"
                )


def _matrix_for(endo, moduli: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    n = len(moduli)
    if isinstance(endo, SCALAR_ENDOS):
        q = scalar_of(endo)
        if q.denominator != 1:
            raise ShapeError(f"scalar {q} is not an integer on a finitely generated group")
        k = int(q)
        return tuple(tuple(k if i == j else 0 for j in range(n)) for i in range(n))
    if isinstance(endo, IntegerMatrix):
        if endo.dim != n:
            raise ShapeError(f"matrix is {endo.dim}x{endo.dim} but the group has {n} generators")
        return endo.rows
    if isinstance(endo, Theta):
        if endo.n != n:
            raise ShapeError(f"theta:{endo.n} on a group with {n} generators")
        return theta_matrix(n)
    if isinstance(endo, (InterleavePhi, InterleavePsi)):
        two_exponents(moduli)
        build = interleave_phi_matrix if isinstance(endo, InterleavePhi) else interleave_psi_matrix
        return build(n)
    raise ShapeError(f"{render_endo(endo)} cannot act on a cyclic presentation")


def lower_fg(group: GroupExpr, endo) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Lower (group, endo) to (moduli, integer matrix) when the group is finitely generated."""
    moduli = group.moduli()
    if isinstance(endo, ReducedLift):
        # no divisible atoms in a finitely generated group: the lift is the inner map
        return lower_fg(group, endo.inner)
    if isinstance(endo, PerComponent):
        if len(endo.parts) != len(group.summands):
            raise ShapeError(
                f"diag has {len(endo.parts)} parts but the group has {len(group.summands)} summands"
            )
        blocks = [lower_fg(GroupExpr((a,)), part)[1] for a, part in zip(group.summands, endo.parts)]
        matrix = block_diag(blocks)
    else:
        matrix = _matrix_for(endo, moduli)
    check_relation_preserving(matrix, moduli)
    return moduli, matrix


@dataclass(frozen=True)
class ReidemeisterResult:
    number: Cardinal
    certificate: str
    representatives: tuple[tuple[int, ...], ...] | None = None
    cites: str | None = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.certificate not in CERTIFICATES:
            raise ValueError(f"unknown certificate {self.certificate!r}")
        if self.representatives is not None:
            if not self.number.is_finite or len(self.representatives) != self.number.value:
                raise ValueError("representatives must list exactly one element per class")
        if (self.certificate == "cited-symbolic") != (self.cites is not None):
            raise ValueError("cited-symbolic certificates carry a statement id, others do not")
        if self.number.kind == AT_LEAST and self.certificate != "lower-bound":
            raise ValueError("lower-bound cardinals need a lower-bound certificate")

    def to_json(self) -> dict:
        out = self.number.to_json()
        out["certificate"] = self.certificate
        if self.cites is not None:
            out["cites"] = self.cites
        if self.representatives is not None:
            out["representatives"] = [list(r) for r in self.representatives]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


CERTIFICATES = ("oracle", "snf", "closed-form", "product-rule", "lower-bound", "cited-symbolic")
