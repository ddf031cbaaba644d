"""Batch verification suites behind ``reidnum verify``.

Every check compares an engine or construction value against an independent
route (enumeration, a closed-form set, a residue-ring computation) and is
tagged with a statement id.  Suites are deterministic for a given seed.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable

from sympy import primerange

from . import constructions as C
from .core import (
    ALEPH0,
    UNCOUNTABLE,
    Cardinal,
    Cyclic,
    GroupExpr,
    IntegerMatrix,
    LocalizedUnit,
    Neg,
    Prufer,
    Rationals,
    ScalarMul,
    finite,
    parse_group,
    prime_power,
    valuation,
)
from .engine import (
    in_localized_multiple,
    index_localized,
    is_automorphism,
    r_lower_bound_truncated,
    reidemeister_divisible,
    reidemeister_fg,
    reidemeister_localized,
    reidemeister_padic,
    reidemeister_product_localized_symbolic,
    reidemeister_sum_localized,
    spectrum_localized,
)
from .oracle import FiniteGroupTable, image_subgroup, reidemeister_oracle

DEFAULT_SEED = 20240601
SUITES = ("lemmas", "spectrum", "constructions")


@dataclass
class Check:
    statement_id: str
    parameters: dict
    expected: object
    actual: object
    passed: bool

    def to_json(self) -> dict:
        return {
            "statement": self.statement_id,
            "parameters": {k: str(v) for k, v in self.parameters.items()},
            "expected": str(self.expected),
            "actual": str(self.actual),
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    suite: str
    checks: list[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def add(self, statement_id: str, parameters: dict, expected, actual, passed: bool | None = None):
        ok = (expected == actual) if passed is None else passed
        self.checks.append(Check(statement_id, parameters, expected, actual, bool(ok)))

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "total": len(self.checks),
            "failures": sum(not c.passed for c in self.checks),
            "elapsed": f"{self.elapsed:.3f}",
            "checks": [c.to_json() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# Random inputs
# ---------------------------------------------------------------------------

def random_moduli(rng: random.Random, max_order: int, max_factors: int = 4) -> tuple[int, ...]:
    """A random cyclic presentation prod Z/m_i of order at most max_order."""
    moduli: list[int] = []
    budget = max_order
    for _ in range(rng.randint(1, max_factors)):
        if budget < 2:
            break
        m = rng.randint(2, min(budget, 64))
        moduli.append(m)
        budget //= m
    return tuple(moduli)


def random_endomorphism(rng: random.Random, moduli, max_coeff: int | None = None) -> tuple[tuple[int, ...], ...]:
    """A random matrix respecting the cyclic relations: entry (i, j) is a multiple of m_i / gcd(m_i, m_j)."""
    n = len(moduli)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            step = moduli[i] // gcd(moduli[i], moduli[j])
            top = moduli[i] // step if max_coeff is None else max_coeff
            row.append(step * rng.randrange(top))
        rows.append(tuple(row))
    return tuple(rows)


def spectrum_formula(p: int, m_max: int) -> set:
    """{2} + {p^m +- 1} + {inf} for odd p, {2^m +- 1} + {inf} for p = 2."""
    values = {finite(p**m + s) for m in range(1, m_max + 1) for s in (1, -1)}
    if p != 2:
        values.add(finite(2))
    values.add(ALEPH0)
    return values


def index_lemma_coset_check(p: int, m: int, samples: int, rng: random.Random) -> bool:
    """Every sampled x in Z[1/p] lies in exactly one coset i + m Z[1/p], 0 <= i < m."""
    for _ in range(samples):
        k = rng.randint(0, 6)
        a = rng.randint(-10**9, 10**9)
        x = Fraction(a, p**k)
        i = a * pow(p**k, -1, m) % m
        if not in_localized_multiple(x - i, m, p):
            return False
        if m <= 2000:
            others = range(m)
        else:
            others = {(i + 1) % m, (i - 1) % m} | {rng.randrange(m) for _ in range(20)}
        hits = [j for j in others if in_localized_multiple(x - j, m, p)]
        if hits != [i] and (m <= 2000 or any(j != i for j in hits)):
            return False
    return True


def prufer_layer_covered(p: int, q: int, k: int) -> bool:
    """Every element of order dividing p^k in Z(p^inf) has a preimage under Id - q.

    Z(p^inf)[p^k] sits inside Z/p^(k+v) as the multiples of p^v, v = v_p(1 - q).
    """
    if q == 1:
        return False
    v = valuation(1 - q, p)
    big = FiniteGroupTable((p ** (k + v),))
    image = set(image_subgroup(big, ScalarMul(1 - q)).indices)
    return all(p**v * x in image for x in range(p**k))


def padic_residue_r(p: int, u: int, j: int) -> int:
    """|coker(u - 1)| on the residue ring Z/p^j, by enumeration."""
    table = FiniteGroupTable((p**j,))
    return reidemeister_oracle(table, ScalarMul(u), representatives=False).number.value


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _lemmas(report: VerificationReport, rng: random.Random, max_order: int, **_):
    for _ in range(12):
        moduli = random_moduli(rng, max_order)
        table = FiniteGroupTable(moduli)
        M = random_endomorphism(rng, moduli)
        o = reidemeister_oracle(table, M, representatives=False).number
        e = reidemeister_fg(moduli, M).number
        report.add("quotient-characterization", {"moduli": moduli, "matrix": M}, o, e)

    for _ in range(8):
        moduli = random_moduli(rng, max_order)
        table = FiniteGroupTable(moduli)
        n = len(moduli)
        two = tuple(tuple(2 * (i == j) for j in range(n)) for i in range(n))
        report.add("mult-by-2", {"moduli": moduli}, finite(1),
                   reidemeister_oracle(table, two, representatives=False).number)
        doubles = image_subgroup(table, two).order
        report.add("negation-index", {"moduli": moduli}, finite(table.order // doubles),
                   reidemeister_oracle(table, Neg(), representatives=False).number)

    for p in (2, 3, 5):
        for _ in range(2):
            m = rng.randint(2, 10**6)
            while gcd(m, p) != 1:
                m += 1
            ok = index_localized(p, m) == finite(m) and index_lemma_coset_check(p, m, 20, rng)
            report.add("index-lemma", {"p": p, "m": m}, True, ok)

    for atom, q in ((Rationals(1), Fraction(2)), (Rationals(1), Fraction(1)), (Rationals(2), Fraction(-3, 7)),
                    (Prufer(5), -1), (Prufer(3), 4), (Prufer(2), 1)):
        r = reidemeister_divisible(atom, q).number
        report.add("divisible-dichotomy", {"atom": atom.render(), "q": q}, True, r in (finite(1), ALEPH0))
        if isinstance(atom, Prufer):
            covered = all(prufer_layer_covered(atom.p, int(q), k) for k in range(1, 4))
            report.add("divisible-dichotomy", {"atom": atom.render(), "q": q, "truncations": 3},
                       r == finite(1), covered)

    for p, u in ((3, 2), (5, 2), (7, 2), (2, -1)):
        r = reidemeister_padic(p, u, 8).number
        residue_ok = all(padic_residue_r(p, u, j) == r.value for j in range(valuation(u - 1, p) + 1, 5))
        report.add("padic", {"p": p, "u": u}, finite(2 if p == 2 else 1), r, r == finite(2 if p == 2 else 1) and residue_ok)

    for p1, p2, cand in ((3, 5, 1), (3, 5, Fraction(9, 5)), (2, 7, Fraction(6, 49))):
        w = C.hom_vanishing_witness(p1, p2, cand)
        report.add("hom-vanishing", {"p1": p1, "p2": p2, "candidate": cand}, True, w.holds)

    div = GroupExpr((Rationals(1), Prufer(3)))
    for inner in ("Z/4", "Z^2", "Z/6 + Z/9"):
        rec = C.reduced_lift(div, C.negation(parse_group(inner)))
        report.add("reduced-part-lift", {"inner": inner}, True, rec.ok)

    for _ in range(4):
        moduli = random_moduli(rng, max_order, 3)
        M = random_endomorphism(rng, moduli)
        g = GroupExpr(tuple(Cyclic(m) for m in moduli))
        if not is_automorphism(g, IntegerMatrix(M)):
            continue
        inv = _inverse_mod(M, moduli)
        report.add("inverse-invariance", {"moduli": moduli, "matrix": M},
                   reidemeister_fg(moduli, M).number, reidemeister_fg(moduli, inv).number)


def _inverse_mod(M, moduli):
    """Inverse of an automorphism of prod Z/m_i by raising to its order in the finite group Aut."""
    table = FiniteGroupTable(moduli)
    n = len(moduli)
    P = [list(r) for r in M]
    ident = [[int(i == j) for j in range(n)] for i in range(n)]

    def mul(A, B):
        return [[sum(A[i][t] * B[t][j] for t in range(n)) % moduli[i] for j in range(n)] for i in range(n)]

    prev, cur = ident, [[x % moduli[i] for x in r] for i, r in enumerate(P)]
    for _ in range(table.order ** 2):
        if all((cur[i][j] - ident[i][j]) % moduli[i] == 0 for i in range(n) for j in range(n)):
            return tuple(tuple(r) for r in prev)
        prev, cur = cur, mul(cur, P)
    raise RuntimeError("automorphism order not found")


def _spectrum(report: VerificationReport, rng: random.Random, max_prime: int = 11, mmax: int = 16, **_):
    for p in primerange(2, max_prime + 1):
        rep = spectrum_localized(p, mmax)
        values = set(rep.values)
        expected = spectrum_formula(p, mmax)
        report.add("spectrum-localized", {"p": p, "mmax": mmax}, _show(expected), _show(values), expected == values)
        if p != 2:
            report.add("spectrum-localized", {"p": p, "claim": "1 not in spectrum"}, False, finite(1) in values)
        sound = all(reidemeister_localized(p, u).number == v for v, ws in rep.witnesses.items() for u in ws)
        report.add("spectrum-localized", {"p": p, "claim": "witnesses reproduce"}, True, sound)
        inverse = all(
            reidemeister_localized(p, LocalizedUnit.power(p, m, s)).number
            == reidemeister_localized(p, LocalizedUnit.power(p, -m, s)).number
            for m in range(mmax + 1) for s in (1, -1)
        )
        report.add("inverse-invariance", {"p": p}, True, inverse)


def _show(values) -> str:
    return "{" + ", ".join(str(v) for v in sorted(values, key=Cardinal.sort_key)) + "}"


def _constructions(report: VerificationReport, rng: random.Random, max_order: int, **_):
    for n in range(2, 17):
        rec = C.theta(n)
        report.add("theta-blocks", {"n": n}, True, rec.ok)
    for k, n in ((2, 6), (3, 4), (4, 3), (8, 2), (9, 2)):
        table = FiniteGroupTable((k,) * n)
        r = reidemeister_oracle(table, IntegerMatrix(C.theta_matrix(n)), representatives=False).number
        report.add("theta-blocks", {"k": k, "n": n}, finite(1), r)
    for N in range(1, 11):
        exps = tuple(range(1, N + 1))
        rec = C.interleave_phi(exps)
        inverse = all(o.passed for o in rec.obligations if "Id" in o.statement and "window" not in o.statement)
        report.add("interleave-inverse", {"exponents": exps}, True, inverse)
        report.add("interleave-window", {"exponents": exps}, True, C.window_surjective(exps))
    for _ in range(6):
        orders = _random_prime_powers(rng, max_order)
        rec = C.finite_cyclic_assembler(orders)
        report.add("assembler", {"orders": orders}, True, rec.ok)
    for text in ("Z/4 + Z/3", "Zhat(2)", "Zhat(3)", "Z/7", "Zp(2)", "Q + Z/8"):
        rec = C.negation(parse_group(text))
        report.add("negation-index", {"group": text}, True, rec.ok)
    prev = None
    for cutoff in (10, 50, 100):
        units = {p: rng.choice((1, -1, p, -p, Fraction(1, p))) for p in primerange(2, cutoff + 1)}
        bound = r_lower_bound_truncated(units, cutoff)
        report.add("r-infinity-sum", {"cutoff": cutoff}, True, prev is None or bound.value >= prev)
        prev = bound.value
    report.add("r-infinity-sum", {"cutoff": 100, "claim": ">= 2^24"}, True,
               r_lower_bound_truncated({}, 100).value >= 2**24)
    report.add("r-infinity-sum", {"family": "infinite"}, ALEPH0,
               reidemeister_sum_localized([(3, 9)], True, True).number)
    report.add("uncountable-product", {"family": "infinite"}, UNCOUNTABLE,
               reidemeister_product_localized_symbolic(True).number)
    report.add("product-rule", {"entries": "(3, 9), (5, -1)"}, finite(16),
               reidemeister_sum_localized([(3, 9), (5, -1)]).number)


def _random_prime_powers(rng: random.Random, max_order: int) -> tuple[int, ...]:
    pool = [q for q in range(2, 65) if prime_power(q)]
    out: list[int] = []
    budget = max_order
    while True:
        choices = [q for q in pool if q <= budget]
        if not choices or (out and rng.random() < 0.25):
            break
        q = rng.choice(choices)
        out.append(q)
        budget //= q
    return tuple(sorted(out))


_RUNNERS: dict[str, Callable] = {"lemmas": _lemmas, "spectrum": _spectrum, "constructions": _constructions}


def run_suite(suite: str = "all", seed: int = DEFAULT_SEED, max_order: int = 4096,
              max_prime: int = 11, mmax: int = 16) -> VerificationReport:
    if suite != "all" and suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}")
    for bound in (max_order, max_prime, mmax):
        if bound < 1:
            raise ValueError("bounds must be positive")
    report = VerificationReport(suite)
    start = time.perf_counter()
    for name in (SUITES if suite == "all" else (suite,)):
        _RUNNERS[name](report, random.Random(f"{seed}:{name}"), max_order=max(max_order, 2),
                       max_prime=max_prime, mmax=mmax)
    report.checks.sort(key=lambda c: c.statement_id)
    report.elapsed = time.perf_counter() - start
    return report
