"""Smith normal form over Z with exact (arbitrary precision) integers.

Matrices are handled as lists of rows of Python ints; results are exposed as
read-only numpy object arrays so that ``U @ A @ V`` stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .core import ALEPH0, Cardinal, FgAbelianGroup, ShapeError, finite


def _as_rows(A, shape: tuple[int, int] | None = None) -> tuple[list[list[int]], int, int]:
    if isinstance(A, np.ndarray):
        n, m = A.shape
        return [[int(x) for x in row] for row in A], n, m
    rows = [[int(x) for x in row] for row in A]
    if shape is not None:
        n, m = shape
    else:
        n = len(rows)
        m = len(rows[0]) if rows else 0
    if len(rows) != n or any(len(r) != m for r in rows):
        raise ShapeError("ragged integer matrix")
    return rows, n, m


def _frozen(rows: list[list[int]], n: int, m: int) -> np.ndarray:
    out = np.empty((n, m), dtype=object)
    for i in range(n):
        for j in range(m):
            out[i, j] = rows[i][j]
    out.flags.writeable = False
    return out


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SnfDecomposition:
    """U @ A @ V == D with U, V unimodular and D a diagonal divisor chain."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray

    @property
    def divisors(self) -> tuple[int, ...]:
        k = min(self.D.shape)
        return tuple(int(self.D[i, i]) for i in range(k))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.divisors if d)


def smith_normal_form(A, shape: tuple[int, int] | None = None) -> SnfDecomposition:
    """Smith normal form by elementary operations, pivoting on the smallest nonzero entry.

    ``shape`` disambiguates empty inputs such as a 3x0 matrix.
    """
    a, n, m = _as_rows(A, shape)
    U = _identity(n)
    V = _identity(m)

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row_dst += q * row_src
        if q:
            a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
            U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        if q:
            for row in a:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    for t in range(min(n, m)):
        while True:
            pivot = None
            for i in range(t, n):
                for j in range(t, m):
                    x = a[i][j]
                    if x and (pivot is None or abs(x) < abs(a[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = a[t][t]
            clean = True
            for i in range(t + 1, n):
                add_row(i, t, -(a[i][t] // p))
                clean = clean and a[i][t] == 0
            for j in range(t + 1, m):
                add_col(j, t, -(a[t][j] // p))
                clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, m) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]

    return SnfDecomposition(_frozen(U, n, n), _frozen(a, n, m), _frozen(V, m, m))


def cokernel_cardinal(A, shape: tuple[int, int] | None = None) -> Cardinal:
    """|Z^n / A Z^m| for an n x m integer matrix."""
    snf = smith_normal_form(A, shape)
    n = snf.D.shape[0]
    nonzero = [d for d in snf.divisors if d]
    if len(nonzero) < n:
        return ALEPH0
    return finite(prod(nonzero))


def cokernel_group(A, shape: tuple[int, int] | None = None) -> FgAbelianGroup:
    """Isomorphism type of Z^n / A Z^m."""
    snf = smith_normal_form(A, shape)
    n = snf.D.shape[0]
    nonzero = [d for d in snf.divisors if d]
    return FgAbelianGroup(n - len(nonzero), tuple(d for d in nonzero if d > 1))


def relation_matrix(moduli: Sequence[int]) -> list[list[int]]:
    """Columns m_i e_i for each torsion generator; free generators contribute nothing."""
    n = len(moduli)
    cols = [i for i, mi in enumerate(moduli) if mi]
    return [[moduli[i] if i == c else 0 for c in cols] for i in range(n)]


def in_lattice(x: Sequence[int], rel_snf: SnfDecomposition) -> bool:
    """Whether the integer vector x lies in the column span of the relation matrix."""
    U = rel_snf.U
    y = [sum(int(U[i, k]) * x[k] for k in range(len(x))) for i in range(len(x))]
    ds = rel_snf.divisors
    for i, yi in enumerate(y):
        d = ds[i] if i < len(ds) else 0
        if (yi != 0) if d == 0 else (yi % d):
            return False
    return True


def cokernel_with_relations(M, Rel, n_relations: int | None = None) -> Cardinal:
    """|coker(M - Id)| on the group Z^n / Rel Z^k, via the block matrix [M - Id | Rel]."""
    m, n, n2 = _as_rows(M)
    if n != n2:
        raise ShapeError("endomorphism matrix must be square")
    k = n_relations if n_relations is not None else (len(Rel[0]) if n and Rel and len(Rel[0]) else 0)
    rel, _, _ = _as_rows(Rel, (n, k))
    rel_snf = smith_normal_form(rel, (n, k))
    for j in range(k):
        image = [sum(m[i][t] * rel[t][j] for t in range(n)) for i in range(n)]
        if not in_lattice(image, rel_snf):
            raise ShapeError(f"endomorphism does not preserve relation {j}")
    block = [[m[i][j] - (i == j) for j in range(n)] + rel[i] for i in range(n)]
    return cokernel_cardinal(block, (n, n + k))
