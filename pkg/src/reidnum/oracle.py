"""Brute-force twisted-conjugacy classes on finite abelian groups.

Classes are built straight from the definition, y ~ x iff y = z + x - phi(z)
for some z, and independently counted as cosets of Im(Id - phi).  The two
counts must agree or the oracle raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from . import _kernels
from .core import (
    Cyclic,
    FgAbelianGroup,
    GroupExpr,
    InfeasibleError,
    IntegerMatrix,
    ReidemeisterResult,
    ShapeError,
    finite,
    lower_fg,
)

DEFAULT_MAX_ORDER = 100_000


class OracleDisagreement(AssertionError):
    """Orbit partition and coset count differ; the oracle cannot be trusted."""


@dataclass(frozen=True)
class FiniteGroupTable:
    """prod Z/m_i with elements enumerated lexicographically in generator coordinates."""

    moduli: tuple[int, ...]
    expr: GroupExpr | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if any(m < 2 for m in self.moduli):
            raise ShapeError("finite group tables need every order >= 2")

    @classmethod
    def from_fg(cls, g: FgAbelianGroup) -> FiniteGroupTable:
        if g.rank:
            raise InfeasibleError("the oracle only handles finite groups")
        return cls(g.invariant_factors)

    @classmethod
    def from_expr(cls, g: GroupExpr) -> FiniteGroupTable:
        if not g.is_finite:
            raise InfeasibleError(f"{g.render()} is infinite; build a finite truncation first")
        return cls(g.moduli(), g)

    @property
    def order(self) -> int:
        return prod(self.moduli)

    @property
    def strides(self) -> np.ndarray:
        n = len(self.moduli)
        s = [prod(self.moduli[i + 1:]) for i in range(n)]
        return np.array(s, dtype=np.int64)

    def coords(self) -> np.ndarray:
        return _kernels.coordinate_table(np.array(self.moduli, dtype=np.int64))

    def element(self, index: int) -> tuple[int, ...]:
        out = []
        for s, m in zip(self.strides, self.moduli):
            out.append(int(index // s) % m)
        return tuple(out)

    def index(self, element: Sequence[int]) -> int:
        return int(sum((int(a) % m) * int(s) for a, m, s in zip(element, self.moduli, self.strides)))

    def group_expr(self) -> GroupExpr:
        return self.expr if self.expr is not None else GroupExpr(tuple(Cyclic(m) for m in self.moduli))


@dataclass(frozen=True)
class EnumeratedSubgroup:
    ambient: FiniteGroupTable
    indices: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.indices)

    @property
    def elements(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.ambient.element(i) for i in self.indices)


def _check_bound(g: FiniteGroupTable, max_order: int) -> None:
    if g.order > max_order:
        raise InfeasibleError(f"group of order {g.order} exceeds the oracle bound {max_order}")


def _reduced_matrix(g: FiniteGroupTable, endo) -> np.ndarray:
    if isinstance(endo, (list, tuple, np.ndarray)):
        endo = IntegerMatrix(tuple(tuple(int(x) for x in row) for row in endo))
    _, rows = lower_fg(g.group_expr(), endo)
    moduli = g.moduli
    n = len(moduli)
    return np.array(
        [[rows[i][j] % moduli[i] for j in range(n)] for i in range(n)], dtype=np.int64
    ).reshape(n, n)


def _images(g: FiniteGroupTable, endo) -> tuple[np.ndarray, np.ndarray]:
    coords = g.coords()
    mod = np.array(g.moduli, dtype=np.int64)
    return coords, _kernels.apply_matrix(coords, _reduced_matrix(g, endo), mod)


def image_subgroup(g: FiniteGroupTable, psi, max_order: int = DEFAULT_MAX_ORDER) -> EnumeratedSubgroup:
    """Enumerate psi(g) as a set of element indices."""
    _check_bound(g, max_order)
    _, images = _images(g, psi)
    idx = np.unique(_kernels.encode(images, g.strides))
    return EnumeratedSubgroup(g, tuple(int(i) for i in idx))


def reidemeister_oracle(
    g: FiniteGroupTable,
    phi,
    max_order: int = DEFAULT_MAX_ORDER,
    representatives: bool = True,
    use_numba: bool | None = None,
) -> ReidemeisterResult:
    """Count twisted-conjugacy classes of ``phi`` by enumeration."""
    _check_bound(g, max_order)
    mod = np.array(g.moduli, dtype=np.int64)
    coords, images = _images(g, phi)
    delta = (coords - images) % mod  # z - phi(z)
    strides = g.strides
    codes, first = np.unique(_kernels.encode(delta, strides), return_index=True)
    translations = np.ascontiguousarray(delta[first])
    labels, conflict = _kernels.class_labels(coords, translations, mod, strides, use_numba)
    if conflict or (labels < 0).any():
        raise OracleDisagreement("translates of the twisted orbit do not partition the group")
    n_classes = int(labels.max()) + 1
    image_order = len(codes)
    if g.order % image_order:
        raise OracleDisagreement(f"image order {image_order} does not divide {g.order}")
    if n_classes != g.order // image_order:
        raise OracleDisagreement(
            f"orbit partition gives {n_classes} classes, cosets give {g.order // image_order}"
        )
    reps = None
    if representatives:
        _, first_of_class = np.unique(labels, return_index=True)
        reps = tuple(tuple(int(c) for c in coords[i]) for i in np.sort(first_of_class))
    return ReidemeisterResult(finite(n_classes), "oracle", reps)


def twisted_equivalent(g: FiniteGroupTable, phi, x: Sequence[int], y: Sequence[int]) -> bool:
    """Whether y = z + x - phi(z) for some z, by direct search over z."""
    mod = np.array(g.moduli, dtype=np.int64)
    coords, images = _images(g, phi)
    cand = (coords + np.array(x, dtype=np.int64) - images) % mod
    return bool((cand == np.array(y, dtype=np.int64) % mod).all(axis=1).any())
