"""Reidemeister numbers of endomorphisms of abelian groups.

R(phi) is the index of Im(Id - phi) in A.  Finitely generated groups go
through an exact Smith normal form; localizations, p-adic integers and
divisible atoms use closed forms; small finite groups can be cross-checked
by brute-force enumeration.
"""

from __future__ import annotations

from .core import (
    ALEPH0,
    UNCOUNTABLE,
    Cardinal,
    FgAbelianGroup,
    GroupExpr,
    LocalizedUnit,
    ReidemeisterResult,
    at_least,
    finite,
    normalize_fg,
    parse_endo,
    parse_group,
    primary_decomposition,
    render_endo,
)
from .engine import (
    index_localized,
    is_automorphism,
    r_lower_bound_truncated,
    reidemeister,
    reidemeister_fg,
    reidemeister_localized,
    reidemeister_padic,
    spectrum_localized,
)
from .oracle import FiniteGroupTable, reidemeister_oracle
from .snf import cokernel_cardinal, smith_normal_form

__version__ = "0.1.0"

__all__ = [
    "ALEPH0",
    "UNCOUNTABLE",
    "Cardinal",
    "FgAbelianGroup",
    "FiniteGroupTable",
    "GroupExpr",
    "LocalizedUnit",
    "ReidemeisterResult",
    "at_least",
    "cokernel_cardinal",
    "finite",
    "index_localized",
    "is_automorphism",
    "normalize_fg",
    "parse_endo",
    "parse_group",
    "primary_decomposition",
    "r_lower_bound_truncated",
    "reidemeister",
    "reidemeister_fg",
    "reidemeister_localized",
    "reidemeister_oracle",
    "reidemeister_padic",
    "render_endo",
    "smith_normal_form",
    "spectrum_localized",
]
