"""Hot loops of the brute-force oracle.

Each kernel exists twice: a numba ``@njit`` loop and a vectorised numpy
version.  The numba path is used when numba imports and the environment
variable ``REIDNUM_DISABLE_NUMBA`` is unset (or ``0``); otherwise the numpy
path is used.  Both return identical arrays.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("REIDNUM_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by REIDNUM_DISABLE_NUMBA")
    from numba import njit
except ImportError:
    njit = None

HAVE_NUMBA = njit is not None


def coordinate_table(moduli: np.ndarray) -> np.ndarray:
    """All elements of prod Z/m_i in lexicographic order, one row each."""
    n = len(moduli)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(tuple(int(m) for m in moduli), dtype=np.int64)
    return grids.reshape(n, -1).T.copy()


def encode(coords: np.ndarray, strides: np.ndarray) -> np.ndarray:
    return coords @ strides if coords.shape[1] else np.zeros(len(coords), dtype=np.int64)


def apply_matrix(coords: np.ndarray, matrix: np.ndarray, moduli: np.ndarray) -> np.ndarray:
    """Coordinates of M x for every row x; ``matrix`` must already be reduced mod its rows' moduli."""
    if coords.shape[1] == 0:
        return coords.copy()
    return (coords @ matrix.T) % moduli


def _class_labels_numpy(coords, translations, moduli, strides):
    N = coords.shape[0]
    labels = np.full(N, -1, dtype=np.int64)
    conflict = False
    nclass = 0
    for x in range(N):
        if labels[x] >= 0:
            continue
        ys = encode((coords[x] + translations) % moduli, strides)
        if (labels[ys] >= 0).any():
            conflict = True
        labels[ys] = nclass
        nclass += 1
    return labels, conflict


if HAVE_NUMBA:

    @njit(cache=True)
    def _class_labels_jit(coords, translations, moduli, strides):
        N, n = coords.shape
        T = translations.shape[0]
        labels = np.full(N, -1, dtype=np.int64)
        conflict = False
        nclass = 0
        for x in range(N):
            if labels[x] >= 0:
                continue
            for t in range(T):
                y = 0
                for i in range(n):
                    c = coords[x, i] + translations[t, i]
                    if c >= moduli[i]:
                        c -= moduli[i]
                    y += c * strides[i]
                if labels[y] >= 0 and labels[y] != nclass:
                    conflict = True
                labels[y] = nclass
            nclass += 1
        return labels, conflict

else:
    _class_labels_jit = None


def class_labels(coords, translations, moduli, strides, use_numba: bool | None = None):
    """Label every element x by the class {x + t : t in translations}, scanning in index order.

    Returns ``(labels, conflict)``; ``conflict`` is set when two translates
    overlap without coinciding, i.e. the translates fail to partition the group.
    The first element of each class in scan order is its lexicographic minimum.
    """
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        if not HAVE_NUMBA:
            raise RuntimeError("numba path requested but numba is unavailable")
        return _class_labels_jit(coords, translations, moduli, strides)
    return _class_labels_numpy(coords, translations, moduli, strides)
