"""Inner loops for the U-empirical statistics.

Both statistics reduce to sums over the ``n(n-1)/2`` ordered position pairs
``a < b`` of a sorted sample.  The pair ``(a, b)`` contributes the ratio
``x[b] / x[a]`` with weight ``C(a, k-2) / C(n, k)`` (0-based ``a``), which is
the fraction of k-subsets whose two largest members sit at positions ``a``
and ``b``.

Each kernel exists twice: an explicit loop compiled with numba, and a
vectorised numpy version.  The numba path is used when numba is importable
and the environment variable ``PARETOGOF_NUMBA`` is not set to ``0``.
"""

from __future__ import annotations

import os
from math import comb

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("PARETOGOF_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)
BACKEND = "numba" if USE_NUMBA else "numpy"


def pair_weights(n: int, k: int) -> np.ndarray:
    """Weight of every pair whose lower member sits at 0-based position ``a``.

    Binomials are exact Python integers; the single division per position is
    correctly rounded.
    """
    total = comb(n, k)
    return np.array([comb(a, k - 2) / total for a in range(n)], dtype=np.float64)


# --------------------------------------------------------------------------
# loop versions (compiled by numba when available)


def _integral_count_loop(x, w):
    # sum over atoms of weight * #{i : x[i] > atom}
    n = x.shape[0]
    total = 0.0
    for a in range(n - 1):
        wa = w[a]
        if wa == 0.0:
            continue
        xa = x[a]
        p = 0
        acc = 0
        for b in range(a + 1, n):
            r = x[b] / xa
            while p < n and x[p] <= r:
                p += 1
            acc += n - p
        total += wa * acc
    return total


def _sup_scan_loop(x, w):
    n = x.shape[0]
    m = 0
    for a in range(n - 1):
        if w[a] != 0.0:
            m += n - 1 - a
    loc = np.empty(m + n, dtype=np.float64)
    val = np.empty(m + n, dtype=np.float64)
    j = 0
    for a in range(n - 1):
        wa = w[a]
        if wa == 0.0:
            continue
        xa = x[a]
        for b in range(a + 1, n):
            loc[j] = x[b] / xa
            val[j] = wa
            j += 1
    inv = 1.0 / n
    for i in range(n):
        loc[j] = x[i]
        val[j] = -inv
        j += 1
    order = np.argsort(loc, kind="mergesort")
    best = 0.0
    best_t = 1.0
    run = 0.0
    prev = -1.0
    for idx in range(order.shape[0]):
        i = order[idx]
        li = loc[i]
        if li != prev:
            d = abs(run)
            if d > best:
                best = d
                best_t = li
            prev = li
        run += val[i]
    return best, best_t


# --------------------------------------------------------------------------
# numpy versions


def _pairs(n, w):
    a, b = np.triu_indices(n, 1)
    keep = w[a] != 0.0
    return a[keep], b[keep]


def integral_count_numpy(x: np.ndarray, w: np.ndarray) -> float:
    n = x.shape[0]
    a, b = _pairs(n, w)
    t = x[b] / x[a]
    counts = n - np.searchsorted(x, t, side="right")
    return float(np.dot(w[a], counts))


def sup_scan_numpy(x: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    n = x.shape[0]
    a, b = _pairs(n, w)
    loc = np.concatenate([x[b] / x[a], x])
    val = np.concatenate([w[a], np.full(n, -1.0 / n)])
    order = np.argsort(loc, kind="mergesort")
    loc = loc[order]
    before = np.concatenate(([0.0], np.cumsum(val[order])[:-1]))
    first = np.ones(loc.shape[0], dtype=bool)
    first[1:] = loc[1:] != loc[:-1]
    diffs = np.abs(before[first])
    i = int(np.argmax(diffs))
    return float(diffs[i]), float(loc[first][i])


if HAVE_NUMBA:
    integral_count_numba = numba.njit(cache=True, nogil=True)(_integral_count_loop)
    sup_scan_numba = numba.njit(cache=True, nogil=True)(_sup_scan_loop)
else:  # pragma: no cover
    integral_count_numba = None
    sup_scan_numba = None

if USE_NUMBA:
    integral_count = integral_count_numba
    sup_scan = sup_scan_numba
else:
    integral_count = integral_count_numpy
    sup_scan = sup_scan_numpy
