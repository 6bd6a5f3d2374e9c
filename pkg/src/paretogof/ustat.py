"""U-empirical distribution function and the two test statistics.

For a sample ``X_1..X_n`` and order ``k`` the U-empirical d.f. is::

    H_n(t) = C(n, k)^{-1} * sum over k-subsets of 1{ X_(k) / X_(k-1) < t }

where ``X_(k)``, ``X_(k-1)`` are the two largest members of the subset.  It
is compared with ``F_n(t) = n^{-1} sum 1{X_i < t}`` through

* the integral statistic ``I_n = n^{-1} sum_i (H_n(X_i) - F_n(X_i))``
* the supremum statistic ``D_n = sup_t |H_n(t) - F_n(t)|``.

Instead of enumerating the ``C(n, k)`` subsets, ``H_n`` is aggregated over
position pairs of the sorted sample, see :mod:`paretogof._kernels`.  Memory
is ``O(n^2)``; samples of a few thousand observations are practical.
"""

from __future__ import annotations

import enum
import io
import itertools
import os
from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels

BRUTE_FORCE_LIMIT = 10**6


class StatKind(str, enum.Enum):
    INTEGRAL = "integral"
    SUPREMUM = "sup"

    @classmethod
    def parse(cls, value: "str | StatKind") -> "StatKind":
        if isinstance(value, StatKind):
            return value
        key = str(value).strip().lower()
        aliases = {"i": "integral", "int": "integral", "d": "sup", "supremum": "sup", "kolmogorov": "sup"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown statistic {value!r}; expected 'integral' or 'sup'") from None


class SampleError(ValueError):
    """Invalid observations; ``lineno`` points into the source file when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Sample:
    """Sorted, validated observations on ``[1, inf)``.

    The underlying array is read-only so a sample can be shared freely.
    """

    values: np.ndarray

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64).ravel()
        if arr.size == 0:
            raise SampleError("sample is empty")
        if not np.all(np.isfinite(arr)):
            raise SampleError("observations must be finite")
        if np.any(arr < 1.0):
            raise SampleError("observations must lie in the support [1, inf)")
        arr.sort()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def has_ties(self) -> bool:
        return bool(np.any(self.values[1:] == self.values[:-1]))

    def __len__(self) -> int:
        return self.n

    def power(self, c: float) -> "Sample":
        """The sample under ``x -> x**c``."""
        return Sample(self.values**c)


def as_sample(data) -> Sample:
    return data if isinstance(data, Sample) else Sample(data)


def read_sample(source) -> Sample:
    """Parse one observation per line; blank lines and ``#`` comments are skipped.

    ``source`` is a path, an open text stream, or ``"-"`` for stdin.
    """
    if source == "-":
        import sys

        return _parse_lines(sys.stdin)
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return _parse_lines(fh)
    return _parse_lines(source)


def parse_sample(text: str) -> Sample:
    return _parse_lines(io.StringIO(text))


def _parse_lines(lines) -> Sample:
    values = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            raise SampleError(f"cannot parse {line!r} as a number", lineno) from None
        if not np.isfinite(v):
            raise SampleError(f"observation {line!r} is not finite", lineno)
        if v < 1.0:
            raise SampleError(f"observation {v:g} is outside the support [1, inf)", lineno)
        values.append(v)
    if not values:
        raise SampleError("no observations found")
    return Sample(values)


def _check_order(n: int, k: int, minimum: int) -> None:
    if k < 2:
        raise ValueError(f"order k must be at least 2, got {k}")
    if n < minimum:
        raise ValueError(f"need at least {minimum} observations for k={k}, got n={n}")


# --------------------------------------------------------------------------
# atoms of H_n


@dataclass(frozen=True)
class RatioAtoms:
    """Jump locations and weights of ``H_n``, in pair order.

    ``lower[i] < upper[i]`` are the 0-based sorted positions of the pair that
    produced ``t[i] = x[upper] / x[lower]``.
    """

    t: np.ndarray
    weight: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def sorted(self) -> tuple[np.ndarray, np.ndarray]:
        """Atom locations in ascending order and the cumulative weight up to each."""
        order = np.argsort(self.t, kind="mergesort")
        return self.t[order], np.cumsum(self.weight[order])

    def cdf(self, t):
        """``H_n(t) = sum of weights with atom < t``."""
        locs, cum = self.sorted()
        t_arr = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(locs, t_arr, side="left")
        out = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
        out = np.minimum(out, 1.0)
        return float(out) if out.ndim == 0 else out


def pair_weight_numerators(n: int, k: int) -> list[int]:
    """Exact integer counts ``C(a, k-2)`` for lower position ``a`` (0-based)."""
    return [comb(a, k - 2) for a in range(n)]


def ratio_atoms(sample, k: int) -> RatioAtoms:
    s = as_sample(sample)
    n = s.n
    _check_order(n, k, k)
    w = _kernels.pair_weights(n, k)
    a, b = np.triu_indices(n, 1)
    keep = a >= k - 2
    a, b = a[keep], b[keep]
    x = s.values
    return RatioAtoms(t=x[b] / x[a], weight=w[a], lower=a, upper=b)


def u_empirical_cdf(sample, k: int, t):
    return ratio_atoms(sample, k).cdf(t)


def empirical_cdf(sample, t):
    """``F_n(t)`` with the strict indicator ``1{X_i < t}``."""
    s = as_sample(sample)
    t_arr = np.asarray(t, dtype=np.float64)
    out = np.searchsorted(s.values, t_arr, side="left") / s.n
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class StatisticResult:
    kind: StatKind
    k: int
    n: int
    value: float
    argmax_t: float | None = None
    p_value: float | None = None

    def with_p_value(self, p: float) -> "StatisticResult":
        return StatisticResult(self.kind, self.k, self.n, self.value, self.argmax_t, p)

    def to_dict(self) -> dict:
        return {
            "statistic": self.kind.value,
            "k": self.k,
            "n": self.n,
            "value": self.value,
            "argmax_t": self.argmax_t,
            "p_value": self.p_value,
        }


def _fn_term(x: np.ndarray) -> float:
    # sum_i F_n(X_i) * n = #{(i, j) : X_j < X_i}; equals n(n-1)/2 without ties
    return float(np.searchsorted(x, x, side="left").sum())


def integral_value(x: np.ndarray, k: int) -> float:
    """``I_n`` for an already sorted float64 array (no validation)."""
    n = x.shape[0]
    w = _kernels.pair_weights(n, k)
    h_sum = _kernels.integral_count(x, w)
    return (h_sum - _fn_term(x) / n) / n


def sup_value(x: np.ndarray, k: int) -> tuple[float, float]:
    """``(D_n, argmax t)`` for an already sorted float64 array (no validation)."""
    w = _kernels.pair_weights(x.shape[0], k)
    d, t = _kernels.sup_scan(x, w)
    return float(d), float(t)


def integral_statistic(sample, k: int = 3) -> StatisticResult:
    """``I_n^{(k)}``; needs ``n >= k + 1``."""
    s = as_sample(sample)
    _check_order(s.n, k, k + 1)
    return StatisticResult(StatKind.INTEGRAL, k, s.n, integral_value(s.values, k))


def integral_null_mean(k: int, n: int) -> float:
    """Exact null expectation of ``I_n``: ``(1/2 + 1/(k+1)) / n``.

    ``I_n`` averages ``H_n`` over the sample points themselves, so a point
    can belong to the subset it is compared with.  That overlap, together
    with ``sum F_n(X_i) = (n-1)/2``, leaves this ``O(1/n)`` offset.
    """
    _check_order(n, k, k + 1)
    return (0.5 + 1.0 / (k + 1)) / n


def sup_statistic(sample, k: int = 3) -> StatisticResult:
    """``D_n^{(k)}`` and the location where the supremum is attained.

    Both step functions use strict indicators, so each is left-continuous and
    the supremum is attained at one of the jump points (atoms or
    observations); ``argmax_t`` is that jump point.
    """
    s = as_sample(sample)
    _check_order(s.n, k, k)
    d, t = sup_value(s.values, k)
    return StatisticResult(StatKind.SUPREMUM, k, s.n, d, argmax_t=t)


def compute_statistic(kind, sample, k: int = 3) -> StatisticResult:
    kind = StatKind.parse(kind)
    if kind is StatKind.INTEGRAL:
        return integral_statistic(sample, k)
    return sup_statistic(sample, k)


def statistic_value(kind: StatKind, x: np.ndarray, k: int) -> float:
    """Raw statistic value for a sorted array; used by the simulation engine."""
    if kind is StatKind.INTEGRAL:
        return integral_value(x, k)
    return sup_value(x, k)[0]


# --------------------------------------------------------------------------
# brute-force oracle


def brute_force_H(sample, k: int, t) -> float:
    """``H_n(t)`` by literal enumeration of all k-subsets.

    Exponential in ``k``; refuses when ``C(n, k)`` exceeds ``10**6``.
    """
    s = as_sample(sample)
    n = s.n
    _check_order(n, k, k)
    total = comb(n, k)
    if total > BRUTE_FORCE_LIMIT:
        raise ValueError(f"C({n}, {k}) = {total} subsets exceeds the enumeration guard")
    x = s.values
    count = 0
    for subset in itertools.combinations(range(n), k):
        top = sorted(x[list(subset)])
        if top[-1] / top[-2] < t:
            count += 1
    return count / total
