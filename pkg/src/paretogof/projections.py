"""Projections of the statistic kernels and their null variances.

``psi(k, s)`` is the conditional mean of the integral kernel given one
argument equals ``s``; ``xi(k, s, t)`` is the same for the family of kernels
behind the supremum statistic.  Their second moments under the unit Pareto
density ``s**-2`` drive every asymptotic quantity in :mod:`asymptotics`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .quadrature import integrate_tail, maximize_on_log_grid

T_MAX = 1e3


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class VarianceResult:
    value: float
    method: Method

    def __float__(self) -> float:
        return self.value


DELTA_SQ_INTEGRAL_EXACT = {3: Fraction(11, 1920), 4: Fraction(271, 52500)}


def _check_k(k: int) -> None:
    if int(k) != k or k < 2:
        raise ValueError(f"order k must be an integer >= 2, got {k!r}")


def _check_ge1(name: str, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if np.any(np.isnan(v)) or np.any(v < 1.0):
        raise ValueError(f"{name} must be >= 1")
    return v


def _out(v: np.ndarray):
    return float(v) if v.ndim == 0 else v


def _neumaier_sum(terms: list[np.ndarray]) -> np.ndarray:
    total = np.zeros_like(terms[0])
    comp = np.zeros_like(terms[0])
    for term in terms:
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
    return total + comp


def psi(k: int, s):
    """Projection of the integral kernel of order ``k`` at ``s >= 1``."""
    _check_k(k)
    s = _check_ge1("s", s)
    f = 1.0 - 1.0 / s
    head = (k * f ** (k - 1) - 1.0) / (2.0 * (k + 1)) - (k - 1) / (k + 1) * f + k * (k - 1) / (k + 1) * np.log(s) / s
    if k > 2:
        # alternating binomial sum; terms nearly cancel for s close to 1
        terms = [(-1) ** j * comb(k - 1, j) * (-np.expm1(-(j - 1) * np.log(s))) / (j - 1) for j in range(2, k)]
        head = head - k / (s * (k + 1)) * _neumaier_sum([np.asarray(t, dtype=np.float64) for t in terms])
    return _out(np.asarray(head))


def psi_closed_form(k: int, s):
    """Simplified ``psi`` for ``k`` in ``{3, 4}``."""
    s = _check_ge1("s", s)
    ls = np.log(s)
    if k == 3:
        return _out(9.0 / (8.0 * s**2) + 3.0 * ls / (2.0 * s) - 1.0 / s - 0.25)
    if k == 4:
        return _out(12.0 * ls / (5.0 * s) - 4.0 / (5.0 * s**3) + 18.0 / (5.0 * s**2) - 13.0 / (5.0 * s) - 0.3)
    raise ValueError("closed form available for k in {3, 4} only")


def xi(k: int, s, t):
    """Projection of the supremum-statistic kernel at threshold ``t``."""
    _check_k(k)
    s = _check_ge1("s", s)
    t = _check_ge1("t", t)
    val = ((1.0 - 1.0 / s) ** (k - 1) - 1.0 / k) / t
    val = val - np.where(s >= t, (1.0 - t / s) ** (k - 1) - 1.0 / k, 0.0)
    return _out(np.asarray(val))


def delta_sq_sup_closed_form(k: int, t):
    t = _check_ge1("t", t)
    if k == 3:
        return _out((4 * t**3 + 4 * t**2 - 15 * t + 7) / (45 * t**4))
    if k == 4:
        return _out((45 * t**4 + 45 * t**3 - 252 * t**2 + 224 * t - 62) / (560 * t**5))
    raise ValueError("closed form available for k in {3, 4} only")


@lru_cache(maxsize=None)
def _delta_sq_integral_quad(k: int) -> float:
    return integrate_tail(lambda s: psi(k, s) ** 2 / (s * s), tol=1e-12)


def delta_sq_integral(k: int, method: str | Method = "auto") -> VarianceResult:
    """``Var psi_k(X)`` under the null.  Exact rationals are known for k = 3, 4."""
    _check_k(k)
    method = str(getattr(method, "value", method))
    if method in ("auto", Method.CLOSED_FORM.value) and k in DELTA_SQ_INTEGRAL_EXACT:
        return VarianceResult(float(DELTA_SQ_INTEGRAL_EXACT[k]), Method.CLOSED_FORM)
    if method == Method.CLOSED_FORM.value:
        raise ValueError("closed form available for k in {3, 4} only")
    return VarianceResult(_delta_sq_integral_quad(k), Method.QUADRATURE)


def _delta_sq_sup_quad(k: int, t: float) -> float:
    if t == 1.0:
        return 0.0
    return integrate_tail(lambda s: xi(k, s, t) ** 2 / (s * s), breakpoints=(t,), tol=1e-12)


def delta_sq_sup_t(k: int, t: float, method: str | Method = "auto") -> VarianceResult:
    """``Var xi_k(X; t)`` under the null."""
    _check_k(k)
    t = float(_check_ge1("t", t))
    method = str(getattr(method, "value", method))
    if method in ("auto", Method.CLOSED_FORM.value) and k in (3, 4):
        return VarianceResult(delta_sq_sup_closed_form(k, t), Method.CLOSED_FORM)
    if method == Method.CLOSED_FORM.value:
        raise ValueError("closed form available for k in {3, 4} only")
    return VarianceResult(_delta_sq_sup_quad(k, t), Method.QUADRATURE)


@lru_cache(maxsize=None)
def delta_sq_sup(k: int) -> tuple[float, float]:
    """``(t_star, sup_t Var xi_k(X; t))`` over ``t`` in ``[1, 1000]``.

    The variance vanishes at ``t = 1`` and decays like ``1/t``, so the
    maximum is interior.
    """
    _check_k(k)
    t_star, value = maximize_on_log_grid(lambda t: delta_sq_sup_t(k, t).value, 1.0, T_MAX)
    if not 1.0 < t_star < T_MAX:
        raise ArithmeticError(f"no interior maximiser of the supremum variance for k={k}")
    return t_star, value
