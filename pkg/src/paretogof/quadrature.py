"""Numerical integration over ``[a, inf)`` and bounded 1-D maximisation."""

from __future__ import annotations

import warnings
from collections.abc import Callable, Iterable

import numpy as np
from scipy import integrate, optimize


class QuadratureError(ArithmeticError):
    """Raised when an integral cannot be resolved to the requested accuracy."""


def integrate_tail(
    f: Callable[[float], float],
    lower: float = 1.0,
    breakpoints: Iterable[float] = (),
    tol: float = 1e-10,
) -> float:
    """Integrate ``f`` over ``[lower, inf)``.

    The domain is mapped onto ``[0, 1)`` through ``s = lower / (1 - v)`` and
    the result is computed with adaptive Gauss-Kronrod (QUADPACK).  Kinks of
    the integrand should be passed as ``breakpoints`` in the original
    variable.

    Raises
    ------
    QuadratureError
        If the integral is not finite or the error estimate exceeds ``tol``.
    """

    def g(v):
        one_minus = 1.0 - v
        return f(lower / one_minus) * lower / (one_minus * one_minus)

    points = sorted(1.0 - lower / p for p in breakpoints if p > lower and np.isfinite(p))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            g,
            0.0,
            1.0,
            points=points or None,
            epsabs=tol * 1e-2,
            epsrel=1e-13,
            limit=400,
        )
    if not np.isfinite(value) or abserr > tol:
        raise QuadratureError(f"integral did not converge (value={value!r}, error estimate={abserr:.3g})")
    return float(value)


def maximize_on_log_grid(
    f: Callable[[float], float],
    lower: float = 1.0,
    upper: float = 1e3,
    num: int = 160,
    xtol: float = 1e-10,
) -> tuple[float, float]:
    """Return ``(argmax, max)`` of ``f`` on ``[lower, upper]``.

    ``f`` is scanned on a logarithmic grid; the best grid cell is then refined
    by golden-section search in ``log t``.  The golden-section tolerance is
    relative, so ``xtol=1e-10`` resolves the argmax far below ``1e-6``.
    """
    u = np.linspace(np.log(lower), np.log(upper), num)
    vals = np.array([f(float(np.exp(ui))) for ui in u])
    i = int(np.argmax(vals))
    if i == 0 or i == num - 1:
        return float(np.exp(u[i])), float(vals[i])
    res = optimize.minimize_scalar(
        lambda ui: -f(float(np.exp(ui))),
        bracket=(u[i - 1], u[i], u[i + 1]),
        method="golden",
        tol=xtol,
    )
    if -res.fun >= vals[i]:
        return float(np.exp(res.x)), float(-res.fun)
    return float(np.exp(u[i])), float(vals[i])
