"""Local Bahadur efficiency of the integral and supremum statistics.

For an alternative with density score ``h`` (derivative of the density in
``theta`` at ``theta = 0``) every quantity is the leading coefficient of its
small-``theta`` expansion:

* slope ``b(theta) ~ slope_coef * theta``
    - integral: ``(k+1) * int psi_k h``
    - supremum: ``sup_t |k * int xi_k(.; t) h|``
* exact slope ``c(theta) ~ exact_slope_coef * theta**2``
    - integral: ``b**2 / ((k+1)**2 Delta_k**2)``
    - supremum: ``b**2 / (k**2 delta_k**2)``
* Kullback-Leibler ``K(theta) ~ kl_coef * theta**2`` with
  ``kl_coef = (int h**2 x**2 - (int h ln x)**2) / 2``

and the efficiency is ``exact_slope_coef / (2 kl_coef)``, bounded by 1.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Callable, Iterable
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .distributions import ALTERNATIVES, Family, score_function
from .projections import T_MAX, delta_sq_integral, delta_sq_sup, psi, xi
from .quadrature import integrate_tail, maximize_on_log_grid
from .ustat import StatKind

Score = Callable[[float], float]


def _score(family_or_h) -> Score:
    if callable(family_or_h):
        return family_or_h
    return score_function(family_or_h)


def _breaks(h: Score, *extra: float) -> tuple[float, ...]:
    # jump points of a score are advertised through a ``breakpoints`` attribute
    return (*getattr(h, "breakpoints", ()), *extra)


def _variance(kind: StatKind, k: int) -> float:
    if kind is StatKind.INTEGRAL:
        return delta_sq_integral(k).value
    return delta_sq_sup(k)[1]


def _scale(kind: StatKind, k: int) -> int:
    # degree of the U-statistic: k+1 for the integral kernel, k for the family
    return k + 1 if kind is StatKind.INTEGRAL else k


def ld_rate_coef(kind, k: int) -> float:
    """Coefficient ``r`` in ``f(a) ~ r a**2`` for the null large-deviation rate."""
    kind = StatKind.parse(kind)
    var = _variance(kind, k)
    if not var > 0:
        raise ArithmeticError("degenerate kernel: zero projection variance")
    return 1.0 / (2.0 * _scale(kind, k) ** 2 * var)


def _slope_integral(k: int, h: Score) -> float:
    return (k + 1) * integrate_tail(lambda s: psi(k, s) * h(s), breakpoints=_breaks(h))


# k * int xi_k(s; t) h(s) ds splits into A / t - B(t) with
#   A    = int_1^inf ((1 - 1/s)**(k-1) - 1/k) h(s) ds      (independent of t)
#   B(t) = int_t^inf ((1 - t/s)**(k-1) - 1/k) h(s) ds
# so a singular score near s = 1 is integrated once, not once per t.


def _sup_head(k: int, h: Score) -> float:
    return integrate_tail(lambda s: ((1.0 - 1.0 / s) ** (k - 1) - 1.0 / k) * h(s), breakpoints=_breaks(h))


def _slope_sup_t(k: int, h: Score, t: float, head: float | None = None) -> float:
    if t == 1.0:
        return 0.0
    if head is None:
        head = _sup_head(k, h)
    tail = integrate_tail(lambda s: ((1.0 - t / s) ** (k - 1) - 1.0 / k) * h(s), lower=t, breakpoints=_breaks(h))
    return k * (head / t - tail)


def _slope_sup(k: int, h: Score) -> tuple[float, float]:
    head = _sup_head(k, h)
    t_max, coef = maximize_on_log_grid(lambda t: abs(_slope_sup_t(k, h, t, head)), 1.0, T_MAX)
    return t_max, coef


@lru_cache(maxsize=None)
def _slope_integral_family(k: int, family: Family) -> float:
    return _slope_integral(k, score_function(family))


@lru_cache(maxsize=None)
def _slope_sup_family(k: int, family: Family) -> tuple[float, float]:
    return _slope_sup(k, score_function(family))


def slope_coef_integral(k: int, family) -> float:
    if callable(family):
        return _slope_integral(k, family)
    return _slope_integral_family(k, Family.parse(family))


def slope_coef_sup_t(k: int, family, t: float) -> float:
    """Signed slope coefficient of ``H_n(t) - F_n(t)`` at a fixed ``t``."""
    return _slope_sup_t(k, _score(family), float(t))


def slope_coef_sup(k: int, family) -> tuple[float, float]:
    """``(t_max, sup_t |b(t)|)`` for the supremum statistic."""
    if callable(family):
        return _slope_sup(k, family)
    return _slope_sup_family(k, Family.parse(family))


def _kl_coef(h: Score) -> float:
    second = integrate_tail(lambda x: h(x) ** 2 * x * x, breakpoints=_breaks(h))
    log_moment = integrate_tail(lambda x: h(x) * np.log(x), breakpoints=_breaks(h))
    return 0.5 * (second - log_moment**2)


@lru_cache(maxsize=None)
def _kl_coef_family(family: Family) -> float:
    return _kl_coef(score_function(family))


def kl_coef(family) -> float:
    """``kappa`` with ``K(theta) ~ kappa theta**2``."""
    if callable(family):
        return _kl_coef(family)
    return _kl_coef_family(Family.parse(family))


@dataclass(frozen=True)
class EfficiencyReport:
    kind: StatKind
    k: int
    family: str
    slope_coef: float
    exact_slope_coef: float
    kl_coef: float
    efficiency: float
    variance: float
    t_max: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


def local_efficiency(kind, k: int, family, label: str | None = None) -> EfficiencyReport:
    kind = StatKind.parse(kind)
    if callable(family):
        name = label or getattr(family, "__name__", "custom")
    else:
        family = Family.parse(family)
        name = family.value
    var = _variance(kind, k)
    if kind is StatKind.INTEGRAL:
        b, t_max = slope_coef_integral(k, family), None
    else:
        t_max, b = slope_coef_sup(k, family)
    c = b * b / (_scale(kind, k) ** 2 * var)
    kappa = kl_coef(family)
    if not kappa > 0:
        raise ArithmeticError("zero Kullback-Leibler coefficient: the alternative is locally Pareto")
    return EfficiencyReport(kind, k, name, b, c, kappa, c / (2.0 * kappa), var, t_max)


def efficiency_table(
    kinds: Iterable = (StatKind.INTEGRAL, StatKind.SUPREMUM),
    ks: Iterable[int] = (3, 4),
    families: Iterable = ALTERNATIVES,
) -> list[EfficiencyReport]:
    return [local_efficiency(kind, k, fam) for kind in kinds for k in ks for fam in families]


def best_k(reports: Iterable[EfficiencyReport]) -> dict[tuple[str, str], EfficiencyReport]:
    """Most efficient order for every (statistic, family) pair."""
    best: dict[tuple[str, str], EfficiencyReport] = {}
    for r in reports:
        key = (r.kind.value, r.family)
        if key not in best or r.efficiency > best[key].efficiency:
            best[key] = r
    return best


def reports_to_json(reports: Iterable[EfficiencyReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)


def reports_to_csv(reports: Iterable[EfficiencyReport]) -> str:
    rows = [r.to_dict() for r in reports]
    buf = io.StringIO()
    cols = ["kind", "k", "family", "slope_coef", "exact_slope_coef", "kl_coef", "efficiency", "variance", "t_max"]
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# locally optimal alternatives


@dataclass(frozen=True)
class _Scored:
    fn: Score
    breakpoints: tuple[float, ...] = ()

    def __call__(self, x):
        return self.fn(x)


@dataclass(frozen=True)
class LaoSpec:
    """Alternative with score ``x**-2 (c_proj * p(x) + c_log * (ln x - 1))``.

    ``p`` is ``psi_k`` for the integral statistic and ``xi_k(.; t0)`` for the
    supremum statistic; ``t0`` defaults to the maximiser of the supremum
    variance, which is where the statistic is optimal.
    """

    kind: StatKind
    k: int = 3
    c_proj: float = 1.0
    c_log: float = 0.0
    t0: float | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", StatKind.parse(self.kind))
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if not self.c_proj > 0:
            raise ValueError("c_proj must be positive")
        if self.kind is StatKind.SUPREMUM:
            if self.t0 is None:
                object.__setattr__(self, "t0", delta_sq_sup(self.k)[0])
            elif self.t0 < 1:
                raise ValueError("t0 must be >= 1")
        elif self.t0 is not None:
            raise ValueError("t0 applies to the supremum statistic only")

    def projection(self, x):
        if self.kind is StatKind.INTEGRAL:
            return psi(self.k, x)
        return xi(self.k, x, self.t0)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.t0,) if self.kind is StatKind.SUPREMUM else ()

    def score_function(self) -> Score:
        """The score as a callable that carries its jump points."""
        return _Scored(self.score, self.breakpoints)

    def score(self, x):
        x = np.asarray(x, dtype=np.float64)
        val = (self.c_proj * np.asarray(self.projection(x)) + self.c_log * (np.log(x) - 1.0)) / (x * x)
        return float(val) if val.ndim == 0 else val


def max_admissible_theta(spec: LaoSpec) -> float:
    """Largest ``theta`` keeping ``1 + theta * perturbation`` nonnegative."""
    x = np.concatenate([np.linspace(1.0, 10.0, 4001), np.geomspace(10.0, 1e12, 4000)])
    if spec.kind is StatKind.SUPREMUM:
        x = np.sort(np.append(x, [spec.t0, np.nextafter(spec.t0, 0.0)]))
        x = x[x >= 1.0]
    pert = spec.score(x) * x * x
    if spec.c_log < 0:
        return 0.0  # perturbation tends to -inf
    low = pert.min()
    return np.inf if low >= 0 else float(-1.0 / low)


def lao_density(spec: LaoSpec, theta: float, x):
    """``x**-2 (1 + theta * (c_proj p(x) + c_log (ln x - 1)))``."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if theta > max_admissible_theta(spec):
        raise ValueError(f"theta={theta} makes the density negative; reduce theta")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 1):
        raise ValueError("x must lie in [1, inf)")
    val = 1.0 / (x * x) + theta * np.asarray(spec.score(x))
    return float(val) if val.ndim == 0 else val


def lao_efficiency_check(spec: LaoSpec) -> float:
    """Local efficiency of the matching statistic against its own LAO family."""
    report = local_efficiency(spec.kind, spec.k, spec.score_function(), label="lao")
    return report.efficiency
