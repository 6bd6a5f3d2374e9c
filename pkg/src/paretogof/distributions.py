"""Pareto null family and the perturbed alternatives used for efficiency work.

All alternatives are built on the unit-shape Pareto law ``F(x) = 1 - 1/x``
on ``[1, inf)``; the statistics are invariant under ``x -> x**c`` so the
shape never has to be estimated.

Alternatives (``theta = 0`` recovers the null):

* ``LP1``: ``G(x) = F(x) exp(-theta (1 - F(x)))``, ``theta >= 0``
* ``LP2``: ``G(x) = F(x) - theta sin(pi F(x))``, ``0 <= theta <= 1/pi``
* ``LOGWEIBULL``: ``G(x) = 1 - exp(-(ln x)**(1 + theta))``, ``0 <= theta < 1``
"""

from __future__ import annotations

import enum
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .quadrature import integrate_tail

SeedLike = int | np.random.Generator | np.random.SeedSequence | None


class Family(str, enum.Enum):
    PARETO = "pareto"
    LP1 = "lp1"
    LP2 = "lp2"
    LOGWEIBULL = "logweibull"

    @classmethod
    def parse(cls, value: "str | Family") -> "Family":
        if isinstance(value, Family):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"lw": "logweibull", "null": "pareto"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown family {value!r}; expected one of {[f.value for f in cls]}") from None


ALTERNATIVES = (Family.LP1, Family.LP2, Family.LOGWEIBULL)


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_support(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(x)) or np.any(x < 1.0):
        raise ValueError("x must lie in the support [1, inf)")
    return x


def _scalar_or_array(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class ParetoParams:
    lam: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"Pareto shape must be positive, got {self.lam!r}")


def pareto_cdf(x, lam: float = 1.0):
    """``1 - x**(-lam)`` for ``x >= 1``."""
    ParetoParams(lam)
    x = _check_support(x)
    return _scalar_or_array(-np.expm1(-lam * np.log(x)))


def pareto_pdf(x, lam: float = 1.0):
    ParetoParams(lam)
    x = _check_support(x)
    return _scalar_or_array(lam * x ** (-lam - 1.0))


def pareto_ppf(u, lam: float = 1.0):
    ParetoParams(lam)
    u = np.asarray(u, dtype=np.float64)
    if np.any((u < 0) | (u >= 1)):
        raise ValueError("u must lie in [0, 1)")
    return _scalar_or_array(np.exp(-np.log1p(-u) / lam))


def pareto_sample(n: int, lam: float = 1.0, seed: SeedLike = None) -> np.ndarray:
    """``n`` i.i.d. Pareto draws by inversion, ``x = (1 - u)**(-1/lam)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    u = _rng(seed).random(n)
    return pareto_ppf(u, lam)


# --------------------------------------------------------------------------
# alternatives


@dataclass(frozen=True)
class AlternativeSpec:
    """One member of an alternative family.

    ``theta`` is the perturbation size; for ``Family.PARETO`` it is ignored
    and ``lam`` is the shape.
    """

    family: Family = Family.PARETO
    theta: float = 0.0
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        th = float(self.theta)
        object.__setattr__(self, "theta", th)
        if not np.isfinite(th) or th < 0:
            raise ValueError(f"theta must be a nonnegative real, got {self.theta!r}")
        if self.family is Family.LP2 and th > 1.0 / np.pi:
            raise ValueError("LP2 requires theta in [0, 1/pi]")
        if self.family is Family.LOGWEIBULL and th >= 1.0:
            raise ValueError("log-Weibull requires theta in [0, 1)")
        if self.family is Family.PARETO:
            ParetoParams(self.lam)
        elif self.lam != 1.0:
            raise ValueError("alternative families are defined for lam = 1 only")

    @property
    def is_null(self) -> bool:
        return self.family is Family.PARETO or self.theta == 0.0

    def cdf(self, x):
        return alt_cdf(self, x)

    def pdf(self, x):
        return alt_pdf(self, x)

    def ppf(self, u):
        return alt_ppf(self, u)

    def sample(self, n: int, seed: SeedLike = None) -> np.ndarray:
        return alt_sample(self, n, seed)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "theta": self.theta, "lam": self.lam}


def _g_of_p(family: Family, theta: float, p):
    """Alternative CDF written as a function of ``p = F(x)``."""
    if family is Family.LP1:
        return p * np.exp(-theta * (1.0 - p))
    if family is Family.LP2:
        return p - theta * np.sin(np.pi * p)
    raise AssertionError(family)


def _dg_dp(family: Family, theta: float, p):
    if family is Family.LP1:
        return np.exp(-theta * (1.0 - p)) * (1.0 + theta * p)
    if family is Family.LP2:
        return 1.0 - theta * np.pi * np.cos(np.pi * p)
    raise AssertionError(family)


def alt_cdf(spec: AlternativeSpec, x):
    x = _check_support(x)
    fam, th = spec.family, spec.theta
    if fam is Family.PARETO:
        return pareto_cdf(x, spec.lam)
    if fam is Family.LOGWEIBULL:
        lx = np.log(x)
        return _scalar_or_array(-np.expm1(-(lx ** (1.0 + th))))
    p = -np.expm1(-np.log(x))
    return _scalar_or_array(_g_of_p(fam, th, p))


def alt_pdf(spec: AlternativeSpec, x):
    x = _check_support(x)
    fam, th = spec.family, spec.theta
    if fam is Family.PARETO:
        return pareto_pdf(x, spec.lam)
    if fam is Family.LOGWEIBULL:
        beta = 1.0 + th
        lx = np.log(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = beta * lx**th * np.exp(-(lx**beta)) / x
        if th == 0:
            dens = np.where(x == 1.0, 1.0, dens)
        return _scalar_or_array(np.nan_to_num(dens, nan=0.0))
    p = 1.0 - 1.0 / x
    return _scalar_or_array(_dg_dp(fam, th, p) / (x * x))


def _invert_in_p(family: Family, theta: float, u: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Solve ``G(p) = u`` on ``[0, 1]``: Newton steps safeguarded by bisection."""
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    p = u.copy()
    for _ in range(200):
        gp = _g_of_p(family, theta, p) - u
        done = np.abs(gp) <= tol
        if np.all(done):
            return p
        lo = np.where(gp < 0, p, lo)
        hi = np.where(gp > 0, p, hi)
        slope = _dg_dp(family, theta, p)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p - gp / slope
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        step = np.where(bad, 0.5 * (lo + hi), step)
        p = np.where(done, p, step)
    raise RuntimeError("CDF inversion did not converge")  # pragma: no cover


def alt_ppf(spec: AlternativeSpec, u):
    u = np.asarray(u, dtype=np.float64)
    if np.any((u < 0) | (u >= 1)):
        raise ValueError("u must lie in [0, 1)")
    fam, th = spec.family, spec.theta
    if fam is Family.PARETO or th == 0.0:
        return pareto_ppf(u, spec.lam if fam is Family.PARETO else 1.0)
    if fam is Family.LOGWEIBULL:
        return _scalar_or_array(np.exp((-np.log1p(-u)) ** (1.0 / (1.0 + th))))
    p = _invert_in_p(fam, th, np.atleast_1d(u).astype(np.float64))
    with np.errstate(divide="ignore"):
        x = 1.0 / (1.0 - p)
    x = np.maximum(x, 1.0)
    return _scalar_or_array(x.reshape(u.shape))


def alt_sample(spec: AlternativeSpec, n: int, seed: SeedLike = None) -> np.ndarray:
    """``n`` i.i.d. draws from ``spec`` by inverse-transform sampling."""
    if n < 1:
        raise ValueError("n must be at least 1")
    u = _rng(seed).random(n)
    return np.asarray(alt_ppf(spec, u), dtype=np.float64)


# --------------------------------------------------------------------------
# score functions: derivatives in theta at theta = 0


def score_H(family, x):
    """``dG/dtheta`` at ``theta = 0`` (CDF-level score)."""
    fam = Family.parse(family)
    x = _check_support(x)
    p = 1.0 - 1.0 / x
    if fam is Family.PARETO:
        out = np.zeros_like(x)
    elif fam is Family.LP1:
        out = -p * (1.0 - p)
    elif fam is Family.LP2:
        out = -np.sin(np.pi * p)
    else:
        lx = np.log(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x > 1.0, lx * np.log(lx) / x, 0.0)
    return _scalar_or_array(out)


def score_h(family, x):
    """Density score ``h(x) = dg/dtheta`` at ``theta = 0``.

    The log-Weibull score has an integrable logarithmic singularity at
    ``x = 1``; the value there is set to 0 by convention.
    """
    fam = Family.parse(family)
    x = _check_support(x)
    if fam is Family.PARETO:
        out = np.zeros_like(x)
    elif fam is Family.LP1:
        out = (x - 2.0) / x**3
    elif fam is Family.LP2:
        out = -np.pi * np.cos(np.pi * (1.0 - 1.0 / x)) / (x * x)
    else:
        lx = np.log(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            llx = np.log(lx)
            out = np.where(x > 1.0, (llx * (1.0 - lx) + 1.0) / (x * x), 0.0)
    return _scalar_or_array(out)


def score_function(family) -> Callable[[float], float]:
    fam = Family.parse(family)
    return lambda x: score_h(fam, x)


@dataclass
class CenteredScore:
    """``h0(x) = h(x) - (ln x - 1) / x**2 * c`` with ``c = int h(u) ln u du``.

    Removing the ``(ln x - 1) / x**2`` component makes the score orthogonal
    to the Pareto shape direction.
    """

    h: Callable[[float], float]
    log_moment: float = field(init=False)

    def __post_init__(self):
        self.log_moment = integrate_tail(lambda u: self.h(u) * np.log(u))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        val = np.asarray(self.h(x)) - (np.log(x) - 1.0) / (x * x) * self.log_moment
        return _scalar_or_array(val)


def h0_transform(h) -> CenteredScore:
    if isinstance(h, (str, Family)):
        h = score_function(h)
    return CenteredScore(h)
