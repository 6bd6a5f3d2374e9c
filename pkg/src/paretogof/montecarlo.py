"""Seeded simulation of the statistics: null distributions, critical values, power.

Replicate ``r`` of a plan with master seed ``s`` always draws its sample from
``SeedSequence(s, spawn_key=(r,))``, so results do not depend on how the
replicates are spread across worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import stats

from .distributions import AlternativeSpec, Family, alt_sample
from .projections import delta_sq_integral
from .ustat import StatisticResult, StatKind, integral_null_mean, statistic_value

log = logging.getLogger(__name__)

DEFAULT_LEVELS = (0.1, 0.05, 0.01)
DEFAULT_SIZES = (10, 20, 30, 40, 50, 100)
DEFAULT_REPS = 10_000
FORMAT_VERSION = 1
QUANTILE_RULE = "order statistic ceil(reps * (1 - level)), 1-based"


@dataclass(frozen=True)
class SimulationPlan:
    kind: StatKind
    k: int = 3
    n: int = 20
    reps: int = DEFAULT_REPS
    seed: int = 0
    alternative: AlternativeSpec = field(default_factory=AlternativeSpec)
    levels: tuple[float, ...] = DEFAULT_LEVELS

    def __post_init__(self):
        object.__setattr__(self, "kind", StatKind.parse(self.kind))
        object.__setattr__(self, "levels", tuple(float(a) for a in self.levels))
        if self.k < 2:
            raise ValueError("k must be at least 2")
        need = self.k + 1 if self.kind is StatKind.INTEGRAL else self.k
        if self.n < need:
            raise ValueError(f"n={self.n} too small for the {self.kind.value} statistic with k={self.k}")
        if self.reps < 1:
            raise ValueError("reps must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if not self.levels or any(not 0 < a < 1 for a in self.levels):
            raise ValueError("levels must lie in (0, 1)")
        if any(b >= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("levels must be strictly decreasing")

    def null_key(self) -> dict:
        """Fields that determine the simulated values (levels excluded)."""
        return {
            "version": FORMAT_VERSION,
            "kind": self.kind.value,
            "k": self.k,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "alternative": self.alternative.to_dict(),
        }

    def digest(self) -> str:
        blob = json.dumps(self.null_key(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:20]


def child_rng(seed: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


def replicate_sample(plan: SimulationPlan, replicate: int) -> np.ndarray:
    """Sorted sample used by replicate ``replicate`` of ``plan``."""
    x = alt_sample(plan.alternative, plan.n, child_rng(plan.seed, replicate))
    x.sort()
    return x


def _run_chunk(plan: SimulationPlan, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    for i, r in enumerate(range(start, stop)):
        out[i] = statistic_value(plan.kind, replicate_sample(plan, r), plan.k)
    return out


def simulate(plan: SimulationPlan, workers: int | None = 1) -> np.ndarray:
    """Statistic values for every replicate, in replicate order."""
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or plan.reps < 2 * workers:
        return _run_chunk(plan, 0, plan.reps)
    bounds = np.linspace(0, plan.reps, 4 * workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [plan] * (len(bounds) - 1), bounds[:-1], bounds[1:])
        return np.concatenate(list(parts))


# --------------------------------------------------------------------------
# null distributions and tables


@dataclass(frozen=True)
class NullDistribution:
    """Sorted simulated values of one statistic at one sample size."""

    plan: SimulationPlan
    values: np.ndarray

    @property
    def reps(self) -> int:
        return int(self.values.shape[0])

    def quantile(self, level: float) -> float:
        """Upper ``level`` critical value: order statistic ``ceil(reps (1 - level))``."""
        idx = math.ceil(self.reps * (1.0 - level) - 1e-9)
        return float(self.values[min(max(idx, 1), self.reps) - 1])

    def quantile_se(self, level: float) -> float:
        """Distribution-free standard error of :meth:`quantile`.

        Half the spread between the order statistics one binomial standard
        deviation ``sqrt(reps p (1 - p))`` either side of the quantile index.
        """
        p = 1.0 - level
        idx = math.ceil(self.reps * p - 1e-9) - 1
        m = math.sqrt(self.reps * p * (1.0 - p))
        lo = max(0, int(math.floor(idx - m)))
        hi = min(self.reps - 1, int(math.ceil(idx + m)))
        return float(self.values[hi] - self.values[lo]) / 2.0

    def p_value(self, observed: float, atol: float = 1e-12) -> float:
        """Right-tail p-value ``(r + 1) / (reps + 1)``, ``r = #{values >= observed}``.

        ``atol`` absorbs rounding so that equal rational statistic values
        computed along different summation paths still count as ties.
        """
        r = self.reps - int(np.searchsorted(self.values, observed - atol, side="left"))
        return (r + 1) / (self.reps + 1)

    def to_dict(self) -> dict:
        return {
            **self.plan.null_key(),
            "quantile_rule": QUANTILE_RULE,
            "values": [float(v) for v in self.values],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NullDistribution":
        plan = SimulationPlan(
            kind=d["kind"],
            k=d["k"],
            n=d["n"],
            reps=d["reps"],
            seed=d["seed"],
            alternative=AlternativeSpec(**d["alternative"]),
        )
        return cls(plan, np.asarray(d["values"], dtype=np.float64))


def simulate_null_distribution(plan: SimulationPlan, workers: int | None = 1) -> NullDistribution:
    values = np.sort(simulate(plan, workers))
    values.flags.writeable = False
    return NullDistribution(replace(plan, levels=DEFAULT_LEVELS), values)


def default_cache_dir() -> Path:
    env = os.environ.get("PARETOGOF_CACHE_DIR") or os.environ.get("CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "paretogof"


class TableStore:
    """One JSON document per simulated plan, named by the plan digest."""

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, plan: SimulationPlan) -> Path:
        return self.root / f"{plan.kind.value}-k{plan.k}-n{plan.n}-{plan.digest()}.json"

    def load(self, plan: SimulationPlan) -> NullDistribution | None:
        path = self.path(plan)
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as fh:
            dist = NullDistribution.from_dict(json.load(fh))
        if dist.plan.null_key() != plan.null_key():
            log.warning("ignoring cache entry %s: plan mismatch", path)
            return None
        return dist

    def save(self, dist: NullDistribution) -> Path:
        path = self.path(dist.plan)
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(dist.to_dict(), fh)
        os.replace(tmp, path)
        return path

    def get_or_simulate(self, plan: SimulationPlan, workers: int | None = 1) -> NullDistribution:
        dist = self.load(plan)
        if dist is None:
            log.info("simulating %s k=%d n=%d (%d replicates)", plan.kind.value, plan.k, plan.n, plan.reps)
            dist = simulate_null_distribution(plan, workers)
            self.save(dist)
        return dist


@dataclass(frozen=True)
class CriticalValueTable:
    kind: StatKind
    k: int
    reps: int
    seed: int
    levels: tuple[float, ...]
    sizes: tuple[int, ...]
    quantiles: dict[int, tuple[float, ...]]
    std_errors: dict[int, tuple[float, ...]]

    def value(self, n: int, level: float) -> float:
        return self.quantiles[n][self.levels.index(level)]

    def se(self, n: int, level: float) -> float:
        return self.std_errors[n][self.levels.index(level)]

    def monotone_in_n(self) -> bool:
        """Soft diagnostic: do critical values shrink as ``n`` grows?"""
        cols = np.array([self.quantiles[n] for n in self.sizes])
        return bool(np.all(np.diff(cols, axis=0) <= 0))

    def to_dict(self) -> dict:
        return {
            "statistic": self.kind.value,
            "k": self.k,
            "reps": self.reps,
            "seed": self.seed,
            "quantile_rule": QUANTILE_RULE,
            "levels": list(self.levels),
            "rows": [
                {"n": n, "critical_values": list(self.quantiles[n]), "std_errors": list(self.std_errors[n])}
                for n in self.sizes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", *[f"{a:g}" for a in self.levels]])
        for n in self.sizes:
            writer.writerow([n, *[f"{q:.6f}" for q in self.quantiles[n]]])
        return buf.getvalue()

    def to_text(self) -> str:
        head = f"Critical values for the {self.kind.value} statistic, k={self.k} ({self.reps} replications)"
        lines = [head, "", f"{'n':>6} |" + "".join(f"{a:>9g}" for a in self.levels), "-" * (8 + 9 * len(self.levels))]
        for n in self.sizes:
            lines.append(f"{n:>6} |" + "".join(f"{q:>9.3f}" for q in self.quantiles[n]))
        return "\n".join(lines) + "\n"


def critical_values(
    plan: SimulationPlan,
    sizes: Sequence[int] | None = None,
    store: TableStore | None = None,
    workers: int | None = 1,
) -> CriticalValueTable:
    """Upper critical values at ``plan.levels`` for every sample size in ``sizes``."""
    if plan.reps < 100:
        raise ValueError("critical-value tables need at least 100 replicates")
    if not plan.alternative.is_null:
        raise ValueError("critical values are simulated under the null")
    sizes = tuple(sizes) if sizes is not None else (plan.n,)
    quants, ses = {}, {}
    for n in sizes:
        sub = replace(plan, n=n)
        dist = store.get_or_simulate(sub, workers) if store is not None else simulate_null_distribution(sub, workers)
        quants[n] = tuple(dist.quantile(a) for a in plan.levels)
        ses[n] = tuple(dist.quantile_se(a) for a in plan.levels)
    table = CriticalValueTable(plan.kind, plan.k, plan.reps, plan.seed, plan.levels, sizes, quants, ses)
    if not table.monotone_in_n():
        log.info("critical values are not monotone in n (Monte Carlo noise)")
    return table


def p_value(result: StatisticResult, null: NullDistribution | SimulationPlan, workers: int | None = 1) -> float:
    if isinstance(null, SimulationPlan):
        null = simulate_null_distribution(null, workers)
    plan = null.plan
    if (plan.kind, plan.k, plan.n) != (result.kind, result.k, result.n):
        raise ValueError(
            f"null distribution is for ({plan.kind.value}, k={plan.k}, n={plan.n}); "
            f"statistic is ({result.kind.value}, k={result.k}, n={result.n})"
        )
    if not plan.alternative.is_null:
        raise ValueError("p-values need a null distribution")
    return null.p_value(result.value)


# --------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class NormalityDiagnostic:
    """Null behaviour of ``sqrt(n) I_n`` against its normal limit.

    ``finite_n_mean`` is the exact expectation of ``sqrt(n) I_n``; it is
    ``O(1/sqrt(n))`` and explains most of the KS distance at moderate ``n``.
    """

    k: int
    n: int
    reps: int
    mean: float
    variance: float
    limit_variance: float
    ks_distance: float
    finite_n_mean: float
    centered_ks_distance: float

    @property
    def mean_se(self) -> float:
        return math.sqrt(self.variance / self.reps)


def normality_diagnostic(k: int, n: int, reps: int, seed: int = 0, workers: int | None = 1) -> NormalityDiagnostic:
    """Moments of ``sqrt(n) I_n`` under the null and its KS distance to ``N(0, (k+1)^2 Delta_k^2)``."""
    plan = SimulationPlan(StatKind.INTEGRAL, k=k, n=n, reps=reps, seed=seed)
    z = math.sqrt(n) * simulate(plan, workers)
    limit = (k + 1) ** 2 * delta_sq_integral(k).value
    offset = math.sqrt(n) * integral_null_mean(k, n)
    normal = stats.norm(scale=math.sqrt(limit))
    ks = stats.kstest(z, normal.cdf).statistic
    ks_centered = stats.kstest(z - offset, normal.cdf).statistic
    return NormalityDiagnostic(
        k, n, reps, float(z.mean()), float(z.var(ddof=1)), limit, float(ks), offset, float(ks_centered)
    )


@dataclass(frozen=True)
class PowerResult:
    rate: float
    se: float
    critical_value: float
    reps: int


def power_study(
    plan: SimulationPlan,
    alpha: float,
    null: NullDistribution | CriticalValueTable,
    workers: int | None = 1,
) -> PowerResult:
    """Fraction of replicates under ``plan.alternative`` above the critical value."""
    if isinstance(null, NullDistribution):
        p = null.plan
        if (p.kind, p.k, p.n) != (plan.kind, plan.k, plan.n):
            raise ValueError("null distribution does not match the plan")
        crit = null.quantile(alpha)
    else:
        if (null.kind, null.k) != (plan.kind, plan.k) or plan.n not in null.quantiles:
            raise ValueError("critical-value table does not match the plan")
        crit = null.value(plan.n, alpha)
    values = simulate(plan, workers)
    rate = float(np.mean(values > crit))
    return PowerResult(rate, math.sqrt(rate * (1 - rate) / plan.reps), crit, plan.reps)


def null_plan(kind, k: int, n: int, reps: int = DEFAULT_REPS, seed: int = 0) -> SimulationPlan:
    return SimulationPlan(kind=kind, k=k, n=n, reps=reps, seed=seed, alternative=AlternativeSpec(Family.PARETO))
