"""Goodness-of-fit tests for the Pareto law built on the equidistribution of
``X_1`` and ``X_(k,k) / X_(k-1,k)``."""

from ._kernels import BACKEND
from .asymptotics import (
    EfficiencyReport,
    LaoSpec,
    efficiency_table,
    kl_coef,
    lao_density,
    lao_efficiency_check,
    ld_rate_coef,
    local_efficiency,
    slope_coef_integral,
    slope_coef_sup,
)
from .distributions import (
    AlternativeSpec,
    Family,
    ParetoParams,
    alt_cdf,
    alt_pdf,
    alt_sample,
    h0_transform,
    pareto_cdf,
    pareto_sample,
    score_h,
)
from .montecarlo import (
    CriticalValueTable,
    NullDistribution,
    SimulationPlan,
    TableStore,
    critical_values,
    normality_diagnostic,
    p_value,
    power_study,
    simulate_null_distribution,
)
from .projections import delta_sq_integral, delta_sq_sup, delta_sq_sup_t, psi, xi
from .quadrature import QuadratureError
from .ustat import (
    Sample,
    SampleError,
    StatisticResult,
    StatKind,
    brute_force_H,
    integral_null_mean,
    integral_statistic,
    ratio_atoms,
    read_sample,
    sup_statistic,
    u_empirical_cdf,
)

__version__ = "0.1.0"
