import json
import math

import numpy as np
import pytest

from paretogof.distributions import AlternativeSpec, Family
from paretogof.montecarlo import (
    NullDistribution,
    SimulationPlan,
    TableStore,
    child_rng,
    critical_values,
    normality_diagnostic,
    null_plan,
    p_value,
    power_study,
    replicate_sample,
    simulate,
    simulate_null_distribution,
)
from paretogof.ustat import StatKind, StatisticResult, integral_null_mean, integral_statistic, sup_statistic


class TestPlan:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimulationPlan("integral", k=3, n=3)
        with pytest.raises(ValueError):
            SimulationPlan("sup", reps=0)
        with pytest.raises(ValueError):
            SimulationPlan("sup", levels=(0.05, 0.1))
        with pytest.raises(ValueError):
            SimulationPlan("sup", levels=(1.5,))
        SimulationPlan("sup", k=3, n=3, reps=1)

    def test_digest_ignores_levels(self):
        a = SimulationPlan("sup", levels=(0.1,))
        b = SimulationPlan("sup", levels=(0.2, 0.1))
        assert a.digest() == b.digest()
        assert a.digest() != SimulationPlan("sup", seed=1).digest()


class TestSimulate:
    def test_replicate_independent_of_order(self):
        plan = SimulationPlan("sup", k=3, n=15, reps=50, seed=42)
        full = simulate(plan)
        assert full[37] == sup_statistic(replicate_sample(plan, 37), 3).value

    def test_workers_do_not_change_values(self):
        plan = SimulationPlan("integral", k=3, n=20, reps=200, seed=3)
        np.testing.assert_array_equal(simulate(plan, workers=1), simulate(plan, workers=2))

    def test_single_replicate(self):
        plan = SimulationPlan("integral", k=3, n=10, reps=1, seed=9)
        x = np.sort(1.0 / (1.0 - child_rng(9, 0).random(10)))
        assert simulate(plan)[0] == pytest.approx(integral_statistic(x, 3).value, abs=1e-15)

    def test_seed_changes_values(self):
        a = simulate(SimulationPlan("sup", n=12, reps=20, seed=0))
        b = simulate(SimulationPlan("sup", n=12, reps=20, seed=1))
        assert not np.array_equal(a, b)


class TestNullDistribution:
    def make(self, values, n=10):
        plan = SimulationPlan("sup", k=3, n=n, reps=len(values))
        return NullDistribution(plan, np.sort(np.asarray(values, dtype=float)))

    def test_quantile_rule(self):
        d = self.make(np.arange(1, 101))
        assert d.quantile(0.1) == 90.0
        assert d.quantile(0.05) == 95.0
        assert d.quantile(0.01) == 99.0

    def test_p_value_edges(self):
        d = self.make(np.arange(1, 101))
        assert d.p_value(1000.0) == pytest.approx(1 / 101)
        assert d.p_value(0.0) == pytest.approx(1.0)
        # an observed value equal to a simulated one counts as a tie
        assert d.p_value(100.0 - 1e-14) == pytest.approx(2 / 101)

    def test_quantile_se_positive(self):
        d = simulate_null_distribution(SimulationPlan("sup", n=20, reps=500, seed=1))
        assert 0 < d.quantile_se(0.05) < 0.05

    def test_round_trip(self, tmp_path):
        store = TableStore(tmp_path)
        plan = SimulationPlan("integral", k=4, n=12, reps=120, seed=5)
        d1 = store.get_or_simulate(plan)
        d2 = store.load(plan)
        np.testing.assert_array_equal(d1.values, d2.values)
        assert store.path(plan).name.startswith("integral-k4-n12-")

    def test_store_ignores_mismatch(self, tmp_path):
        store = TableStore(tmp_path)
        plan = SimulationPlan("sup", k=3, n=12, reps=100, seed=5)
        store.get_or_simulate(plan)
        path = store.path(plan)
        doc = json.loads(path.read_text())
        doc["seed"] = 6
        path.write_text(json.dumps(doc))
        assert store.load(plan) is None

    def test_default_cache_dir_env(self, cache_dir):
        assert TableStore().root == cache_dir


class TestCriticalValues:
    def test_table(self, tmp_path):
        plan = SimulationPlan("sup", k=3, n=10, reps=400, seed=0)
        table = critical_values(plan, sizes=(10, 20), store=TableStore(tmp_path))
        assert table.value(10, 0.1) <= table.value(10, 0.05) <= table.value(10, 0.01)
        assert set(table.quantiles) == {10, 20}
        assert "0.05" in table.to_csv().splitlines()[0]
        assert json.loads(table.to_json())["rows"][0]["n"] == 10
        assert "k=3" in table.to_text()

    def test_needs_reps(self):
        with pytest.raises(ValueError):
            critical_values(SimulationPlan("sup", reps=99))

    def test_needs_null(self):
        plan = SimulationPlan("sup", reps=100, alternative=AlternativeSpec(Family.LP1, 0.3))
        with pytest.raises(ValueError):
            critical_values(plan)


class TestPValue:
    def test_mismatch_refused(self):
        dist = simulate_null_distribution(SimulationPlan("sup", k=3, n=10, reps=100))
        res = StatisticResult(StatKind.SUPREMUM, 3, 11, 0.3)
        with pytest.raises(ValueError):
            p_value(res, dist)

    def test_calibration(self):
        # p-values of fresh null samples are roughly uniform
        dist = simulate_null_distribution(null_plan("sup", 3, 20, reps=2000, seed=0))
        ps = []
        for s in range(300):
            x = np.sort(1.0 / (1.0 - np.random.default_rng(10_000 + s).random(20)))
            ps.append(p_value(sup_statistic(x, 3), dist))
        ps = np.array(ps)
        assert abs(np.mean(ps <= 0.1) - 0.1) < 3 * math.sqrt(0.09 / 300)


class TestPower:
    def test_null_power_is_level(self):
        null = simulate_null_distribution(null_plan("integral", 3, 30, reps=2000, seed=0))
        res = power_study(null_plan("integral", 3, 30, reps=1000, seed=99), 0.1, null)
        assert abs(res.rate - 0.1) < 3 * math.sqrt(0.09 / 1000) + 0.01

    def test_integral_beats_supremum_lp1(self):
        alt = AlternativeSpec(Family.LP1, 0.5)
        rates = {}
        for kind in ("integral", "sup"):
            null = simulate_null_distribution(null_plan(kind, 3, 50, reps=1000, seed=0))
            plan = SimulationPlan(kind, k=3, n=50, reps=1000, seed=1, alternative=alt)
            rates[kind] = power_study(plan, 0.05, null).rate
        assert rates["integral"] > rates["sup"]

    def test_mismatched_null(self):
        null = simulate_null_distribution(null_plan("sup", 3, 20, reps=100))
        with pytest.raises(ValueError):
            power_study(null_plan("sup", 3, 30, reps=10), 0.1, null)


@pytest.mark.slow
@pytest.mark.parametrize("k", [3, 4])
def test_normality_mean_matches_exact_centering(k):
    diag = normality_diagnostic(k, 500, 2000, seed=0, workers=None)
    assert diag.finite_n_mean == pytest.approx(math.sqrt(500) * integral_null_mean(k, 500))
    assert abs(diag.mean - diag.finite_n_mean) < 3 * diag.mean_se
    assert diag.centered_ks_distance < diag.ks_distance + 0.01
