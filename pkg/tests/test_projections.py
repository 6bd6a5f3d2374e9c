from fractions import Fraction

import numpy as np
import pytest

from paretogof.projections import (
    DELTA_SQ_INTEGRAL_EXACT,
    Method,
    delta_sq_integral,
    delta_sq_sup,
    delta_sq_sup_closed_form,
    delta_sq_sup_t,
    psi,
    psi_closed_form,
    xi,
)
from paretogof.quadrature import integrate_tail

S_GRID = np.concatenate([[1.0, 1.0 + 1e-9, 1.001], np.geomspace(1.01, 1e6, 200)])


def top_ratio(m):
    m = np.sort(m, axis=1)
    return m[:, -1] / m[:, -2]


def pareto_draws(rng, shape):
    return 1.0 / (1.0 - rng.random(shape))


class TestPsi:
    @pytest.mark.parametrize("k", [3, 4])
    def test_general_matches_closed_form(self, k):
        np.testing.assert_allclose(psi(k, S_GRID), psi_closed_form(k, S_GRID), atol=1e-12)

    @pytest.mark.parametrize("k", range(2, 9))
    def test_centered(self, k):
        assert integrate_tail(lambda s: psi(k, s) / s**2) == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("k", range(2, 9))
    def test_finite_near_one(self, k):
        v = psi(k, np.array([1.0, 1.0 + 1e-12, 1.0 + 1e-6]))
        assert np.all(np.isfinite(v))
        assert abs(v[1] - v[0]) < 1e-9

    @pytest.mark.parametrize("k, s", [(2, 1.3), (3, 1.3), (3, 2.0), (3, 7.0), (4, 3.0), (5, 2.0), (6, 1.6)])
    def test_conditional_expectation(self, k, s):
        # psi(s) = E[symmetrised integral kernel | one argument = s] - 1/2;
        # the subset of k containing s compares with an outside point, the
        # outside subset's ratio compares with s and has the law F
        rng = np.random.default_rng(int(100 * s) + k)
        m = 200_000
        others = pareto_draws(rng, (m, k - 1))
        outside = pareto_draws(rng, m)
        p = np.mean(top_ratio(np.column_stack([np.full(m, s), others])) < outside)
        est = (1.0 - 1.0 / s + k * p) / (k + 1) - 0.5
        se = k / (k + 1) * np.sqrt(p * (1 - p) / m)
        assert abs(est - psi(k, s)) < 4.5 * se

    def test_domain(self):
        with pytest.raises(ValueError):
            psi(3, 0.9)
        with pytest.raises(ValueError):
            psi(1, 2.0)
        with pytest.raises(ValueError):
            psi_closed_form(5, 2.0)


class TestXi:
    @pytest.mark.parametrize("k", [3, 4, 6])
    @pytest.mark.parametrize("t", [1.0, 1.5, 2.0, 10.0])
    def test_centered(self, k, t):
        assert integrate_tail(lambda s: xi(k, s, t) / s**2, breakpoints=(t,)) == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("k, s, t", [(3, 1.5, 2.0), (3, 3.0, 2.0), (3, 10.0, 4.0), (5, 1.5, 2.0), (5, 3.0, 2.0),
                                         (5, 10.0, 4.0)])
    def test_conditional_expectation(self, k, s, t):
        # E[1{R < t} - (1/k) sum 1{x_j < t} | x_1 = s]
        rng = np.random.default_rng(int(10 * s * t) + k)
        m = 200_000
        others = pareto_draws(rng, (m, k - 1))
        p = np.mean(top_ratio(np.column_stack([np.full(m, s), others])) < t)
        est = p - (s < t) / k - (k - 1) / k * (1.0 - 1.0 / t)
        se = np.sqrt(p * (1 - p) / m)
        assert abs(est - xi(k, s, t)) < 4.5 * se

    def test_zero_at_t_one(self):
        np.testing.assert_allclose(xi(4, S_GRID, 1.0), 0.0, atol=1e-15)


class TestVariances:
    def test_exact_integral_constants(self):
        assert DELTA_SQ_INTEGRAL_EXACT[3] == Fraction(11, 1920)
        assert DELTA_SQ_INTEGRAL_EXACT[4] == Fraction(271, 52500)

    @pytest.mark.parametrize("k", [3, 4])
    def test_integral_quadrature_matches_exact(self, k):
        quad = delta_sq_integral(k, method="quadrature")
        assert quad.method is Method.QUADRATURE
        assert quad.value == pytest.approx(float(DELTA_SQ_INTEGRAL_EXACT[k]), abs=1e-10)
        assert delta_sq_integral(k).method is Method.CLOSED_FORM

    def test_integral_positive_all_k(self):
        for k in range(2, 9):
            assert delta_sq_integral(k).value > 0

    def test_closed_form_unavailable(self):
        with pytest.raises(ValueError):
            delta_sq_integral(5, method="closed_form")

    @pytest.mark.parametrize("k", [3, 4])
    def test_sup_closed_form_matches_quadrature(self, k):
        for t in np.geomspace(1.0001, 500, 25):
            q = delta_sq_sup_t(k, t, method="quadrature").value
            assert delta_sq_sup_closed_form(k, t) == pytest.approx(q, abs=1e-9)

    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_sup_variance_endpoints(self, k):
        assert delta_sq_sup_t(k, 1.0).value == pytest.approx(0.0, abs=1e-15)
        assert delta_sq_sup_t(k, 1e3).value < 2e-3

    @pytest.mark.parametrize("k, t_star, value", [(3, 1.93954, 0.0347655), (4, 2.18103, 0.0257965)])
    def test_sup_maximiser(self, k, t_star, value):
        t, v = delta_sq_sup(k)
        assert t == pytest.approx(t_star, abs=2e-5)
        assert v == pytest.approx(value, abs=1e-7)

    def test_sup_maximum_is_global_on_grid(self):
        t_star, v = delta_sq_sup(5)
        grid = np.geomspace(1.0, 1e3, 2000)
        assert v >= max(delta_sq_sup_t(5, t).value for t in grid[::20]) - 1e-12
        assert 1.0 < t_star < 1e3
