"""Tests for the interval constructors and width functions."""

import math

import pytest

from ciwidth.distributions import poisson_quantile
from ciwidth.intervals import (
    CountSample,
    Interval,
    NormalSample,
    ProportionSample,
    anscombe_forward,
    anscombe_inverse,
    approx_poisson_power_quantile,
    garwood_interval,
    garwood_rate_width,
    normal_t_width,
    wilson_interval,
    wilson_width,
)


def _poisson_pmf(k, lam):
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


class TestInterval:
    def test_width(self):
        assert Interval(1.0, 3.5).width == 2.5

    def test_rejects_inverted(self):
        with pytest.raises(ValueError):
            Interval(2.0, 1.0)

    def test_strict_containment(self):
        iv = Interval(0.0, 1.0)
        assert iv.contains(0.5)
        assert not iv.contains(0.0)
        assert not iv.contains(1.0)


class TestNormalTWidth:
    def test_zero_dispersion(self):
        for n in (2, 10, 400):
            assert normal_t_width(n, 0.0, 0.05) == 0.0

    def test_small_sample_value(self):
        # 2 * t(0.975, 3) / sqrt(4), with t validated against the
        # incomplete-beta closed forms
        assert normal_t_width(4, 1.0, 0.05) == pytest.approx(3.182446, abs=1e-4)

    def test_table_threshold_probe(self):
        # at the tabulated exact size 73 for width 0.5, the width at the
        # 0.8-quantile dispersion must drop below 0.5
        from ciwidth.distributions import chi_square_quantile
        s = math.sqrt(chi_square_quantile(0.8, 72) / 73)
        assert normal_t_width(73, s, 0.05) < 0.5

    def test_monotone_in_s(self):
        widths = [normal_t_width(30, s, 0.05) for s in (0.1, 0.5, 1.0, 2.0, 7.0)]
        assert all(a < b for a, b in zip(widths, widths[1:]))

    def test_decreasing_in_n(self):
        widths = [normal_t_width(n, 1.0, 0.05) for n in (2, 5, 20, 100, 1000)]
        assert all(a > b for a, b in zip(widths, widths[1:]))

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            normal_t_width(1, 1.0, 0.05)


class TestGarwood:
    def test_zero_count(self):
        iv = garwood_interval(0, 0.05)
        assert iv.lower == 0.0
        assert iv.upper == pytest.approx(3.68888, abs=1e-4)  # -ln(0.025)

    def test_one_count(self):
        # 0.5*chi2(0.025, 2) and 0.5*chi2(0.975, 4) via the
        # incomplete-gamma closed forms
        iv = garwood_interval(1, 0.05)
        assert iv.lower == pytest.approx(0.025318, abs=1e-4)
        assert iv.upper == pytest.approx(5.57164, abs=1e-4)

    @pytest.mark.parametrize("x", [0, 1, 2, 5, 17, 100, 410])
    def test_contains_count(self, x):
        iv = garwood_interval(x, 0.05)
        assert iv.lower <= x <= iv.upper

    def test_rate_width_scales_with_exposure(self):
        assert garwood_rate_width(0, 1, 0.05) == pytest.approx(3.68888, abs=1e-4)
        assert garwood_rate_width(0, 2, 0.05) == pytest.approx(1.84444, abs=1e-4)

    def test_rate_width_near_table_operating_point(self):
        # consistency probe near the rate=0.01, width 0.002 table row
        x = poisson_quantile(0.8, 0.01 * 41064)
        assert garwood_rate_width(x, 41064, 0.05) <= 0.002

    def test_width_nondecreasing_in_x(self):
        xs = list(range(0, 1001, 25))
        widths = [garwood_interval(x, 0.05).width for x in xs]
        assert all(a <= b for a, b in zip(widths, widths[1:]))

    @pytest.mark.parametrize("x", [0, 3, 40, 1000])
    def test_rate_width_nonincreasing_in_exposure(self, x):
        exposures = [10.0 ** k for k in range(2, 7)]
        widths = [garwood_rate_width(x, e, 0.05) for e in exposures]
        assert all(a > b for a, b in zip(widths, widths[1:]))

    @pytest.mark.parametrize("lam", [0.2, 1.0, 3.7, 9.5, 20.0])
    @pytest.mark.parametrize("alpha", [0.05, 0.1])
    def test_coverage_at_least_nominal(self, lam, alpha):
        # exact computation over the pmf, no simulation
        cover = 0.0
        for x in range(int(lam + 12 * math.sqrt(lam) + 25)):
            iv = garwood_interval(x, alpha)
            if iv.lower <= lam <= iv.upper:
                cover += _poisson_pmf(x, lam)
        assert cover >= 1.0 - alpha

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            garwood_interval(-1, 0.05)
        with pytest.raises(ValueError):
            garwood_rate_width(1, 0.0, 0.05)


class TestWilson:
    def test_zero_successes_lower_bound(self):
        for n in (1, 10, 100):
            assert wilson_interval(0, n, 0.05).lower == pytest.approx(0.0, abs=1e-15)

    def test_symmetric_about_half(self):
        iv = wilson_interval(10, 20, 0.05)
        assert iv.lower == pytest.approx(1.0 - iv.upper, abs=1e-12)

    def test_table_width_value(self):
        # 2*1.959964*sqrt(0.25*381 + 0.9604)/(381 + 3.8416)
        assert wilson_interval(190, 381, 0.05).width == pytest.approx(0.09991, abs=1e-4)
        assert wilson_interval(190, 381, 0.05).width < 0.1

    def test_width_function_values(self):
        assert wilson_width(0.5, 381, 0.05) == pytest.approx(0.09991, abs=1e-4)
        w = wilson_width(0.25, 286, 0.05)
        assert w == pytest.approx(0.09987, abs=2e-4)
        assert w <= 0.1

    @pytest.mark.parametrize("p_hat", [0.0, 0.1, 0.25, 0.4, 0.5])
    @pytest.mark.parametrize("n", [5, 50, 381])
    def test_symmetry_under_reflection(self, p_hat, n):
        assert wilson_width(p_hat, n, 0.05) == pytest.approx(
            wilson_width(1.0 - p_hat, n, 0.05), abs=1e-14)

    @pytest.mark.parametrize("n", [3, 30, 302])
    def test_maximal_at_half(self, n):
        top = wilson_width(0.5, n, 0.05)
        for p_hat in (0.0, 0.05, 0.2, 0.35, 0.49, 0.7, 1.0):
            assert wilson_width(p_hat, n, 0.05) <= top

    @pytest.mark.parametrize("x,n", [(0, 7), (3, 7), (190, 381), (302, 302)])
    def test_interval_within_unit_and_matches_width(self, x, n):
        iv = wilson_interval(x, n, 0.05)
        assert 0.0 <= iv.lower <= iv.upper <= 1.0
        assert iv.width == pytest.approx(wilson_width(x / n, n, 0.05), abs=1e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            wilson_interval(8, 7, 0.05)
        with pytest.raises(ValueError):
            wilson_width(1.5, 7, 0.05)


class TestAnscombe:
    def test_forward_values(self):
        assert anscombe_forward(0.0) == pytest.approx(1.224745, abs=1e-6)
        assert anscombe_forward(1.0) == pytest.approx(2.345208, abs=1e-6)
        assert anscombe_forward(0.0625) == pytest.approx(1.322876, abs=1e-6)

    def test_inverse_values(self):
        assert anscombe_inverse(anscombe_forward(0.0)) == pytest.approx(0.25, abs=1e-12)
        assert anscombe_inverse(2.0) == pytest.approx(0.875, abs=1e-12)
        assert anscombe_inverse(4.0) == pytest.approx(3.875, abs=1e-12)

    @pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 7.5, 410.64])
    def test_round_trip_offset(self, x):
        # the published pair reproduces x + 1/4, not x
        assert anscombe_inverse(anscombe_forward(x)) == pytest.approx(x + 0.25, abs=1e-10)

    def test_forward_rejects_negative(self):
        with pytest.raises(ValueError):
            anscombe_forward(-0.5)


class TestApproxPoissonPowerQuantile:
    def test_median_collapses(self):
        for lam in (0.5, 3.0, 50.0):
            assert approx_poisson_power_quantile(lam, 0.5) == pytest.approx(lam + 0.25, abs=1e-10)

    def test_table_operating_point(self):
        exact = poisson_quantile(0.8, 410.64)
        approx = approx_poisson_power_quantile(410.64, 0.8)
        assert abs(approx - exact) <= 2.0

    def test_small_lambda_vs_exact(self):
        assert poisson_quantile(0.8, 1.0) == 2
        assert abs(approx_poisson_power_quantile(1.0, 0.8) - 2.0) < 0.5

    @pytest.mark.parametrize("psi", [0.8, 0.9, 0.95])
    @pytest.mark.parametrize("lam", [18.0, 60.0, 410.64, 1606.3])
    def test_relative_error_bound(self, lam, psi):
        # measured: the 5% bound holds from lam ~ 18 up; below that the
        # integer granularity of the exact quantile dominates
        exact = poisson_quantile(psi, lam)
        approx = approx_poisson_power_quantile(lam, psi)
        assert abs(approx - exact) / exact < 0.05

    @pytest.mark.parametrize("psi", [0.8, 0.9, 0.95])
    @pytest.mark.parametrize("lam", [5.0, 8.0, 12.0])
    def test_relative_error_small_lambda(self, lam, psi):
        exact = poisson_quantile(psi, lam)
        approx = approx_poisson_power_quantile(lam, psi)
        assert abs(approx - exact) / exact < 0.15


class TestSampleTypes:
    def test_normal_sample_interval(self):
        s = NormalSample(n=4, mean=1.0, s=1.0)
        iv = s.t_interval(0.05)
        assert iv.width == pytest.approx(3.182446, abs=1e-4)
        assert iv.lower == pytest.approx(1.0 - 3.182446 / 2, abs=1e-4)

    def test_normal_sample_validation(self):
        with pytest.raises(ValueError):
            NormalSample(n=1, mean=0.0, s=1.0)
        with pytest.raises(ValueError):
            NormalSample(n=5, mean=0.0, s=-1.0)

    def test_count_sample_rate_interval(self):
        c = CountSample(x=0, exposure=2.0)
        assert c.rate == 0.0
        assert c.rate_interval(0.05).upper == pytest.approx(1.84444, abs=1e-4)

    def test_count_sample_validation(self):
        with pytest.raises(ValueError):
            CountSample(x=-1, exposure=1.0)
        with pytest.raises(ValueError):
            CountSample(x=1, exposure=0.0)

    def test_proportion_sample(self):
        p = ProportionSample(x=190, n=381)
        assert p.p_hat == pytest.approx(190 / 381)
        assert p.wilson(0.05).width < 0.1

    def test_proportion_sample_validation(self):
        with pytest.raises(ValueError):
            ProportionSample(x=5, n=4)
        with pytest.raises(ValueError):
            ProportionSample(x=0, n=0)
