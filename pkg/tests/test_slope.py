import numpy as np
import pytest

from tsac.core.bench.slope import MIN_POINTS, fit_regret_slope
from tsac.core.errors import InsufficientData


class TestFitRegretSlope:
    @pytest.mark.parametrize("exponent", [0.5, 1.0, 2.0])
    def test_power_law_is_exact(self, exponent):
        t = np.arange(1, 1001, dtype=float)
        curves = np.tile(3.0 * t ** exponent, (4, 1))
        fit = fit_regret_slope(curves, bootstrap=50)
        assert fit.slope == pytest.approx(exponent, abs=1e-9)
        assert fit.intercept == pytest.approx(np.log(3.0), abs=1e-9)
        assert fit.ci_low == pytest.approx(exponent, abs=1e-9)
        assert fit.ci_high == pytest.approx(exponent, abs=1e-9)
        assert fit.shift == 0.0
        assert fit.t_min == 100

    def test_window_and_points(self):
        t = np.arange(1, 201, dtype=float)
        fit = fit_regret_slope(np.sqrt(t), t_min=50, bootstrap=0)
        assert fit.points == 151
        assert (fit.t_min, fit.t_max) == (50, 200)
        assert fit.runs == 1

    def test_non_positive_curve_is_shifted(self):
        t = np.arange(1, 101, dtype=float)
        fit = fit_regret_slope(t - 50.0, t_min=1, bootstrap=0)
        assert fit.shift == pytest.approx(50.0)
        assert np.isfinite(fit.slope)

    def test_bootstrap_interval_brackets_noisy_slope(self):
        rng = np.random.default_rng(0)
        t = np.arange(1, 501, dtype=float)
        curves = np.sqrt(t) * rng.uniform(0.5, 1.5, size=(30, 1)) + t * rng.uniform(0.0, 0.1, size=(30, 1))
        fit = fit_regret_slope(curves, bootstrap=200, seed=1)
        assert fit.ci_low < fit.ci_high
        assert fit.ci_low - 0.05 <= fit.slope <= fit.ci_high + 0.05
        assert 0.5 < fit.slope < 1.0

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            fit_regret_slope(np.arange(1, MIN_POINTS, dtype=float), t_min=1)
