"""Log-log regret growth exponent with a bootstrap interval over runs."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
from scipy import stats

from tsac.core.errors import DimensionMismatch, InsufficientData

logger = logging.getLogger(__name__)

MIN_POINTS = 10


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    ci_low: float
    ci_high: float
    t_min: int
    t_max: int
    points: int
    shift: float
    runs: int

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _fit(log_t: np.ndarray, mean_curve: np.ndarray) -> tuple[float, float, float]:
    low = float(np.min(mean_curve))
    shift = abs(low) + 1.0 if low <= 0.0 else 0.0
    result = stats.linregress(log_t, np.log(mean_curve + shift))
    return float(result.slope), float(result.intercept), shift


def fit_regret_slope(
    curves: np.ndarray,
    t_min: int | None = None,
    bootstrap: int = 1000,
    confidence: float = 0.9,
    seed: int = 0,
) -> SlopeFit:
    """
    OLS slope of log(mean cumulative regret) against log(t) over [t_min, T].

    curves holds one run per row, column i being the regret after step
    t = i + 1. When the mean curve is not positive on the window it is
    shifted by |min| + 1. t_min defaults to T/10.

    Raises:
        InsufficientData: fewer than 10 points in the window.
    """
    curves = np.atleast_2d(np.asarray(curves, dtype=float))
    if curves.ndim != 2 or curves.shape[1] == 0:
        raise DimensionMismatch("curves must be a non-empty runs × T array")
    runs, horizon = curves.shape
    t_min = max(1, horizon // 10) if t_min is None else max(1, t_min)
    points = horizon - t_min + 1
    if points < MIN_POINTS:
        raise InsufficientData(f"{points} points in [{t_min}, {horizon}], need at least {MIN_POINTS}")

    t = np.arange(t_min, horizon + 1, dtype=float)
    log_t = np.log(t)
    window = curves[:, t_min - 1:]
    slope, intercept, shift = _fit(log_t, window.mean(axis=0))

    ci_low = ci_high = slope
    if runs > 1 and bootstrap > 0:
        rng = np.random.default_rng(seed)
        draws = np.empty(bootstrap)
        for i in range(bootstrap):
            pick = rng.integers(0, runs, runs)
            draws[i] = _fit(log_t, window[pick].mean(axis=0))[0]
        tail = (1.0 - confidence) / 2.0 * 100.0
        ci_low, ci_high = (float(v) for v in np.percentile(draws, [tail, 100.0 - tail]))

    logger.info("Regret slope %.4f [%.4f, %.4f] over t in [%d, %d]", slope, ci_low, ci_high, t_min, horizon)
    return SlopeFit(slope, intercept, ci_low, ci_high, t_min, horizon, points, shift, runs)
