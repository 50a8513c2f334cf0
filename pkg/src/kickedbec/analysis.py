"""Mode tracking, survival probabilities, and decay/scaling fits.

The accelerator mode moves through momentum space at a constant rate, so
the population inside a co-moving window of a few momentum states is the
survival probability of the mode.  Decay rates come from weighted least
squares on ln p (the weighting assumes counting noise, sigma_p ~ sqrt(p));
the tunneling-rate scaling is a straight-line fit of ln(gamma) against the
island area over the effective Planck constant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .engine import MomentumHistogram, QuantumParams
from .errors import (
    InsufficientDataError,
    NonPositiveSurvivalError,
    WindowOutOfBasisError,
)
from .maps import find_period1_fixed_point

DEFAULT_WINDOW_WIDTH = 7  # momentum states; mid-point of the mode's 5..10


@dataclass(frozen=True)
class ModeWindow:
    kick_index: int
    n_lo: int
    n_hi: int

    @property
    def width(self) -> int:
        return self.n_hi - self.n_lo + 1

    @property
    def center(self) -> float:
        return 0.5 * (self.n_lo + self.n_hi)


@dataclass(frozen=True)
class SurvivalSeries:
    t: np.ndarray
    p: np.ndarray
    t0: int


@dataclass(frozen=True)
class DecayFitResult:
    gamma: float
    gamma_err: float
    fit_window: tuple[int, int]
    r_squared: float
    log_intercept: float
    n_points: int


@dataclass(frozen=True)
class ScalingFitResult:
    slope: float
    intercept: float
    slope_err: float
    intercept_err: float
    n_points: int


def predict_mode_center(j: int, q: QuantumParams, initial_n: int = 0) -> float:
    """Mode center in the falling frame: initial momentum plus the drift
    tau*eta/|eps| per kick.  Requires a stable period-1 island."""
    fp = find_period1_fixed_point(q.to_map_params())
    if not fp.exists or not fp.stable:
        raise ValueError("no stable period-1 accelerator mode for these parameters")
    return initial_n + q.drift_per_kick * j


def mode_window(
    j: int, q: QuantumParams, width: int = DEFAULT_WINDOW_WIDTH, initial_n: int = 0
) -> ModeWindow:
    if width < 1:
        raise ValueError("width must be >= 1")
    center = round(predict_mode_center(j, q, initial_n))
    half_lo = (width - 1) // 2
    return ModeWindow(kick_index=j, n_lo=center - half_lo,
                      n_hi=center - half_lo + width - 1)


def bulk_statistics(hist: MomentumHistogram, exclude: ModeWindow | None = None):
    """Mean and standard deviation of the distribution outside the mode
    window."""
    mask = np.ones(hist.n.shape, dtype=bool)
    if exclude is not None:
        mask &= (hist.n < exclude.n_lo) | (hist.n > exclude.n_hi)
    p = hist.p[mask]
    n = hist.n[mask]
    total = p.sum()
    if total <= 0.0:
        return 0.0, 0.0
    mu = float((n * p).sum() / total)
    var = float((p * (n - mu) ** 2).sum() / total)
    return mu, math.sqrt(var)


def select_t0(
    histograms: list[MomentumHistogram],
    q: QuantumParams,
    width: int = DEFAULT_WINDOW_WIDTH,
    initial_n: int = 0,
    separation_sigmas: float = 3.0,
) -> int:
    """Smallest sampled kick at which the predicted window center sits at
    least `separation_sigmas` bulk standard deviations from the bulk mean:
    the moment the mode has visibly left the bulk.

    Until the mode has actually left the bulk, almost everything lies
    inside or next to the window and moment-based statistics mislead, so
    two extra gates apply: the trailing bulk must hold a substantial share
    of the probability, and a dip must have opened between the two peaks
    (the distribution at the window's trailing edge has fallen below half
    of both peak heights).
    """
    trailing_below = q.drift_per_kick >= 0
    for hist in histograms:
        j = hist.kick_index
        if j == 0:
            continue
        win = mode_window(j, q, width, initial_n)
        i_lo = win.n_lo - int(hist.n[0])
        i_hi = win.n_hi - int(hist.n[0])
        if i_lo < 1 or i_hi >= hist.n.size - 1:
            continue
        win_peak = float(hist.p[i_lo:i_hi + 1].max())
        if trailing_below:
            bulk_p = hist.p[:i_lo]
            edge = float(hist.p[max(i_lo - 2, 0):i_lo].mean())
        else:
            bulk_p = hist.p[i_hi + 1:]
            edge = float(hist.p[i_hi + 1:i_hi + 3].mean())
        if bulk_p.size == 0 or bulk_p.sum() < 0.2:
            continue
        if edge > 0.5 * min(win_peak, float(bulk_p.max())):
            continue
        mu, sd = bulk_statistics(hist, exclude=win)
        if sd > 0 and abs(win.center - mu) >= separation_sigmas * sd:
            return j
    raise InsufficientDataError(
        "mode never separated from the bulk in the sampled range"
    )


def survival_probability(
    histograms: list[MomentumHistogram],
    windows: dict[int, ModeWindow],
    t0: int,
) -> SurvivalSeries:
    """Population inside the co-moving window, normalized at kick t0."""
    sampled = {h.kick_index: h for h in histograms}
    if t0 not in sampled:
        raise ValueError(f"t0={t0} was not sampled")
    ts = sorted(t for t in sampled if t >= t0)
    missing = [t for t in ts if t not in windows]
    if missing:
        raise ValueError(f"no window defined for kicks {missing[:5]}")
    sums = []
    for t in ts:
        h, w = sampled[t], windows[t]
        if w.n_lo < int(h.n[0]) or w.n_hi > int(h.n[-1]):
            raise WindowOutOfBasisError(
                f"window [{w.n_lo}, {w.n_hi}] at kick {t} exceeds histogram "
                f"support [{h.n[0]}, {h.n[-1]}]"
            )
        sums.append(h.window_sum(w.n_lo, w.n_hi))
    norm = sums[0]
    if norm <= 0.0:
        raise NonPositiveSurvivalError("no population in the window at t0")
    p = np.array(sums) / norm
    return SurvivalSeries(t=np.array(ts, dtype=np.int64), p=p, t0=t0)


def fit_decay_rate(
    series: SurvivalSeries, window: tuple[float, float]
) -> DecayFitResult:
    """Weighted least squares of ln p against t inside [t_start, t_end].

    Weights assume counting noise, sigma_p ~ sqrt(p), i.e. chi-square
    weights proportional to p.  Points with p <= 0 are dropped with a
    warning; fewer than 5 usable points is an error.
    """
    t_start, t_end = window
    sel = (series.t >= t_start) & (series.t <= t_end)
    t = series.t[sel].astype(np.float64)
    p = series.p[sel]
    bad = p <= 0.0
    if bad.any():
        warnings.warn(
            f"dropping {int(bad.sum())} non-positive survival values",
            stacklevel=2,
        )
        t, p = t[~bad], p[~bad]
    if t.size < 5:
        msg = f"only {t.size} usable points in the fit window; need >= 5"
        if bad.any():
            raise NonPositiveSurvivalError(msg)
        raise InsufficientDataError(msg)
    y = np.log(p)
    w = p  # chi-square weights
    sw = w.sum()
    st = (w * t).sum()
    stt = (w * t * t).sum()
    sy = (w * y).sum()
    sty = (w * t * y).sum()
    denom = sw * stt - st * st
    if denom <= 0.0:
        raise InsufficientDataError("degenerate time values in fit window")
    slope = (sw * sty - st * sy) / denom
    intercept = (sy - slope * st) / sw
    resid = y - (intercept + slope * t)
    chi2 = float((w * resid * resid).sum())
    dof = t.size - 2
    scale = chi2 / dof if dof > 0 else 0.0
    slope_var = scale * sw / denom
    # weighted R^2
    ybar = sy / sw
    ss_tot = float((w * (y - ybar) ** 2).sum())
    r2 = 1.0 - chi2 / ss_tot if ss_tot > 0 else 1.0
    return DecayFitResult(
        gamma=-slope,
        gamma_err=math.sqrt(max(slope_var, 0.0)),
        fit_window=(int(t[0]), int(t[-1])),
        r_squared=r2,
        log_intercept=intercept,
        n_points=int(t.size),
    )


def fit_scaling(points: list[tuple[float, float]]) -> ScalingFitResult:
    """Least squares of ln(gamma) against A/|eps| over (x, gamma) pairs."""
    if len(points) < 3:
        raise InsufficientDataError(f"need >= 3 points, got {len(points)}")
    x = np.array([p[0] for p in points], dtype=np.float64)
    g = np.array([p[1] for p in points], dtype=np.float64)
    if (g <= 0).any():
        raise ValueError("scaling fit needs positive rates")
    y = np.log(g)
    n = x.size
    sx, sy = x.sum(), y.sum()
    sxx, sxy = (x * x).sum(), (x * y).sum()
    denom = n * sxx - sx * sx
    if denom <= 0.0:
        raise InsufficientDataError("degenerate abscissa values")
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    resid = y - (intercept + slope * x)
    dof = n - 2
    scale = float((resid * resid).sum()) / dof if dof > 0 else 0.0
    return ScalingFitResult(
        slope=slope,
        intercept=intercept,
        slope_err=math.sqrt(max(scale * n / denom, 0.0)),
        intercept_err=math.sqrt(max(scale * sxx / denom, 0.0)),
        n_points=n,
    )
