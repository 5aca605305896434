"""Resampling and test statistics used by the validation harness.

Self-contained: the Student-t distribution is evaluated through a
continued-fraction regularized incomplete beta function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "BootstrapResult",
    "betainc_regularized",
    "t_cdf",
    "t_sf_two_sided",
    "t_ppf",
    "bootstrap_mean_ci",
    "paired_t_test",
    "cohens_d",
    "pearson_r",
    "spearman_rho",
]


def _as_samples(x: Sequence[float], name: str = "samples") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    return arr


def _betacf(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not (0.0 <= x <= 1.0):
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    if t2 < df:
        # df / (df + t^2) rounds to 1 for tiny t; use the complement instead
        return 1.0 - betainc_regularized(0.5, df / 2.0, t2 / (df + t2))
    return betainc_regularized(df / 2.0, 0.5, df / (df + t2))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * t_sf_two_sided(t, df)
    return 1.0 - tail if t > 0 else tail


def t_ppf(q: float, df: float) -> float:
    """Quantile of Student's t by bisection on :func:`t_cdf`."""
    if not (0.0 < q < 1.0):
        raise ValueError("q must lie in (0, 1)")
    if q == 0.5:
        return 0.0
    lo, hi = -1.0, 1.0
    while t_cdf(lo, df) > q:
        lo *= 2.0
    while t_cdf(hi, df) < q:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BootstrapResult:
    point_estimate: float
    ci_low: float
    ci_high: float
    resamples: int
    confidence: float

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)

    def as_dict(self) -> dict:
        return {
            "point_estimate": self.point_estimate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "resamples": self.resamples,
            "confidence": self.confidence,
        }


def bootstrap_mean_ci(
    samples: Sequence[float],
    resamples: int = 10_000,
    confidence: float = 0.95,
    seed: int = 0,
) -> BootstrapResult:
    """Percentile bootstrap confidence interval for the mean."""
    x = _as_samples(samples)
    if x.size == 0:
        raise ValueError("samples must be non-empty")
    if resamples < 100:
        raise ValueError("resamples must be >= 100")
    if not (0.0 < confidence < 1.0):
        raise ValueError("confidence must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, x.size, size=(resamples, x.size))
    means = x[idx].mean(axis=1)
    alpha = (1.0 - confidence) / 2.0
    lo, hi = np.quantile(means, [alpha, 1.0 - alpha])
    point = float(x.mean())
    # a constant sample can land a rounding step outside [lo, hi]
    lo, hi = min(float(lo), point), max(float(hi), point)
    return BootstrapResult(point, lo, hi, int(resamples), float(confidence))


def paired_t_test(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Paired t statistic and two-sided p-value on ``x - y``.

    Identical inputs return ``(0.0, 1.0)``; other zero-variance differences
    raise ``ValueError``.
    """
    xa, ya = _as_samples(x, "x"), _as_samples(y, "y")
    if xa.shape != ya.shape:
        raise ValueError("x and y must have equal length")
    n = xa.size
    if n < 2:
        raise ValueError("need at least two pairs")
    d = xa - ya
    if np.all(d == 0):
        return 0.0, 1.0
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise ValueError("differences have zero variance")
    t = float(d.mean()) / (sd / math.sqrt(n))
    return t, t_sf_two_sided(t, n - 1)


def cohens_d(x: Sequence[float], y: Sequence[float]) -> float:
    """Standardized mean difference using the pooled standard deviation."""
    xa, ya = _as_samples(x, "x"), _as_samples(y, "y")
    nx, ny = xa.size, ya.size
    if nx < 2 or ny < 2:
        raise ValueError("each group needs at least two values")
    diff = float(xa.mean() - ya.mean())
    pooled = ((nx - 1) * xa.var(ddof=1) + (ny - 1) * ya.var(ddof=1)) / (nx + ny - 2)
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0
        raise ValueError("pooled variance is zero")
    return diff / math.sqrt(pooled)


def pearson_r(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Sample correlation and its two-sided p-value (t with n - 2 df)."""
    xa, ya = _as_samples(x, "x"), _as_samples(y, "y")
    if xa.shape != ya.shape:
        raise ValueError("x and y must have equal length")
    n = xa.size
    if n < 3:
        raise ValueError("need at least three points")
    dx, dy = xa - xa.mean(), ya - ya.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("degenerate variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, t_sf_two_sided(t, n - 2)


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.size)
    sx = x[order]
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation (Pearson on average ranks)."""
    xa, ya = _as_samples(x, "x"), _as_samples(y, "y")
    if xa.shape != ya.shape:
        raise ValueError("x and y must have equal length")
    if xa.size < 2:
        raise ValueError("need at least two points")
    rx, ry = _average_ranks(xa), _average_ranks(ya)
    dx, dy = rx - rx.mean(), ry - ry.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("degenerate ranks")
    return max(-1.0, min(1.0, float(dx @ dy) / math.sqrt(sxx * syy)))
