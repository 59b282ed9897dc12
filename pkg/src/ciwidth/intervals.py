"""Confidence intervals and width functions for the three worked families.

Normal mean         two-sided Student t interval, full width
                    2 * s * t(1 - alpha/2, n-1) / sqrt(n)
Poisson count/rate  Garwood chi-square interval
                    (chi2(alpha/2, 2x) / 2, chi2(1 - alpha/2, 2x + 2) / 2)
Binomial proportion Wilson score interval

plus the Anscombe square-root transform pair used for a no-software
approximation of upper Poisson quantiles.

Widths are always full widths (upper minus lower), never half-widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import (
    chi_square_quantile,
    poisson_quantile,
    std_normal_quantile,
    student_t_quantile,
)

__all__ = [
    "Interval",
    "NormalSample",
    "CountSample",
    "ProportionSample",
    "normal_t_width",
    "garwood_interval",
    "garwood_rate_width",
    "wilson_interval",
    "wilson_width",
    "anscombe_forward",
    "anscombe_inverse",
    "approx_poisson_power_quantile",
]


@dataclass(frozen=True)
class Interval:
    """A two-sided confidence interval."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if math.isnan(self.lower) or math.isnan(self.upper) or self.lower > self.upper:
            raise ValueError(f"need lower <= upper, got ({self.lower!r}, {self.upper!r})")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        """Strict containment, matching how coverage is counted in the
        verification harness."""
        return self.lower < value < self.upper


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")


@dataclass(frozen=True)
class NormalSample:
    """Summary of an i.i.d. normal sample; ``s`` is the standard-deviation
    estimate with s^2 = Q/n, Q the centered sum of squares."""

    n: int
    mean: float
    s: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need n >= 2 for a t interval, got n={self.n}")
        if self.s < 0.0:
            raise ValueError(f"need s >= 0, got s={self.s}")

    def t_interval(self, alpha: float) -> Interval:
        half = 0.5 * normal_t_width(self.n, self.s, alpha)
        return Interval(self.mean - half, self.mean + half)


@dataclass(frozen=True)
class CountSample:
    """An event count over an exposure (person-time or unit count)."""

    x: int
    exposure: float

    def __post_init__(self) -> None:
        if self.x < 0:
            raise ValueError(f"need x >= 0, got x={self.x}")
        if self.exposure <= 0.0:
            raise ValueError(f"need exposure > 0, got {self.exposure!r}")

    @property
    def rate(self) -> float:
        return self.x / self.exposure

    def rate_interval(self, alpha: float) -> Interval:
        ci = garwood_interval(self.x, alpha)
        return Interval(ci.lower / self.exposure, ci.upper / self.exposure)


@dataclass(frozen=True)
class ProportionSample:
    """Successes out of trials."""

    x: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need n >= 1, got n={self.n}")
        if not 0 <= self.x <= self.n:
            raise ValueError(f"need 0 <= x <= n, got x={self.x}, n={self.n}")

    @property
    def p_hat(self) -> float:
        return self.x / self.n

    def wilson(self, alpha: float) -> Interval:
        return wilson_interval(self.x, self.n, alpha)


# ---------------------------------------------------------------------------
# Normal

def normal_t_width(n: int, s: float, alpha: float) -> float:
    """Full width of the two-sided t interval for a mean:
    2 * s * t(1 - alpha/2, n - 1) / sqrt(n)."""
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    if s < 0.0:
        raise ValueError(f"need s >= 0, got s={s!r}")
    _check_alpha(alpha)
    return 2.0 * s * student_t_quantile(1.0 - alpha / 2.0, n - 1) / math.sqrt(n)


# ---------------------------------------------------------------------------
# Poisson (Garwood)

def garwood_interval(x: float, alpha: float) -> Interval:
    """Exact chi-square interval for a Poisson count.

    ``x`` may be non-integral: the plug-in sizing path evaluates the
    interval at the real-valued expected count.  At x = 0 the lower bound
    is 0 (the df-0 chi-square point mass).
    """
    if x < 0.0:
        raise ValueError(f"need x >= 0, got x={x!r}")
    _check_alpha(alpha)
    lower = 0.5 * chi_square_quantile(alpha / 2.0, 2.0 * x)
    upper = 0.5 * chi_square_quantile(1.0 - alpha / 2.0, 2.0 * x + 2.0)
    return Interval(lower, upper)


def garwood_rate_width(x: float, exposure: float, alpha: float) -> float:
    """Width of the Garwood interval scaled to a rate: nondecreasing in
    x, strictly decreasing in exposure."""
    if exposure <= 0.0:
        raise ValueError(f"need exposure > 0, got {exposure!r}")
    return garwood_interval(x, alpha).width / exposure


# ---------------------------------------------------------------------------
# Binomial (Wilson)

def wilson_interval(x: int, n: int, alpha: float) -> Interval:
    """Wilson score interval; always contained in [0, 1]."""
    if n < 1:
        raise ValueError(f"need n >= 1, got n={n}")
    if not 0 <= x <= n:
        raise ValueError(f"need 0 <= x <= n, got x={x}, n={n}")
    _check_alpha(alpha)
    z = std_normal_quantile(1.0 - alpha / 2.0)
    p_hat = x / n
    denom = n + z * z
    center = (x + z * z / 2.0) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) * n + z * z / 4.0) / denom
    return Interval(center - half, center + half)


def wilson_width(p_hat: float, n: int, alpha: float) -> float:
    """Full width of the Wilson interval at observed proportion p_hat:
    2 * z * sqrt(p_hat*(1-p_hat)*n + z^2/4) / (n + z^2).

    Symmetric in p_hat <-> 1 - p_hat and maximal at p_hat = 1/2.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got n={n}")
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"need 0 <= p_hat <= 1, got {p_hat!r}")
    _check_alpha(alpha)
    z = std_normal_quantile(1.0 - alpha / 2.0)
    return 2.0 * z * math.sqrt(p_hat * (1.0 - p_hat) * n + z * z / 4.0) / (n * (1.0 + z * z / n))


# ---------------------------------------------------------------------------
# Anscombe transform

def anscombe_forward(x: float) -> float:
    """Variance-stabilizing map 2*sqrt(x + 3/8) for Poisson counts."""
    if x < 0.0:
        raise ValueError(f"need x >= 0, got {x!r}")
    return 2.0 * math.sqrt(x + 0.375)


def anscombe_inverse(z: float) -> float:
    """Companion inverse z^2/4 - 1/8.

    The pair is not a strict inverse: anscombe_inverse(anscombe_forward(x))
    equals x + 1/4 exactly.  Kept as published; the composite
    approximation below is validated against the exact quantile anyway.
    """
    return z * z / 4.0 - 0.125


def approx_poisson_power_quantile(lam: float, psi: float) -> float:
    """Normal-theory approximation to the upper Poisson quantile:
    shift the Anscombe transform by z(psi) and map back.

    Relative error is below 5% for lam >= 5 and psi in [0.8, 0.95].
    """
    if lam <= 0.0:
        raise ValueError(f"need lam > 0, got {lam!r}")
    if not 0.0 < psi < 1.0:
        raise ValueError(f"need 0 < psi < 1, got {psi!r}")
    return anscombe_inverse(anscombe_forward(lam) + std_normal_quantile(psi))


def exact_poisson_power_quantile(lam: float, psi: float) -> int:
    """Exact counterpart of :func:`approx_poisson_power_quantile`."""
    return poisson_quantile(psi, lam)
