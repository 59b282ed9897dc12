"""Sample sizes that control the width of an *empirical* confidence
interval.

Two sizes are computed per design:

``expected``
    the classical plug-in size: make the CI width at the assumed
    parameter value hit the target d0.  The realized width then beats d0
    only about half the time.

``exact``
    the smallest n such that the realized width is <= d0 with
    probability at least psi0.  The width is a monotone function of a
    scalar statistic in all three families, so the worst case over the
    "big and greedy" acceptance set of that statistic is its
    psi0-quantile; the search pushes the width at that quantile under
    d0.

Integer semantics follow the published reference tables exactly,
including their finalization quirks (the Normal scan returns one past
the first passing n; the plug-in Poisson search returns one below the
first passing exposure).  Deviating from those quirks by one breaks the
table reproduction, so they are kept and documented per function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

from .distributions import (
    binomial_quantile,
    chi_square_quantile,
    poisson_cdf,
    poisson_quantile,
    std_normal_quantile,
    student_t_quantile,
)
from .intervals import garwood_interval, garwood_rate_width, normal_t_width, wilson_width

__all__ = [
    "DesignSpec",
    "SearchPolicy",
    "SizingResult",
    "SearchError",
    "find_exact_n",
    "n_expected_normal",
    "n_exact_normal",
    "n_approx_normal",
    "n_expected_poisson",
    "n_exact_poisson",
    "n_expected_binomial",
    "n_exact_binomial",
    "normal_width_quantile",
    "poisson_width_quantile",
    "binomial_width_quantile",
    "size_design",
]

FAMILIES = ("normal", "poisson", "binomial")


class SearchError(RuntimeError):
    """An integer search exceeded its evaluation budget."""


@dataclass(frozen=True)
class DesignSpec:
    """Complete description of one sizing problem.

    ``param`` is the assumed parameter of the family: sigma for normal,
    the event rate for poisson, the success probability p0 for binomial.
    ``psi0`` is the required probability that the realized CI width stays
    below ``d0`` (the estimation analogue of power).
    """

    family: str
    param: float
    alpha: float
    psi0: float
    d0: float

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not self.d0 > 0.0:
            raise ValueError(f"required width d0 must be > 0, got {self.d0!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if not 0.5 < self.psi0 < 1.0:
            raise ValueError(
                f"psi0 must be in (0.5, 1); the quantile argument behind the exact "
                f"search needs it (got {self.psi0!r})")
        if self.family == "normal":
            # sigma = 0 is allowed as a degenerate simulation case; the
            # sizing functions themselves require sigma > 0
            if self.param < 0.0:
                raise ValueError(f"sigma must be >= 0, got {self.param!r}")
        elif not self.param > 0.0:
            raise ValueError(f"{self.family} parameter must be > 0, got {self.param!r}")
        if self.family == "binomial" and not self.param < 1.0:
            raise ValueError(f"binomial p0 must be in (0, 1), got {self.param!r}")

    @property
    def sigma(self) -> float:
        if self.family != "normal":
            raise AttributeError("sigma is defined for the normal family only")
        return self.param

    @property
    def rate(self) -> float:
        if self.family != "poisson":
            raise AttributeError("rate is defined for the poisson family only")
        return self.param

    @property
    def p0(self) -> float:
        if self.family != "binomial":
            raise AttributeError("p0 is defined for the binomial family only")
        return self.param


@dataclass(frozen=True)
class SearchPolicy:
    """Coarse-then-fine integer search parameters."""

    start: int
    jump: int
    step: int = 1

    def __post_init__(self) -> None:
        if self.start < 1:
            raise ValueError(f"start must be >= 1, got {self.start}")
        if not self.jump >= self.step >= 1:
            raise ValueError(f"need jump >= step >= 1, got jump={self.jump}, step={self.step}")


@dataclass(frozen=True)
class SizingResult:
    """Expected and exact sizes with the widths achieved at each.

    ``width_at_expected`` is the plug-in width at ``n_expected``;
    ``width_at_exact`` is the psi0-quantile of the realized width at
    ``n_exact``.  ``n_approx`` is filled for the normal family only.
    """

    n_expected: int
    n_exact: int
    n_approx: Optional[int]
    width_at_expected: float
    width_at_exact: float


# ---------------------------------------------------------------------------
# generic coarse/fine search

def find_exact_n(width_at_psi_quantile: Callable[[int], float], d0: float,
                 policy: SearchPolicy, *, strict: bool = False, floor: int = 1,
                 max_evals: int = 5_000_000) -> int:
    """Smallest n whose psi-quantile width is acceptable, by a coarse
    climb and a unit descent.

    The climb increases n by ``policy.jump`` until the width is
    acceptable (<= d0, or < d0 when ``strict``), then extends to a
    verification horizon ``n + max(jump, ceil(n/10))``; if the horizon
    itself fails, climbing resumes there.  The descent walks down by
    ``policy.step`` while the width stays acceptable and returns the last
    acceptable n.  The horizon extension makes the result independent of
    the jump size even when the width function saw-tooths across d0 near
    the crossing (discrete quantile jumps do this), provided the width is
    eventually acceptable and the saw-tooth band is narrower than a tenth
    of the crossing location.
    """
    if not d0 > 0.0:
        raise ValueError(f"d0 must be > 0, got {d0!r}")
    acceptable = (lambda w: w < d0) if strict else (lambda w: w <= d0)
    budget = max_evals

    def width(n: int) -> float:
        nonlocal budget
        budget -= 1
        if budget < 0:
            raise SearchError(
                f"width search exceeded {max_evals} evaluations (d0={d0}, policy={policy})")
        return width_at_psi_quantile(n)

    n = max(policy.start, floor)
    while not acceptable(width(n)):
        n += policy.jump
    while True:
        horizon = n + max(policy.jump, math.ceil(n / 10))
        if acceptable(width(horizon)):
            break
        n = horizon
    n = horizon
    while n - policy.step >= floor and acceptable(width(n - policy.step)):
        n -= policy.step
    return n


# ---------------------------------------------------------------------------
# Normal family

def _check_normal_args(sigma: float, d0: float, alpha: float) -> None:
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma!r}")
    if not d0 > 0.0:
        raise ValueError(f"d0 must be > 0, got {d0!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")


def _check_psi(psi0: float) -> None:
    if not 0.5 < psi0 < 1.0:
        raise ValueError(f"psi0 must be in (0.5, 1), got {psi0!r}")


def n_expected_normal(sigma: float, d0: float, alpha: float = 0.05) -> int:
    """Plug-in normal-approximation size: ceil((2 z sigma / d0)^2)."""
    _check_normal_args(sigma, d0, alpha)
    za = std_normal_quantile(1.0 - alpha / 2.0)
    return math.ceil((2.0 * za * sigma / d0) ** 2)


def _scan_width_normal(n: int, sigma: float, alpha: float, psi0: float) -> float:
    # width at the psi0-quantile dispersion under the s^2 = Q/n
    # convention: 2 t(1-a/2, n-1) sigma sqrt(chi2(psi0, n-1)) / n
    ta = student_t_quantile(1.0 - alpha / 2.0, n - 1)
    qb = chi_square_quantile(psi0, n - 1)
    return 2.0 * ta * sigma * math.sqrt(qb) / n


def n_exact_normal(sigma: float, d0: float, alpha: float = 0.05, psi0: float = 0.8,
                   max_iters: int = 2_000_000) -> int:
    """Exact normal size by the reference upward scan.

    Scans n upward from the plug-in size and returns one past the first n
    whose quantile width drops to d0; that finalization reproduces the
    published table values.  (n is floored at 2 so the t quantile has at
    least one degree of freedom.)
    """
    _check_normal_args(sigma, d0, alpha)
    _check_psi(psi0)
    n0 = max(2, n_expected_normal(sigma, d0, alpha))
    sd0 = sigma * math.sqrt(chi_square_quantile(psi0, n0 - 1))
    w0 = normal_t_width(n0, sd0, alpha)
    if w0 <= d0:
        return n0
    n = n0
    for _ in range(max_iters):
        if _scan_width_normal(n, sigma, alpha, psi0) <= d0:
            return n + 1
        n += 1
    raise SearchError(f"normal exact-size scan did not converge from n0={n0}")


def n_approx_normal(sigma: float, d0: float, alpha: float = 0.05, psi0: float = 0.8,
                    max_iters: int = 2_000_000) -> int:
    """No-special-functions approximation to the exact normal size.

    Replaces the chi-square quantile with the Fisher square-root
    approximation ((sqrt(2n) + z_psi)^2)/2 and scans with the reference
    code's exact bookkeeping (including its "+2" finalization).  Lands
    within 2 of :func:`n_exact_normal` on the published grid.
    """
    _check_normal_args(sigma, d0, alpha)
    _check_psi(psi0)
    za = std_normal_quantile(1.0 - alpha / 2.0)
    zb = std_normal_quantile(psi0)
    n0 = max(2, n_expected_normal(sigma, d0, alpha))
    dn = d0 / sigma
    d = 10.0 * dn
    s0 = math.floor(4.0 * (za * dn) ** 2)
    w0 = normal_t_width(n0, sigma, alpha)
    step = 1 if w0 > d0 else -1
    for _ in range(max_iters):
        if d <= dn:
            return s0 + 2
        if s0 == 0:
            d = math.inf
        else:
            qb = (math.sqrt(2.0 * s0) + zb) ** 2 / 2.0
            d = 2.0 * za * math.sqrt(qb) / s0
        s0 += step
        if s0 < 0:
            raise SearchError("approximate normal scan walked below zero")
    raise SearchError("approximate normal scan did not converge")


def normal_width_quantile(n: int, sigma: float, alpha: float = 0.05,
                          psi: float = 0.8) -> float:
    """psi-quantile of the simulated t-interval width at sample size n.

    Uses the verification harness's width model (standard error drawn as
    sigma*sqrt(chi2 with n degrees of freedom)/n), so it is the analytic
    counterpart of what :func:`ciwidth.simulate.simulate_normal`
    estimates.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    _check_normal_args(sigma, 1.0, alpha)
    _check_psi(psi)
    ta = student_t_quantile(1.0 - alpha / 2.0, n - 1)
    return 2.0 * ta * sigma * math.sqrt(chi_square_quantile(psi, n)) / n


# ---------------------------------------------------------------------------
# Poisson family

def _check_poisson_args(rate: float, d0: float, alpha: float) -> None:
    if not rate > 0.0:
        raise ValueError(f"rate must be > 0, got {rate!r}")
    if not d0 > 0.0:
        raise ValueError(f"d0 must be > 0, got {d0!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")


def _default_poisson_policy(rate: float, d0: float) -> SearchPolicy:
    start = math.ceil(16.0 * rate / (d0 * d0))
    return SearchPolicy(start=max(1, start), jump=max(1, math.ceil(start / 10)))


@lru_cache(maxsize=65536)
def _garwood_width_cached(x: int, alpha: float) -> float:
    return garwood_interval(x, alpha).width


@lru_cache(maxsize=65536)
def _poisson_quantile_edge(k: int, psi: float) -> float:
    """The rate lam* where the psi-quantile steps past k, i.e. the root of
    poisson_cdf(k, lam) = psi.  Used only to cache quantile lookups."""
    if k < 0:
        return 0.0
    if k == 0:
        return -math.log(psi)
    z = std_normal_quantile(psi)
    root = 0.5 * (-z + math.sqrt(z * z + 4.0 * k))
    lam = max(root * root, 1e-12)
    lo, hi = 0.0, max(4.0 * lam, 8.0)
    while poisson_cdf(k, hi) > psi:
        lo = hi
        hi *= 2.0
    for _ in range(200):
        f = poisson_cdf(k, lam) - psi
        if f > 0.0:
            lo = lam
        else:
            hi = lam
        pdf = math.exp(k * math.log(lam) - lam - math.lgamma(k + 1.0))
        nxt = lam + f / pdf if pdf > 0.0 else 0.5 * (lo + hi)
        lam = nxt if lo < nxt < hi else 0.5 * (lo + hi)
        if hi - lo <= 1e-12 * (1.0 + hi):
            break
    return lam


def _make_poisson_psi_width(rate: float, alpha: float,
                            psi: float) -> Callable[[int], float]:
    """Width-at-psi-quantile as a function of integer exposure, with an
    internal bracket cache so long unit descents cost O(1) per call.

    The cached quantile q is only trusted while lam sits strictly inside
    its solved validity bracket and away from the edges; anything else
    re-derives q from the exact discrete quantile, so the cache can never
    change a comparison outcome.
    """
    q = -1
    lo = hi = 0.0

    def width(s: int) -> float:
        nonlocal q, lo, hi
        lam = s * rate
        guard = 1e-9 * (1.0 + lam)
        if q < 0 or not (lo + guard < lam <= hi - guard):
            q = poisson_quantile(psi, lam)
            lo = _poisson_quantile_edge(q - 1, psi)
            hi = _poisson_quantile_edge(q, psi)
        return _garwood_width_cached(q, alpha) / s

    return width


def poisson_width_quantile(n: int, rate: float, alpha: float = 0.05,
                           psi: float = 0.8) -> float:
    """psi-quantile of the Garwood rate-interval width at exposure n:
    the width at the psi-quantile count, since width grows with the
    count."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    _check_poisson_args(rate, 1.0, alpha)
    _check_psi(psi)
    return garwood_rate_width(poisson_quantile(psi, n * rate), n, alpha)


def n_expected_poisson(rate: float, d0: float, alpha: float = 0.05,
                       policy: Optional[SearchPolicy] = None) -> int:
    """Plug-in Poisson exposure.

    Evaluates the Garwood width at the real-valued expected count
    lam = n*rate (no rounding) and locates the crossing of the target
    width.  Following the reference search's exit bookkeeping, the
    returned exposure is one *below* the smallest n whose plug-in width
    is <= d0; the published tables are reproduced only with that
    convention.
    """
    _check_poisson_args(rate, d0, alpha)
    policy = policy or _default_poisson_policy(rate, d0)

    def width(s: int) -> float:
        return garwood_rate_width(s * rate, s, alpha)

    # climb for an upper bracket; the plug-in width is strictly
    # decreasing in the exposure, so bisection finds the same crossing
    # the reference unit descent does
    hi = max(policy.start, 1)
    budget = 10_000
    while width(hi) > d0:
        hi += max(policy.jump, math.ceil(hi / 10))
        budget -= 1
        if budget == 0:
            raise SearchError(f"poisson plug-in climb did not converge (rate={rate}, d0={d0})")
    if width(1) <= d0:
        return 0
    lo = 1  # width(lo) > d0 invariant
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if width(mid) <= d0:
            hi = mid
        else:
            lo = mid
    return hi - 1


def n_exact_poisson(rate: float, d0: float, alpha: float = 0.05, psi0: float = 0.8,
                    policy: Optional[SearchPolicy] = None) -> int:
    """Smallest exposure n with the Garwood width at the psi0-quantile
    count at most d0 (and staying there for larger n)."""
    _check_poisson_args(rate, d0, alpha)
    _check_psi(psi0)
    policy = policy or _default_poisson_policy(rate, d0)
    return find_exact_n(_make_poisson_psi_width(rate, alpha, psi0), d0, policy)


# ---------------------------------------------------------------------------
# Binomial family

def _check_binomial_args(p0: float, d0: float, alpha: float) -> None:
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"p0 must be in (0, 1), got {p0!r}")
    if not d0 > 0.0:
        raise ValueError(f"d0 must be > 0, got {d0!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")


def _default_binomial_policy(p0: float, d0: float, alpha: float) -> SearchPolicy:
    za = std_normal_quantile(1.0 - alpha / 2.0)
    start = math.ceil(za * za * p0 * (1.0 - p0) / d0 / d0)
    return SearchPolicy(start=max(1, start), jump=max(1, math.ceil(start / 10)))


def n_expected_binomial(p0: float, d0: float, alpha: float = 0.05,
                        policy: Optional[SearchPolicy] = None) -> int:
    """Plug-in binomial size: smallest n with the Wilson width at
    min(p0, 1-p0) strictly below d0."""
    _check_binomial_args(p0, d0, alpha)
    policy = policy or _default_binomial_policy(p0, d0, alpha)
    minp = min(p0, 1.0 - p0)

    def width(s: int) -> float:
        return wilson_width(minp, s, alpha)

    return find_exact_n(width, d0, policy, strict=True)


def binomial_width_quantile(n: int, p0: float, alpha: float = 0.05,
                            psi: float = 0.8) -> float:
    """psi-quantile of the Wilson width at sample size n: the width at
    the psi-quantile count of Bin(n, min(p0, 1-p0)), with the observed
    proportion clamped at 1/2 where the quantile reaches it (the width is
    maximal there)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    _check_binomial_args(p0, 1.0, alpha)
    _check_psi(psi)
    minp = min(p0, 1.0 - p0)
    q_hat = min(0.5, binomial_quantile(psi, n, minp) / n)
    return wilson_width(q_hat, n, alpha)


def n_exact_binomial(p0: float, d0: float, alpha: float = 0.05, psi0: float = 0.8,
                     policy: Optional[SearchPolicy] = None) -> int:
    """Smallest n with the Wilson width at the psi0-quantile proportion
    strictly below d0 (and staying there for larger n).

    For p0 past 1/2 the search operates on min(p0, 1-p0); whenever the
    quantile proportion reaches the 1/2 clamp the result degenerates to
    the plug-in size.  The one-interval worst-case argument behind this
    search is established for min(p0, 1-p0) below 0.45.
    """
    _check_binomial_args(p0, d0, alpha)
    _check_psi(psi0)
    policy = policy or _default_binomial_policy(p0, d0, alpha)
    minp = min(p0, 1.0 - p0)

    def width(s: int) -> float:
        q_hat = min(0.5, binomial_quantile(psi0, s, minp) / s)
        return wilson_width(q_hat, s, alpha)

    return find_exact_n(width, d0, policy, strict=True)


# ---------------------------------------------------------------------------
# orchestration

def size_design(spec: DesignSpec, policy: Optional[SearchPolicy] = None) -> SizingResult:
    """Expected / exact (/ approximate) sizes plus achieved widths for a
    design, dispatching on the family."""
    if spec.family == "normal":
        ne = n_expected_normal(spec.sigma, spec.d0, spec.alpha)
        nx = n_exact_normal(spec.sigma, spec.d0, spec.alpha, spec.psi0)
        na: Optional[int] = n_approx_normal(spec.sigma, spec.d0, spec.alpha, spec.psi0)
        w_exp = normal_t_width(max(ne, 2), spec.sigma, spec.alpha)
        w_ex = normal_width_quantile(nx, spec.sigma, spec.alpha, spec.psi0)
    elif spec.family == "poisson":
        ne = n_expected_poisson(spec.rate, spec.d0, spec.alpha, policy)
        nx = n_exact_poisson(spec.rate, spec.d0, spec.alpha, spec.psi0, policy)
        na = None
        w_exp = garwood_rate_width(ne * spec.rate, ne, spec.alpha) if ne >= 1 else math.inf
        w_ex = poisson_width_quantile(nx, spec.rate, spec.alpha, spec.psi0)
    else:
        minp = min(spec.p0, 1.0 - spec.p0)
        ne = n_expected_binomial(spec.p0, spec.d0, spec.alpha, policy)
        nx = n_exact_binomial(spec.p0, spec.d0, spec.alpha, spec.psi0, policy)
        na = None
        w_exp = wilson_width(minp, ne, spec.alpha)
        w_ex = binomial_width_quantile(nx, spec.p0, spec.alpha, spec.psi0)
    if nx < ne:
        warnings.warn(
            f"exact size {nx} fell below expected size {ne} for {spec}; "
            f"outside the validated regime", stacklevel=2)
    return SizingResult(n_expected=ne, n_exact=nx, n_approx=na,
                        width_at_expected=w_exp, width_at_exact=w_ex)
