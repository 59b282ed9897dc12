"""Seeded Monte Carlo verification of coverage and width probability.

For a design and a candidate sample size, the harness simulates the
sampling distribution of the confidence interval and reports

- ``coverage``: fraction of intervals containing the true parameter
  (strict containment), and
- ``power``: fraction of intervals strictly narrower than the target
  width d0.

Replications are partitioned into fixed blocks of ``BLOCK_SIZE``; block
``i`` draws from a PCG64 generator seeded with ``SeedSequence((seed, i))``
and blocks are reduced by integer summation, so results are identical no
matter how many threads evaluate the blocks or in which order.

The normal harness intentionally draws the standard error as
sigma * sqrt(chisq(n)) / n — with n, not n - 1, degrees of freedom —
because that is what the published verification code does; the sizing
side uses n - 1.  The two are reproduced verbatim on their own sides and
not reconciled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import std_normal_quantile, student_t_quantile
from .intervals import garwood_interval
from .sizing import DesignSpec

__all__ = ["BLOCK_SIZE", "SimConfig", "SimReport", "derive_seed",
           "simulate", "simulate_normal", "simulate_poisson", "simulate_binomial"]

BLOCK_SIZE = 4096

_MAX_LAMBDA = 1e12  # numpy's poisson sampler degrades far below this


@dataclass(frozen=True)
class SimConfig:
    """One simulation job: a design, the sample size under test, the
    replication count, and the master seed."""

    spec: DesignSpec
    n: int
    nsim: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.nsim < 1:
            raise ValueError(f"nsim must be >= 1, got {self.nsim}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimReport:
    """Monte Carlo estimates; both fractions are exact multiples of
    1/nsim."""

    coverage: float
    power: float
    nsim: int
    seed: int


def derive_seed(master: int, *key: int) -> int:
    """Deterministic 64-bit sub-seed for (master, key...); used by the
    table generator to give every row an independent stream."""
    ss = np.random.SeedSequence((int(master),) + tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((int(seed), int(block_index)))))


def _block_sizes(nsim: int) -> list[int]:
    full, rest = divmod(nsim, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _reduce(cfg: SimConfig, block_fn) -> SimReport:
    cover = 0
    narrow = 0
    for i, m in enumerate(_block_sizes(cfg.nsim)):
        c, w = block_fn(_block_rng(cfg.seed, i), m)
        cover += int(c)
        narrow += int(w)
    return SimReport(coverage=cover / cfg.nsim, power=narrow / cfg.nsim,
                     nsim=cfg.nsim, seed=cfg.seed)


# ---------------------------------------------------------------------------

def _normal_block_fn(cfg: SimConfig):
    sigma, alpha, d0 = cfg.spec.sigma, cfg.spec.alpha, cfg.spec.d0
    n = cfg.n
    ta = student_t_quantile(1.0 - alpha / 2.0, n - 1)
    sqrt_n = math.sqrt(n)

    def block(rng: np.random.Generator, m: int):
        se = sigma * np.sqrt(rng.chisquare(n, size=m)) / n
        mean = rng.standard_normal(m) * sigma / sqrt_n
        lo = mean - ta * se
        up = mean + ta * se
        return int(np.count_nonzero(lo * up < 0.0)), int(np.count_nonzero(up - lo < d0))

    return block


def simulate_normal(cfg: SimConfig) -> SimReport:
    """t-interval harness for a zero-mean normal with known sigma.

    Per replication: se = sigma*sqrt(chisq(n))/n, mean = sigma*Z/sqrt(n),
    interval mean +- t(1-alpha/2, n-1)*se.  Coverage is the sign test
    lower*upper < 0 around the true mean 0.  A zero sigma degenerates
    every interval to the point {0}, which counts as covered and narrow.
    """
    spec = cfg.spec
    if spec.family != "normal":
        raise ValueError(f"simulate_normal needs a normal design, got {spec.family!r}")
    if cfg.n < 2:
        raise ValueError(f"normal simulation needs n >= 2, got {cfg.n}")
    if spec.sigma == 0.0:
        return SimReport(coverage=1.0, power=1.0, nsim=cfg.nsim, seed=cfg.seed)
    return _reduce(cfg, _normal_block_fn(cfg))


@lru_cache(maxsize=65536)
def _garwood_bounds(x: int, alpha: float) -> tuple[float, float]:
    iv = garwood_interval(x, alpha)
    return iv.lower, iv.upper


def simulate_poisson(cfg: SimConfig) -> SimReport:
    """Garwood-interval harness: draw counts from Poisson(rate*n), build
    the rate interval for each, count strict coverage of the true rate
    and widths strictly below d0."""
    spec = cfg.spec
    if spec.family != "poisson":
        raise ValueError(f"simulate_poisson needs a poisson design, got {spec.family!r}")
    rate, alpha, d0 = spec.rate, spec.alpha, spec.d0
    n = cfg.n
    lam = rate * n
    if lam > _MAX_LAMBDA:
        raise ValueError(f"rate*n = {lam} too large to simulate faithfully")

    def block(rng: np.random.Generator, m: int):
        xs = rng.poisson(lam, size=m)
        uniq, inverse = np.unique(xs, return_inverse=True)
        bounds = np.array([_garwood_bounds(int(x), alpha) for x in uniq])
        lo = bounds[inverse, 0] / n
        up = bounds[inverse, 1] / n
        cover = np.count_nonzero((up > rate) & (lo < rate))
        narrow = np.count_nonzero(up - lo < d0)
        return int(cover), int(narrow)

    return _reduce(cfg, block)


def simulate_binomial(cfg: SimConfig) -> SimReport:
    """Wilson-interval harness: draw counts from Bin(n, p0), build the
    score interval for each, count strict coverage of p0 and widths
    strictly below d0."""
    spec = cfg.spec
    if spec.family != "binomial":
        raise ValueError(f"simulate_binomial needs a binomial design, got {spec.family!r}")
    p0, alpha, d0 = spec.p0, spec.alpha, spec.d0
    n = cfg.n
    z = std_normal_quantile(1.0 - alpha / 2.0)

    def block(rng: np.random.Generator, m: int):
        xs = rng.binomial(n, p0, size=m).astype(np.float64)
        denom = n + z * z
        center = (xs + z * z / 2.0) / denom
        half = z * np.sqrt(xs * (n - xs) / n + z * z / 4.0) / denom
        lo = center - half
        up = center + half
        cover = np.count_nonzero((up > p0) & (lo < p0))
        narrow = np.count_nonzero(up - lo < d0)
        return int(cover), int(narrow)

    return _reduce(cfg, block)


_SIMULATORS = {
    "normal": simulate_normal,
    "poisson": simulate_poisson,
    "binomial": simulate_binomial,
}


def simulate(cfg: SimConfig) -> SimReport:
    """Dispatch to the family-specific harness."""
    return _SIMULATORS[cfg.spec.family](cfg)
