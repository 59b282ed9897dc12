"""Scalar CDFs and quantile functions for the distributions the sizing
formulas need: standard normal, Student t, chi-square, Poisson, Binomial.

Everything is self-contained on top of ``math`` (erf/erfc, lgamma).  The
continuous CDFs go through the regularized incomplete gamma (chi-square,
Poisson tail) and incomplete beta (Student t, Binomial tail) functions;
quantiles invert the CDFs with safeguarded Newton iterations that fall
back to bisection, targeting better than 1e-12 accuracy in probability
space.  That head-room matters: the integer sample-size searches compare
widths built from these quantiles against a threshold, and a sloppy
quantile could flip a comparison near the crossing point.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math

__all__ = [
    "std_normal_cdf",
    "std_normal_quantile",
    "student_t_cdf",
    "student_t_quantile",
    "chi_square_cdf",
    "chi_square_quantile",
    "poisson_cdf",
    "poisson_quantile",
    "binomial_cdf",
    "binomial_quantile",
]

_SQRT2 = math.sqrt(2.0)
_EPS = 2.220446049250313e-16
_TINY = 1e-300
_MAX_ITER = 1_000_000


def _check_prob(p: float, name: str = "p") -> None:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"{name} must be a probability in [0, 1], got {p!r}")


def _check_open_prob(p: float, name: str = "p") -> None:
    _check_prob(p, name)
    if p == 0.0 or p == 1.0:
        raise ValueError(f"{name}={p!r} puts the quantile at infinity; need 0 < {name} < 1")


# ---------------------------------------------------------------------------
# regularized incomplete gamma P(a, x) / Q(a, x)

def _gamma_p_series(a: float, x: float) -> float:
    # series for P(a, x), reliable for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_cf(a: float, x: float) -> float:
    # Lentz continued fraction for Q(a, x), reliable for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_p(a: float, x: float) -> float:
    if x < 0.0 or a < 0.0:
        raise ValueError(f"incomplete gamma needs a >= 0 and x >= 0, got a={a}, x={x}")
    if a == 0.0:
        return 1.0  # point mass at zero
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _gamma_p_series(a, x))
    return max(0.0, 1.0 - _gamma_q_cf(a, x))


def _gamma_q(a: float, x: float) -> float:
    if x < 0.0 or a < 0.0:
        raise ValueError(f"incomplete gamma needs a >= 0 and x >= 0, got a={a}, x={x}")
    if a == 0.0:
        return 0.0
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_p_series(a, x))
    return min(1.0, _gamma_q_cf(a, x))


# ---------------------------------------------------------------------------
# regularized incomplete beta I_x(a, b)

def _beta_cf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def _beta_inc(a: float, b: float, x: float) -> float:
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"incomplete beta needs a, b > 0, got a={a}, b={b}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _beta_cf(a, b, x) / a
    return 1.0 - bt * _beta_cf(b, a, 1.0 - x) / b


# ---------------------------------------------------------------------------
# standard normal

def std_normal_cdf(z: float) -> float:
    """Standard normal CDF via erfc, accurate in both tails."""
    if math.isnan(z) or math.isinf(z):
        raise ValueError(f"std_normal_cdf needs a finite argument, got {z!r}")
    return 0.5 * math.erfc(-z / _SQRT2)


def _std_normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


# Acklam's rational approximation, then Halley refinement against the CDF.
_ACK_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ACK_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_ACK_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ACK_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)


def std_normal_quantile(p: float) -> float:
    """Inverse standard normal CDF, |cdf(result) - p| below 1e-14."""
    _check_open_prob(p)
    if p == 0.5:
        return 0.0
    a, b, c, d = _ACK_A, _ACK_B, _ACK_C, _ACK_D
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    elif p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    for _ in range(3):
        err = std_normal_cdf(z) - p
        if err == 0.0:
            break
        u = err / _std_normal_pdf(z)
        z -= u / (1.0 + 0.5 * z * u)  # Halley step
    return z


# ---------------------------------------------------------------------------
# generic safeguarded Newton on a monotone CDF

def _invert_cdf(cdf, pdf, p: float, x0: float, lo: float, hi: float,
                tol: float = 1e-13) -> float:
    """Solve cdf(x) = p for x in [lo, hi] by Newton with a bisection cage.

    ``x0`` is the initial guess; ``lo``/``hi`` must bracket the root
    (cdf(lo) <= p <= cdf(hi)).  Converges when the probability error or
    the bracket collapses below tolerance.
    """
    x = min(max(x0, lo), hi)
    for _ in range(200):
        f = cdf(x) - p
        if f > 0.0:
            hi = x
        elif f < 0.0:
            lo = x
        else:
            return x
        if abs(f) < tol and (hi - lo) <= 1e-10 * (1.0 + abs(x)):
            return x
        g = pdf(x)
        step_ok = False
        if g > 0.0 and math.isfinite(g):
            x_new = x - f / g
            if lo < x_new < hi:
                x = x_new
                step_ok = True
        if not step_ok:
            if math.isinf(hi):
                hi_probe = max(2.0 * max(lo, 1.0), lo + 1.0)
                while cdf(hi_probe) < p:
                    hi_probe *= 2.0
                    if hi_probe > 1e300:
                        raise ArithmeticError("CDF inversion failed to bracket the root")
                hi = hi_probe
            x = 0.5 * (lo + hi)
        if (hi - lo) <= _EPS * (1.0 + abs(x)):
            return x
    return x


# ---------------------------------------------------------------------------
# chi-square

def _check_df(df: float, minimum: float = 0.0) -> None:
    if math.isnan(df) or df < minimum:
        raise ValueError(f"degrees of freedom must be >= {minimum}, got {df!r}")


def chi_square_cdf(x: float, df: float) -> float:
    """Chi-square CDF; df = 0 is the point mass at zero."""
    _check_df(df)
    if df == 0.0:
        return 1.0 if x >= 0.0 else 0.0
    if x <= 0.0:
        return 0.0
    return _gamma_p(0.5 * df, 0.5 * x)


def _chi_square_log_pdf(x: float, df: float) -> float:
    hdf = 0.5 * df
    return (hdf - 1.0) * math.log(x) - 0.5 * x - hdf * math.log(2.0) - math.lgamma(hdf)


def chi_square_quantile(p: float, df: float) -> float:
    """Chi-square quantile; df = 0 returns 0 for every p (point mass).

    Accepts real-valued df; the Poisson plug-in sizing path evaluates it
    at non-integer df.
    """
    _check_df(df)
    if df == 0.0:
        _check_prob(p)
        return 0.0
    _check_open_prob(p)
    hdf = 0.5 * df
    if hdf < 1.0:
        # small-shape start from P(a, x) ~ x^a / (a Gamma(a))
        x0 = 2.0 * math.exp((math.log(p) + math.lgamma(hdf + 1.0)) / hdf)
    else:
        # Wilson-Hilferty
        z = std_normal_quantile(p)
        t = 1.0 - 2.0 / (9.0 * df) + z * math.sqrt(2.0 / (9.0 * df))
        x0 = df * t * t * t
    x0 = max(x0, 1e-300)

    def cdf(x: float) -> float:
        return chi_square_cdf(x, df)

    def pdf(x: float) -> float:
        if x <= 0.0:
            return 0.0
        return math.exp(_chi_square_log_pdf(x, df))

    hi = max(2.0 * x0, df + 20.0 * math.sqrt(2.0 * df) + 40.0)
    while chi_square_cdf(hi, df) < p:
        hi *= 2.0
    return _invert_cdf(cdf, pdf, p, x0, 0.0, hi)


# ---------------------------------------------------------------------------
# Student t

def student_t_cdf(t: float, df: float) -> float:
    """Student t CDF via the incomplete beta function."""
    _check_df(df, minimum=1.0)
    if math.isnan(t):
        raise ValueError("student_t_cdf needs a finite argument")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * _beta_inc(0.5 * df, 0.5, x)
    return 1.0 - tail if t > 0.0 else tail


def _student_t_log_pdf(t: float, df: float) -> float:
    return (math.lgamma(0.5 * (df + 1.0)) - math.lgamma(0.5 * df)
            - 0.5 * math.log(df * math.pi)
            - 0.5 * (df + 1.0) * math.log1p(t * t / df))


def student_t_quantile(p: float, df: float) -> float:
    """Student t quantile for df >= 1; approaches the normal quantile as
    df grows."""
    _check_df(df, minimum=1.0)
    _check_open_prob(p)
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_t_quantile(1.0 - p, df)
    z = std_normal_quantile(p)
    x0 = z + (z ** 3 + z) / (4.0 * df)  # Cornish-Fisher start

    def cdf(t: float) -> float:
        return student_t_cdf(t, df)

    def pdf(t: float) -> float:
        return math.exp(_student_t_log_pdf(t, df))

    hi = max(2.0 * abs(x0) + 1.0, 2.0)
    while student_t_cdf(hi, df) < p:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("t quantile bracket expansion failed")
    return _invert_cdf(cdf, pdf, p, x0, 0.0, hi)


# ---------------------------------------------------------------------------
# Poisson

def _check_lambda(lam: float) -> None:
    if math.isnan(lam) or lam <= 0.0 or math.isinf(lam):
        raise ValueError(f"Poisson rate must be finite and > 0, got {lam!r}")


def poisson_cdf(k: int, lam: float) -> float:
    """P(X <= k) for X ~ Poisson(lam), through the gamma-tail identity
    sum_{i<=k} pmf(i) = Q(k+1, lam)."""
    _check_lambda(lam)
    if k < 0:
        raise ValueError(f"poisson_cdf needs k >= 0, got {k}")
    return _gamma_q(math.floor(k) + 1.0, lam)


def poisson_quantile(p: float, lam: float) -> int:
    """Smallest integer q with poisson_cdf(q, lam) >= p."""
    _check_lambda(lam)
    _check_open_prob(p)
    z = std_normal_quantile(p)
    guess = lam + z * math.sqrt(lam) + (z * z - 1.0) / 6.0
    q = max(0, math.floor(guess))
    while poisson_cdf(q, lam) < p:
        q += 1
    while q > 0 and poisson_cdf(q - 1, lam) >= p:
        q -= 1
    return q


# ---------------------------------------------------------------------------
# Binomial

def _check_binomial(n: int, p: float) -> None:
    if n < 1 or int(n) != n:
        raise ValueError(f"binomial size must be an integer >= 1, got {n!r}")
    _check_prob(p)


def binomial_cdf(k: int, n: int, p: float) -> float:
    """P(X <= k) for X ~ Bin(n, p), via the incomplete-beta tail identity;
    stable up to n of order 1e6."""
    _check_binomial(n, p)
    if k < 0 or k > n or int(k) != k:
        raise ValueError(f"binomial_cdf needs 0 <= k <= n, got k={k!r}, n={n}")
    k = int(k)
    if k == n:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    return _beta_inc(float(n - k), float(k + 1), 1.0 - p)


def binomial_quantile(prob: float, n: int, p: float) -> int:
    """Smallest integer q with binomial_cdf(q, n, p) >= prob."""
    _check_binomial(n, p)
    _check_open_prob(prob, "prob")
    if p == 0.0:
        return 0
    if p == 1.0:
        return n
    z = std_normal_quantile(prob)
    mu = n * p
    sd = math.sqrt(n * p * (1.0 - p))
    q = min(n, max(0, math.floor(mu + z * sd)))
    while q < n and binomial_cdf(q, n, p) < prob:
        q += 1
    while q > 0 and binomial_cdf(q - 1, n, p) >= prob:
        q -= 1
    return q
