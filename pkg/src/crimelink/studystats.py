"""Paired-comparison statistics for registration-method studies.

Covers exactly the toolkit needed to analyze a two-method within-subject
experiment: paired two-sided t-tests, Cohen's d (pooled by default, the
paired-dz variant on request), a-priori sample-size computation for the
paired t-test, per-data-point efficiency arithmetic, and five-number box
summaries.

The Student-t CDF is evaluated through the regularized incomplete beta
function; power of the paired t-test uses the noncentral-t distribution,
integrated numerically over the chi distribution of the sample standard
deviation (absolute tolerance 1e-10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy import integrate, optimize, special


class DegenerateSampleError(ValueError):
    pass


@dataclass(frozen=True)
class PairedSample:
    """Within-subject measurements for two methods.

    Differences are computed as ``b - a`` (second method minus first), so a
    positive t statistic means the second method scored higher.
    """

    labels: tuple[str, str]
    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.pairs) < 2:
            raise ValueError("paired sample needs at least 2 pairs")
        for a, b in self.pairs:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError("paired sample contains non-finite values")

    def differences(self) -> list[float]:
        return [b - a for a, b in self.pairs]


@dataclass(frozen=True)
class TestResult:
    t: float
    df: int
    p_two_sided: float
    mean_diff: float
    sd_diff: float

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "df": self.df,
            "p_two_sided": self.p_two_sided,
            "mean_diff": self.mean_diff,
            "sd_diff": self.sd_diff,
        }


@dataclass(frozen=True)
class EffectSize:
    d: float
    method: str  # "pooled" or "paired-dz"


@dataclass(frozen=True)
class PowerRequest:
    d: float
    alpha: float = 0.05
    power: float = 0.8

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("effect size must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.power < 1:
            raise ValueError("target power must lie in (0, 1); 1 is unattainable")


@dataclass(frozen=True)
class PowerResult:
    n_fractional: float
    n_required: int
    achieved_power: float


def mean_sd(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def student_t_cdf(t: float, df: float) -> float:
    """CDF of Student's t via the regularized incomplete beta function."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * special.betainc(df / 2.0, 0.5, x)
    return 1.0 - tail if t > 0 else tail


def student_t_quantile(p: float, df: float) -> float:
    """Inverse of :func:`student_t_cdf` by bracketed root finding."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if p == 0.5:
        return 0.0
    lo, hi = -2.0, 2.0
    while student_t_cdf(lo, df) > p:
        lo *= 2.0
    while student_t_cdf(hi, df) < p:
        hi *= 2.0
    return float(optimize.brentq(lambda t: student_t_cdf(t, df) - p, lo, hi, xtol=1e-12))


def paired_t_test(sample: PairedSample) -> TestResult:
    """Two-sided paired t-test on the per-subject differences."""
    diffs = sample.differences()
    n = len(diffs)
    mean_d, sd_d = mean_sd(diffs)
    if sd_d == 0.0:
        raise DegenerateSampleError("all paired differences are identical; t is undefined")
    t = mean_d / (sd_d / math.sqrt(n))
    df = n - 1
    p = 2.0 * student_t_cdf(-abs(t), df)
    return TestResult(t=t, df=df, p_two_sided=min(1.0, p), mean_diff=mean_d, sd_diff=sd_d)


def cohens_d_pooled(
    stats_a: tuple[float, float], stats_b: tuple[float, float]
) -> EffectSize:
    """d = (mean_a - mean_b) / sqrt((sd_a^2 + sd_b^2) / 2)."""
    (mean_a, sd_a), (mean_b, sd_b) = stats_a, stats_b
    if sd_a < 0 or sd_b < 0:
        raise ValueError("standard deviations must be non-negative")
    if sd_a == 0 and sd_b == 0:
        raise DegenerateSampleError("both standard deviations are zero; d is undefined")
    pooled = math.sqrt((sd_a * sd_a + sd_b * sd_b) / 2.0)
    return EffectSize(d=(mean_a - mean_b) / pooled, method="pooled")


def cohens_dz(sample: PairedSample) -> EffectSize:
    """Paired-differences variant: mean difference over the sd of differences."""
    mean_d, sd_d = mean_sd(sample.differences())
    if sd_d == 0.0:
        raise DegenerateSampleError("all paired differences are identical; dz is undefined")
    return EffectSize(d=mean_d / sd_d, method="paired-dz")


# --- power of the paired two-sided t-test -----------------------------------

def _chi_logpdf(s: float, df: float) -> float:
    # chi distribution (sqrt of chi-square with df degrees of freedom)
    return (
        (1.0 - df / 2.0) * math.log(2.0)
        + (df - 1.0) * math.log(s)
        - s * s / 2.0
        - math.lgamma(df / 2.0)
    )


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def noncentral_t_cdf(t: float, df: float, ncp: float) -> float:
    """P(T <= t) for noncentral t, by integration over the chi distribution.

    T = (Z + ncp) / (S / sqrt(df)) with S ~ chi(df), so
    P(T <= t) = E[ Phi(t * S / sqrt(df) - ncp) ].
    """
    sqrt_df = math.sqrt(df)

    def integrand(s: float) -> float:
        return _normal_cdf(t * s / sqrt_df - ncp) * math.exp(_chi_logpdf(s, df))

    # chi(df) mass concentrates around sqrt(df); integrate a generous window
    upper = sqrt_df + 12.0 * max(1.0, sqrt_df)
    value, _ = integrate.quad(integrand, 0.0, upper, epsabs=1e-10, epsrel=1e-10, limit=200)
    return min(1.0, max(0.0, value))


def paired_t_power(n: float, d: float, alpha: float = 0.05) -> float:
    """Power of the two-sided paired t-test at (real-valued) sample size n."""
    if n <= 1:
        return 0.0
    df = n - 1.0
    ncp = d * math.sqrt(n)
    t_crit = student_t_quantile(1.0 - alpha / 2.0, df)
    return 1.0 - noncentral_t_cdf(t_crit, df, ncp) + noncentral_t_cdf(-t_crit, df, ncp)


def required_sample_size(request: PowerRequest) -> PowerResult:
    """Smallest n whose paired two-sided t-test power reaches the target.

    Also returns the fractional root of the continuous power equation (the
    real n where power equals the target exactly).
    """
    target, d, alpha = request.power, request.d, request.alpha

    hi = 2.0
    while paired_t_power(hi, d, alpha) < target:
        hi *= 2.0
        if hi > 1e7:
            raise ValueError("target power unattainable at any reasonable sample size")
    if paired_t_power(2.0, d, alpha) >= target:
        n_fractional = 2.0
    else:
        n_fractional = float(
            optimize.brentq(
                lambda n: paired_t_power(n, d, alpha) - target, 2.0, hi, xtol=1e-9
            )
        )

    n_required = max(2, math.ceil(n_fractional - 1e-9))
    while paired_t_power(n_required, d, alpha) < target:  # guard against root rounding
        n_required += 1
    while n_required > 2 and paired_t_power(n_required - 1, d, alpha) >= target:
        n_required -= 1
    return PowerResult(
        n_fractional=n_fractional,
        n_required=n_required,
        achieved_power=paired_t_power(n_required, d, alpha),
    )


# --- efficiency arithmetic ----------------------------------------------------

@dataclass(frozen=True)
class MethodSummary:
    name: str
    time_mean: float
    time_sd: float
    count_mean: float
    count_sd: float


@dataclass(frozen=True)
class EfficiencySummary:
    """Per-data-point cost of two methods and their comparison ratios.

    ``a`` is the baseline method; ratios express how it compares with ``b``:
    time_ratio = time(a)/time(b), count_ratio = count(b)/count(a), and
    efficiency_ratio = seconds-per-point(a) / seconds-per-point(b).
    """

    a: MethodSummary
    b: MethodSummary
    seconds_per_point_a: float
    seconds_per_point_b: float
    time_ratio: float
    count_ratio: float
    efficiency_ratio: float

    @property
    def slowdown_percent(self) -> float:
        """How much slower the baseline is, in percent of the other method's time."""
        return (self.time_ratio - 1.0) * 100.0

    def to_json(self) -> dict:
        return {
            "methods": {
                m.name: {
                    "time_mean_s": m.time_mean,
                    "time_sd_s": m.time_sd,
                    "count_mean": m.count_mean,
                    "count_sd": m.count_sd,
                    "seconds_per_point": spp,
                }
                for m, spp in (
                    (self.a, self.seconds_per_point_a),
                    (self.b, self.seconds_per_point_b),
                )
            },
            "time_ratio": self.time_ratio,
            "count_ratio": self.count_ratio,
            "efficiency_ratio": self.efficiency_ratio,
            "slowdown_percent": self.slowdown_percent,
        }


def efficiency_summary(a: MethodSummary, b: MethodSummary) -> EfficiencySummary:
    """Seconds-per-registered-data-point comparison; full precision, no rounding."""
    if a.count_mean <= 0 or b.count_mean <= 0:
        raise ValueError("mean data-point counts must be positive")
    spp_a = a.time_mean / a.count_mean
    spp_b = b.time_mean / b.count_mean
    return EfficiencySummary(
        a=a,
        b=b,
        seconds_per_point_a=spp_a,
        seconds_per_point_b=spp_b,
        time_ratio=a.time_mean / b.time_mean,
        count_ratio=b.count_mean / a.count_mean,
        efficiency_ratio=spp_a / spp_b,
    )


# --- box summaries ------------------------------------------------------------

@dataclass(frozen=True)
class BoxSummary:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    def to_json(self) -> dict:
        return {
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
        }


def _median(sorted_values: Sequence[float]) -> float:
    n = len(sorted_values)
    mid = n // 2
    if n % 2:
        return float(sorted_values[mid])
    return (sorted_values[mid - 1] + sorted_values[mid]) / 2.0


def box_summary(values: Sequence[float]) -> BoxSummary:
    """Five-number summary with quartiles by the median-of-halves rule.

    For odd sample sizes the halves exclude the overall median, so e.g.
    {1,2,3,4} gives Q1=1.5, median=2.5, Q3=3.5.
    """
    if not values:
        raise ValueError("box summary of an empty sample")
    data = sorted(float(v) for v in values)
    n = len(data)
    if n == 1:
        v = data[0]
        return BoxSummary(v, v, v, v, v)
    half = n // 2
    lower = data[:half]
    upper = data[half + (n % 2):]
    return BoxSummary(data[0], _median(lower), _median(data), _median(upper), data[-1])
