"""Paired-sample statistics: descriptive summaries, two-sided paired t-test,
Pearson correlation, regression through the origin, and five-number summaries.

Everything here is plain Python over small lists.  Standard deviations use
the sample (n-1) denominator throughout.  Student-t tail probabilities are
evaluated directly through the regularized incomplete beta function
(continued fraction), so no statistics library is involved and the p-values
are testable to fixed absolute accuracy (better than 1e-9).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    DegenerateX,
    Empty,
    LengthMismatch,
    TooFewValues,
    ZeroVariance,
)

# Below-threshold p-values are conventionally flagged as significant by the
# reporting layer; the functions here return raw p only.
SIGNIFICANCE_LEVEL = 0.05


@dataclass(frozen=True)
class StatSummary:
    n: int
    min: float
    max: float
    mean: float
    sd: float


@dataclass(frozen=True)
class ComparisonStats:
    """Paired-sample comparison: t-test, correlation, origin regression."""

    t: float
    df: int
    p: float
    r: float
    slope_b: float
    slope_se: float


@dataclass(frozen=True)
class FiveNumber:
    min: float
    q1: float
    median: float
    q3: float
    max: float


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _sample_sd(values: Sequence[float]) -> float:
    m = _mean(values)
    return math.sqrt(sum((v - m) ** 2 for v in values) / (len(values) - 1))


def descriptive(values: Sequence[float]) -> StatSummary:
    """Min/max/mean and sample (n-1) standard deviation; needs n >= 2."""
    if len(values) < 2:
        raise TooFewValues(f"need at least 2 values, got {len(values)}")
    vals = [float(v) for v in values]
    return StatSummary(
        n=len(vals), min=min(vals), max=max(vals), mean=_mean(vals), sd=_sample_sd(vals)
    )


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz continued fraction for the incomplete beta
    MAXIT, EPS, FPMIN = 300, 3e-16, 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t: I_{df/(df+t^2)}(df/2, 1/2)."""
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def paired_t_two_sided(a: Sequence[float], b: Sequence[float]) -> tuple[float, int, float]:
    """Two-sided paired t-test; returns (t, df, p) with df = n - 1."""
    if len(a) != len(b):
        raise LengthMismatch(f"paired samples differ in length: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise TooFewValues(f"need at least 2 pairs, got {len(a)}")
    diffs = [float(x) - float(y) for x, y in zip(a, b)]
    sd = _sample_sd(diffs)
    if sd == 0.0:
        raise ZeroVariance("all paired differences are equal")
    n = len(diffs)
    t = _mean(diffs) / (sd / math.sqrt(n))
    df = n - 1
    return t, df, student_t_two_sided_p(t, df)


def pearson_r(a: Sequence[float], b: Sequence[float]) -> float:
    """Product-moment correlation coefficient."""
    if len(a) != len(b):
        raise LengthMismatch(f"samples differ in length: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise TooFewValues(f"need at least 2 pairs, got {len(a)}")
    xs = [float(v) for v in a]
    ys = [float(v) for v in b]
    sx, sy = _sample_sd(xs), _sample_sd(ys)
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("correlation undefined for a constant sample")
    mx, my = _mean(xs), _mean(ys)
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return cov / ((len(xs) - 1) * sx * sy)


def regression_through_origin(
    x: Sequence[float], y: Sequence[float]
) -> tuple[float, float]:
    """Least-squares slope of y = b*x and its standard error (df = n - 1)."""
    if len(x) != len(y):
        raise LengthMismatch(f"samples differ in length: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise TooFewValues(f"need at least 2 pairs, got {len(x)}")
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    sxx = sum(v * v for v in xs)
    if sxx == 0.0:
        raise DegenerateX("all x values are zero")
    slope = sum(u * v for u, v in zip(xs, ys)) / sxx
    rss = sum((v - slope * u) ** 2 for u, v in zip(xs, ys))
    se = math.sqrt(rss / ((len(xs) - 1) * sxx))
    return slope, se


def slope_comparison_t(b1: float, se1: float, b2: float, se2: float) -> float:
    """t statistic for the difference of two independently fitted slopes."""
    return (b1 - b2) / math.sqrt(se1 * se1 + se2 * se2)


def five_number(values: Sequence[float]) -> FiveNumber:
    """Five-number summary with type-7 (linear interpolation) quartiles."""
    if len(values) == 0:
        raise Empty("five_number needs at least one value")
    ordered = sorted(float(v) for v in values)

    def quantile(q: float) -> float:
        h = (len(ordered) - 1) * q
        lo = math.floor(h)
        hi = math.ceil(h)
        return ordered[lo] + (h - lo) * (ordered[hi] - ordered[lo])

    return FiveNumber(
        min=ordered[0],
        q1=quantile(0.25),
        median=quantile(0.5),
        q3=quantile(0.75),
        max=ordered[-1],
    )


def compare_paired(a: Sequence[float], b: Sequence[float]) -> ComparisonStats:
    """Full paired comparison: t-test, Pearson r, and origin regression of b on a."""
    t, df, p = paired_t_two_sided(a, b)
    r = pearson_r(a, b)
    slope, se = regression_through_origin(a, b)
    return ComparisonStats(t=t, df=df, p=p, r=r, slope_b=slope, slope_se=se)
