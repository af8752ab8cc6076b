"""Classifier-comparison statistics: the combined F-test over repeated
2-fold CV scores (per dataset), the Wilcoxon signed-rank test (across
datasets), and mean ranks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._ranking import rank_average
from .errors import InsufficientDataError, ParameterError

N_SPLITS = 10  # 5 repeats x 2 folds
DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class FTestResult:
    f_stat: float
    p_value: float
    significant: bool
    degenerate: bool


def combined_5x2cv_f_test(a, b, alpha: float = DEFAULT_ALPHA) -> FTestResult:
    """Combined F-test over 10 paired scores from 5 repeats of 2-fold CV.

    With per-repeat differences p_i1, p_i2, mean pbar_i and variance
    s2_i = (p_i1 - pbar_i)^2 + (p_i2 - pbar_i)^2, the statistic is

        F = (sum of all p_ij^2) / (2 * sum of s2_i)

    referred to the F distribution with (10, 5) degrees of freedom.

    Degenerate inputs are flagged instead of dividing by zero: constant
    nonzero differences give p = 0 (significant); all-zero differences
    leave F undefined (not significant).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != (N_SPLITS,) or b.shape != (N_SPLITS,):
        raise ParameterError(f"need {N_SPLITS} paired scores (5 repeats x 2 folds)")
    diffs = (a - b).reshape(5, 2)
    repeat_mean = diffs.mean(axis=1, keepdims=True)
    s2 = ((diffs - repeat_mean) ** 2).sum(axis=1)
    numerator = float((diffs ** 2).sum())
    denominator = 2.0 * float(s2.sum())
    if denominator == 0.0:
        if numerator == 0.0:
            return FTestResult(math.nan, 1.0, False, True)
        return FTestResult(math.inf, 0.0, True, True)
    f_stat = numerator / denominator
    p_value = f_distribution_sf(f_stat, 10, 5)
    return FTestResult(f_stat, p_value, p_value < alpha, False)


def f_distribution_sf(x: float, d1: int, d2: int) -> float:
    """Survival function P(F(d1, d2) > x) of the F distribution,
    via the regularized incomplete beta: I_{d2/(d2 + d1 x)}(d2/2, d1/2)."""
    if d1 < 1 or d2 < 1:
        raise ParameterError("degrees of freedom must be >= 1")
    if x < 0:
        raise ParameterError("x must be >= 0")
    if x == 0.0:
        return 1.0
    return regularized_incomplete_beta(d2 / (d2 + d1 * x), 0.5 * d2, 0.5 * d1)


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b) evaluated through the continued fraction of the incomplete
    beta integral (modified Lentz), switched at the symmetry point so the
    fraction always converges quickly. Absolute error well below 1e-10."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def _beta_continued_fraction(a: float, b: float, x: float,
                             max_iter: int = 300, eps: float = 1e-16) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        # even step
        coeff = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coeff * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + coeff / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        # odd step
        coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coeff * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + coeff / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


@dataclass(frozen=True)
class WilcoxonResult:
    w_stat: float
    p_value: float
    significant: bool
    n: int
    exact: bool


def wilcoxon_signed_rank(a, b, alpha: float = DEFAULT_ALPHA,
                         exact_limit: int = 20) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired score vectors.

    Zero differences are dropped (at least 5 must remain); absolute
    differences get average ranks; W = min(W+, W-). For n <= exact_limit
    the p-value is the exact tail mass of the min statistic over all 2^n
    sign assignments (computed by convolution over the doubled-rank grid);
    larger n uses the tie-corrected normal approximation.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ParameterError("paired score vectors must be 1-d and equal length")
    diffs = a - b
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n < 5:
        raise InsufficientDataError(f"only {n} nonzero differences (need >= 5)")
    ranks = rank_average(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    total = float(ranks.sum())
    w = min(w_plus, total - w_plus)
    if n <= exact_limit:
        p_value = _exact_min_tail(ranks, w)
        exact = True
    else:
        p_value = _normal_tail(ranks, w, n)
        exact = False
    p_value = min(1.0, p_value)
    return WilcoxonResult(w, p_value, p_value < alpha, n, exact)


def _exact_min_tail(ranks: np.ndarray, w: float) -> float:
    # distribution of 2*W+ over all sign assignments; ranks are halves at
    # worst, so the doubled grid is integral and the counts are exact
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:counts.size - r]
        counts += shifted
    sums = np.arange(total + 1, dtype=np.float64)
    min_stat = np.minimum(sums, total - sums) / 2.0
    return float(counts[min_stat <= w].sum()) / 2.0 ** ranks.size


def _normal_tail(ranks: np.ndarray, w: float, n: int) -> float:
    mean = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(ranks, return_counts=True)
    tie_term = float((tie_sizes.astype(np.float64) ** 3 - tie_sizes).sum()) / 48.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    if var <= 0.0:
        return 1.0 if w >= mean else 0.0
    z = (w - mean) / math.sqrt(var)
    return 2.0 * _norm_cdf(z)


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def mean_ranks(scores) -> np.ndarray:
    """Per-method mean rank over a (datasets x methods) score matrix.

    Within each dataset the methods are ranked 1..M ascending by score
    (ties share the average rank), so a higher score earns a higher rank
    and the best method has the largest mean.
    """
    matrix = np.asarray(scores, dtype=np.float64)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ParameterError("need a non-empty datasets x methods matrix")
    if not np.isfinite(matrix).all():
        raise ParameterError("missing entries are not allowed")
    ranks = np.vstack([rank_average(row) for row in matrix])
    return ranks.mean(axis=0)
