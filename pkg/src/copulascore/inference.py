"""Two-step predictive-ability tests on bivariate score-difference series.

The first step compares the marginal components of two forecast streams,
the second the copula components.  Critical values are calibrated jointly
on the bivariate normal limit so the overall asymptotic size is alpha,
split (by default) evenly across the two steps.  A long-run covariance
estimator with configurable lag weights feeds the calibration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dist_math import BvnSpec, bvn_rect_prob, norm_quantile
from .scoring import BivariateScore

__all__ = [
    "Hypothesis",
    "Outcome",
    "ScoreDiffSeries",
    "HacConfig",
    "LongRunCov",
    "TwoStepResult",
    "DegenerateSeriesError",
    "score_diffs",
    "hac_cov",
    "critical_values",
    "two_step_test",
    "bonferroni_test",
]

# A component counts as degenerate when its long-run variance is negligible
# against the squared scale of the differences (scale-free detection of
# identical forecasts).
_DEGENERACY_REL_TOL = 1e-12
# |correlation| at or above this is treated as numerically singular and
# shrunk to the value below before rectangle probabilities are evaluated.
_CORR_SINGULAR = 1.0 - 1e-10
_CORR_SHRUNK = 1.0 - 1e-8

_SOLVER_PROB_TOL = 1e-9
_SOLVER_MAX_ITER = 200


class Hypothesis(str, enum.Enum):
    """Null hypotheses: joint equality, or equality-plus-noninferiority."""

    EQUAL = "equal"
    LEX_SUPERIORITY = "lex"


class Outcome(str, enum.Enum):
    NO_REJECTION = "no_rejection"
    REJECTED_AT_MARGINAL_STEP = "rejected_at_marginal_step"
    REJECTED_AT_COPULA_STEP = "rejected_at_copula_step"


class DegenerateSeriesError(ValueError):
    """Both score-difference components carry no sampling variation."""


@dataclass(frozen=True)
class ScoreDiffSeries:
    """Per-period differences (model 1 minus model 2) of the score pairs."""

    d_m: np.ndarray
    d_c: np.ndarray

    def __post_init__(self):
        d_m = np.asarray(self.d_m, dtype=float)
        d_c = np.asarray(self.d_c, dtype=float)
        if d_m.ndim != 1 or d_c.ndim != 1 or d_m.shape != d_c.shape:
            raise ValueError("d_m and d_c must be one-dimensional and equally long")
        if d_m.size < 2:
            raise ValueError("need at least 2 periods")
        if not (np.all(np.isfinite(d_m)) and np.all(np.isfinite(d_c))):
            raise ValueError("score differences must be finite")
        object.__setattr__(self, "d_m", d_m)
        object.__setattr__(self, "d_c", d_c)

    @property
    def n(self) -> int:
        return self.d_m.size


@dataclass(frozen=True)
class HacConfig:
    """Lag cutoff and weight rule for the long-run covariance estimator.

    ``zero`` ignores all cross-lag terms (plain sample covariance),
    ``bartlett`` uses 1 - h/(lags+1), ``truncated`` uses weight 1.
    """

    lags: int = 0
    weights: str = "zero"

    def __post_init__(self):
        if self.lags < 0:
            raise ValueError("lags must be >= 0")
        if self.weights not in ("zero", "bartlett", "truncated"):
            raise ValueError("weights must be one of 'zero', 'bartlett', 'truncated'")

    def weight(self, h: int) -> float:
        if self.weights == "zero":
            return 0.0
        if self.weights == "bartlett":
            return 1.0 - h / (self.lags + 1.0)
        return 1.0


@dataclass(frozen=True)
class LongRunCov:
    """Symmetric 2x2 long-run covariance of the scaled average differences."""

    s_mm: float
    s_mc: float
    s_cc: float

    @property
    def det(self) -> float:
        return self.s_mm * self.s_cc - self.s_mc**2

    @property
    def is_pd(self) -> bool:
        return self.s_mm > 0.0 and self.s_cc > 0.0 and self.det > 0.0

    def correlation(self) -> float:
        return self.s_mc / math.sqrt(self.s_mm * self.s_cc)


@dataclass(frozen=True)
class TwoStepResult:
    hypothesis: Hypothesis
    stat_m: float
    stat_c: float
    c1: float
    c2: float
    outcome: Outcome
    alpha: float
    omega: LongRunCov
    degenerate_fallback: bool = False
    correlation_shrunk: bool = False

    @property
    def attribution(self) -> str:
        """Table-style label: '0' none, 'M' marginal step, 'C' copula step."""
        return {
            Outcome.NO_REJECTION: "0",
            Outcome.REJECTED_AT_MARGINAL_STEP: "M",
            Outcome.REJECTED_AT_COPULA_STEP: "C",
        }[self.outcome]


def score_diffs(
    scores1: Sequence[BivariateScore], scores2: Sequence[BivariateScore]
) -> ScoreDiffSeries:
    """Componentwise score differences, model 1 minus model 2."""
    if len(scores1) != len(scores2):
        raise ValueError("score sequences must have equal length")
    a = np.asarray(scores1, dtype=float)
    b = np.asarray(scores2, dtype=float)
    return ScoreDiffSeries(a[:, 0] - b[:, 0], a[:, 1] - b[:, 1])


def hac_cov(d: ScoreDiffSeries, cfg: HacConfig) -> LongRunCov:
    """Long-run covariance: lag-0 outer-product average (divisor n) plus
    weighted symmetrized cross-lag sums up to the cutoff."""
    n = d.n
    if n <= cfg.lags:
        raise ValueError(f"series length {n} must exceed lag cutoff {cfg.lags}")
    x = np.column_stack([d.d_m, d.d_c])
    x = x - x.mean(axis=0)
    cov = x.T @ x / n
    for h in range(1, cfg.lags + 1):
        w = cfg.weight(h)
        if w == 0.0:
            continue
        gamma = x[h:].T @ x[:-h] / n
        cov = cov + w * (gamma + gamma.T)
    return LongRunCov(s_mm=float(cov[0, 0]), s_mc=float(cov[0, 1]), s_cc=float(cov[1, 1]))


def _split(alpha: float, alpha1: float | None) -> tuple[float, float]:
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if alpha1 is None:
        return alpha / 2.0, alpha / 2.0
    if not 0.0 < alpha1 < alpha:
        raise ValueError("alpha1 must lie strictly between 0 and alpha")
    return alpha1, alpha - alpha1


def _solve_c2(
    omega: LongRunCov, c1: float, target: float, hypothesis: Hypothesis
) -> float:
    """Monotone bisection for the second-step critical value.

    Equal case: P(|Z1| <= c1, |Z2| > c2) = target, solved on [0, hi].
    Lex case:   P(|Z1| <= c1, Z2 > c2)  = target, solved on [-hi, hi].
    Both probabilities are strictly decreasing in c2 on the bracket.
    """
    spec = BvnSpec(sigma11=omega.s_mm, sigma22=omega.s_cc, sigma12=omega.s_mc)
    sd_c = math.sqrt(omega.s_cc)
    p_band = bvn_rect_prob(spec, -c1, c1, -math.inf, math.inf)

    if hypothesis is Hypothesis.EQUAL:

        def prob(c2: float) -> float:
            return p_band - bvn_rect_prob(spec, -c1, c1, -c2, c2)

        lo, hi = 0.0, 10.0 * sd_c
    else:

        def prob(c2: float) -> float:
            return bvn_rect_prob(spec, -c1, c1, c2, math.inf)

        lo, hi = -10.0 * sd_c, 10.0 * sd_c

    mid = 0.5 * (lo + hi)
    for _ in range(_SOLVER_MAX_ITER):
        mid = 0.5 * (lo + hi)
        p = prob(mid)
        if abs(p - target) <= _SOLVER_PROB_TOL:
            return mid
        if p > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, sd_c):
            break
    return mid


def critical_values(
    omega: LongRunCov,
    alpha: float,
    hypothesis: Hypothesis,
    alpha1: float | None = None,
) -> tuple[float, float]:
    """Jointly calibrated critical values (c1, c2) for the two-step test.

    c1 satisfies P(|Z1| > c1) = alpha1 in closed form; c2 makes the
    second-step rejection probability equal alpha2, solved by bisection on
    the bivariate normal rectangle kernel.  Defaults to an even split
    alpha1 = alpha2 = alpha/2.
    """
    if not omega.is_pd:
        raise ValueError("long-run covariance must be positive definite")
    a1, a2 = _split(alpha, alpha1)
    c1 = math.sqrt(omega.s_mm) * norm_quantile(1.0 - a1 / 2.0)
    c2 = _solve_c2(omega, c1, a2, hypothesis)
    return c1, c2


def _degenerate(variance: float, series: np.ndarray) -> bool:
    scale = float(np.mean(np.abs(series)))
    return variance <= _DEGENERACY_REL_TOL * scale**2


def _shrink_if_singular(omega: LongRunCov) -> tuple[LongRunCov, bool]:
    corr = omega.correlation()
    if abs(corr) >= _CORR_SINGULAR:
        shrunk = math.copysign(_CORR_SHRUNK, corr) * math.sqrt(omega.s_mm * omega.s_cc)
        return LongRunCov(omega.s_mm, shrunk, omega.s_cc), True
    return omega, False


def _one_step_critical(variance: float, alpha: float, two_sided: bool) -> float:
    p = 1.0 - alpha / 2.0 if two_sided else 1.0 - alpha
    return math.sqrt(variance) * norm_quantile(p)


def two_step_test(
    d: ScoreDiffSeries,
    cfg: HacConfig,
    alpha: float,
    hypothesis: Hypothesis,
    alpha1: float | None = None,
) -> TwoStepResult:
    """Stepwise test: marginal component first, copula component second.

    When one component is degenerate (identical forecasts on that
    component), the test falls back to a one-step comparison of the other
    component at the full level alpha; when both are degenerate the series
    carries no ranking information and an error is raised.
    """
    hypothesis = Hypothesis(hypothesis)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    n = d.n
    sqrt_n = math.sqrt(n)
    stat_m = sqrt_n * float(d.d_m.mean())
    stat_c = sqrt_n * float(d.d_c.mean())
    omega = hac_cov(d, cfg)

    degen_m = _degenerate(omega.s_mm, d.d_m)
    degen_c = _degenerate(omega.s_cc, d.d_c)
    if degen_m and degen_c:
        raise DegenerateSeriesError(
            "both score-difference components are degenerate; "
            "the forecasts carry no ranking information"
        )

    if degen_m:
        # Identical marginal forecasts: one-step test on the copula
        # component at full level alpha.
        two_sided = hypothesis is Hypothesis.EQUAL
        c2 = _one_step_critical(omega.s_cc, alpha, two_sided)
        fired = abs(stat_c) > c2 if two_sided else stat_c > c2
        outcome = Outcome.REJECTED_AT_COPULA_STEP if fired else Outcome.NO_REJECTION
        return TwoStepResult(
            hypothesis, stat_m, stat_c, math.inf, c2, outcome, alpha, omega,
            degenerate_fallback=True,
        )
    if degen_c:
        # Mirror case: identical copula forecasts, one-step test on the
        # marginal component (always two-sided).
        c1 = _one_step_critical(omega.s_mm, alpha, two_sided=True)
        fired = abs(stat_m) > c1
        outcome = Outcome.REJECTED_AT_MARGINAL_STEP if fired else Outcome.NO_REJECTION
        return TwoStepResult(
            hypothesis, stat_m, stat_c, c1, math.inf, outcome, alpha, omega,
            degenerate_fallback=True,
        )

    calib, shrunk = _shrink_if_singular(omega)
    c1, c2 = critical_values(calib, alpha, hypothesis, alpha1)

    if abs(stat_m) > c1:
        outcome = Outcome.REJECTED_AT_MARGINAL_STEP
    else:
        if hypothesis is Hypothesis.EQUAL:
            fired = abs(stat_c) > c2
        else:
            fired = stat_c > c2
        outcome = Outcome.REJECTED_AT_COPULA_STEP if fired else Outcome.NO_REJECTION

    return TwoStepResult(
        hypothesis, stat_m, stat_c, c1, c2, outcome, alpha, omega,
        correlation_shrunk=shrunk,
    )


def bonferroni_test(
    d: ScoreDiffSeries,
    cfg: HacConfig,
    alpha: float,
    hypothesis: Hypothesis,
) -> TwoStepResult:
    """Reference test with an even per-component level split and no stepwise
    coupling of the critical values.

    Each component gets its own marginal critical value at level alpha/2;
    rejection in the marginal component takes precedence in the attribution.
    """
    hypothesis = Hypothesis(hypothesis)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    n = d.n
    sqrt_n = math.sqrt(n)
    stat_m = sqrt_n * float(d.d_m.mean())
    stat_c = sqrt_n * float(d.d_c.mean())
    omega = hac_cov(d, cfg)

    degen_m = _degenerate(omega.s_mm, d.d_m)
    degen_c = _degenerate(omega.s_cc, d.d_c)
    if degen_m and degen_c:
        raise DegenerateSeriesError(
            "both score-difference components are degenerate; "
            "the forecasts carry no ranking information"
        )
    if degen_m or degen_c:
        # Fall back exactly as the two-step test does.
        return two_step_test(d, cfg, alpha, hypothesis)

    c1 = math.sqrt(omega.s_mm) * norm_quantile(1.0 - alpha / 4.0)
    if hypothesis is Hypothesis.EQUAL:
        c2 = math.sqrt(omega.s_cc) * norm_quantile(1.0 - alpha / 4.0)
        cop_fired = abs(stat_c) > c2
    else:
        c2 = math.sqrt(omega.s_cc) * norm_quantile(1.0 - alpha / 2.0)
        cop_fired = stat_c > c2

    if abs(stat_m) > c1:
        outcome = Outcome.REJECTED_AT_MARGINAL_STEP
    elif cop_fired:
        outcome = Outcome.REJECTED_AT_COPULA_STEP
    else:
        outcome = Outcome.NO_REJECTION
    return TwoStepResult(hypothesis, stat_m, stat_c, c1, c2, outcome, alpha, omega)
