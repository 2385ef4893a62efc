"""Comparing joint copula/marginal forecasts with multi-objective scores
and two-step predictive-ability tests."""

from .copulas import (
    Comonotone,
    Copula,
    Countermonotone,
    ExtendedCopula,
    GaussianEquiCorr,
    Independence,
    LOWER_RIGHT,
    Mixture2D,
    UPPER_RIGHT,
    copula_cdf,
    copula_sample,
    gaussian_copula_logdensity,
    mixture_cdf,
)
from .dist_math import (
    BvnSpec,
    EquiCorr,
    bvn_rect_prob,
    equicorr_logdet,
    equicorr_quadform,
    norm_cdf,
    norm_pdf,
    norm_quantile,
)
from .inference import (
    DegenerateSeriesError,
    HacConfig,
    Hypothesis,
    LongRunCov,
    Outcome,
    ScoreDiffSeries,
    TwoStepResult,
    bonferroni_test,
    critical_values,
    hac_cov,
    score_diffs,
    two_step_test,
)
from .scoring import (
    BivariateScore,
    MarginalForecast,
    bivariate_score,
    lex_less,
    pit,
    s_cop,
    s_joint,
    s_marg,
)
from .sim_harness import (
    SETTINGS,
    ContaminationSpec,
    DgpSpec,
    FreqRow,
    FreqTable,
    Setting,
    contaminated_forecast,
    run_experiment,
    simulate_path,
)

__version__ = "0.1.0"

__all__ = [
    "BivariateScore",
    "BvnSpec",
    "Comonotone",
    "ContaminationSpec",
    "Copula",
    "Countermonotone",
    "DegenerateSeriesError",
    "DgpSpec",
    "EquiCorr",
    "ExtendedCopula",
    "FreqRow",
    "FreqTable",
    "GaussianEquiCorr",
    "HacConfig",
    "Hypothesis",
    "Independence",
    "LongRunCov",
    "LOWER_RIGHT",
    "MarginalForecast",
    "Mixture2D",
    "Outcome",
    "ScoreDiffSeries",
    "SETTINGS",
    "Setting",
    "TwoStepResult",
    "UPPER_RIGHT",
    "bivariate_score",
    "bonferroni_test",
    "bvn_rect_prob",
    "contaminated_forecast",
    "copula_cdf",
    "copula_sample",
    "critical_values",
    "equicorr_logdet",
    "equicorr_quadform",
    "gaussian_copula_logdensity",
    "hac_cov",
    "lex_less",
    "mixture_cdf",
    "norm_cdf",
    "norm_pdf",
    "norm_quantile",
    "pit",
    "run_experiment",
    "s_cop",
    "s_joint",
    "s_marg",
    "score_diffs",
    "simulate_path",
    "two_step_test",
]
