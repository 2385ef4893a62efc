"""Monte Carlo harness: multivariate GARCH data generation with constant
equicorrelation, noise-contaminated forecasters, and rejection-frequency
tables for the two-step tests.

Replication streams are split from the master seed by spawn key, so results
are bit-identical regardless of batching or execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .copulas import GaussianEquiCorr, UNIT_CLAMP, gaussian_logdensity_from_scores
from .dist_math import EquiCorr
from .inference import HacConfig, Hypothesis, Outcome, ScoreDiffSeries, two_step_test
from .scoring import MarginalForecast

__all__ = [
    "DgpSpec",
    "ContaminationSpec",
    "Setting",
    "SETTINGS",
    "FreqRow",
    "FreqTable",
    "simulate_path",
    "contaminated_forecast",
    "run_experiment",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class DgpSpec:
    """Truth: per-dimension GARCH(1,1) volatilities with shared parameters
    and Gaussian innovations with a constant equicorrelation matrix."""

    n: int
    dim: int = 5
    omega0: float = 0.001
    alpha0: float = 0.1
    beta0: float = 0.5
    rho: float = 0.5
    burn_in: int = 500

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.omega0 <= 0.0 or self.alpha0 < 0.0 or self.beta0 < 0.0:
            raise ValueError("need omega0 > 0 and alpha0, beta0 >= 0")
        if self.alpha0 + self.beta0 >= 1.0:
            raise ValueError("alpha0 + beta0 < 1 required for covariance stationarity")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        EquiCorr(self.dim, self.rho)  # validates rho against the dimension

    @property
    def stationary_variance(self) -> float:
        return self.omega0 / (1.0 - self.alpha0 - self.beta0)


@dataclass(frozen=True)
class ContaminationSpec:
    """Half-widths of the uniform multiplicative noise applied per period to
    the volatility parameters (marg) and the correlation parameter (cop)."""

    delta_marg: float
    delta_cop: float

    def __post_init__(self):
        if self.delta_marg < 0.0 or self.delta_cop < 0.0:
            raise ValueError("contamination half-widths must be >= 0")

    def check_against(self, spec: DgpSpec) -> None:
        """Contaminated correlations must stay inside the validity range."""
        for edge in (1.0 - self.delta_cop, 1.0 + self.delta_cop):
            EquiCorr(spec.dim, spec.rho * edge)


@dataclass(frozen=True)
class Setting:
    """One scenario: contamination levels for the two competing forecasters."""

    label: str
    spec1: ContaminationSpec
    spec2: ContaminationSpec


SETTINGS: dict[str, Setting] = {
    # size: equally misspecified marginals and copula
    "i": Setting("i", ContaminationSpec(0.1, 0.1), ContaminationSpec(0.1, 0.1)),
    # power: equal marginals, forecaster 1 has the noisier copula
    "ii": Setting("ii", ContaminationSpec(0.1, 0.5), ContaminationSpec(0.1, 0.1)),
    # power: as (ii) but with strongly misspecified marginals on both sides
    "iii": Setting("iii", ContaminationSpec(0.5, 0.5), ContaminationSpec(0.5, 0.1)),
    # power: only the marginals differ
    "iv": Setting("iv", ContaminationSpec(0.5, 0.1), ContaminationSpec(0.1, 0.1)),
    # power: both components differ
    "v": Setting("v", ContaminationSpec(0.5, 0.5), ContaminationSpec(0.1, 0.1)),
}


@dataclass(frozen=True)
class FreqRow:
    hypothesis: str
    setting: str
    n: int
    marginal_pct: float
    copula_pct: float
    joint_pct: float
    reps: int
    seed: int


@dataclass(frozen=True)
class FreqTable:
    rows: tuple[FreqRow, ...]


def _rep_rng(seed: int, rep: int) -> np.random.Generator:
    """Stream for one replication: the master seed plus the replication
    index as spawn key.  Serial and batched execution coincide."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)))


def _draw_noise(spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    """Correlated Gaussian innovations for burn-in plus evaluation window."""
    chol = np.linalg.cholesky(EquiCorr(spec.dim, spec.rho).matrix())
    steps = spec.burn_in + spec.n
    return rng.standard_normal((steps, spec.dim)) @ chol.T


def _garch_paths(spec: DgpSpec, eps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Run the volatility recursion; returns (Y, sigma2) over all steps.

    ``eps`` has shape (..., steps, dim); the recursion starts at the
    stationary variance.
    """
    steps = eps.shape[-2]
    y = np.empty_like(eps)
    sigma2 = np.empty_like(eps)
    s2 = np.full(eps.shape[:-2] + (eps.shape[-1],), spec.stationary_variance)
    for t in range(steps):
        sigma2[..., t, :] = s2
        y[..., t, :] = np.sqrt(s2) * eps[..., t, :]
        s2 = spec.omega0 + spec.alpha0 * y[..., t, :] ** 2 + spec.beta0 * s2
    return y, sigma2


def simulate_path(spec: DgpSpec, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Simulate one path; returns (Y, sigma) of shape (n, dim) after burn-in,
    where sigma holds the true conditional volatilities."""
    rng = np.random.default_rng(seed)
    eps = _draw_noise(spec, rng)
    y, sigma2 = _garch_paths(spec, eps)
    return y[spec.burn_in :], np.sqrt(sigma2[spec.burn_in :])


def contaminated_forecast(
    spec: DgpSpec,
    sigma_t: np.ndarray,
    cspec: ContaminationSpec,
    rng: np.random.Generator,
) -> tuple[MarginalForecast, GaussianEquiCorr]:
    """One forecaster's one-period-ahead forecast given the true volatility
    state ``sigma_t``.

    Draws one volatility disturbance and one correlation disturbance (in
    that order); scaling all volatility parameters by a common factor scales
    the one-step conditional variance by that factor, so the forecast
    standard deviations are sqrt(delta) times the true ones.
    """
    cspec.check_against(spec)
    dm = rng.uniform(1.0 - cspec.delta_marg, 1.0 + cspec.delta_marg)
    dc = rng.uniform(1.0 - cspec.delta_cop, 1.0 + cspec.delta_cop)
    sigma_t = np.asarray(sigma_t, dtype=float)
    marg = MarginalForecast(math.sqrt(dm) * sigma_t)
    cop = GaussianEquiCorr(EquiCorr(spec.dim, spec.rho * dc))
    return marg, cop


def _forecast_variances(
    spec: DgpSpec,
    delta_marg: np.ndarray,
    sigma2: np.ndarray,
    y: np.ndarray,
    mode: str,
) -> np.ndarray:
    """Contaminated conditional variances over the evaluation window.

    one-step: sigma2_tilde[t] = delta[t] * sigma2_true[t].
    recursive: the forecaster's own variance state evolves under the
    per-period contaminated parameters, seeded at delta[0]*sigma2_true[0].
    """
    if mode == "one-step":
        return delta_marg[..., None] * sigma2
    if mode != "recursive":
        raise ValueError("variance mode must be 'one-step' or 'recursive'")
    out = np.empty_like(sigma2)
    n = sigma2.shape[-2]
    out[..., 0, :] = delta_marg[..., 0, None] * sigma2[..., 0, :]
    for t in range(1, n):
        d = delta_marg[..., t, None]
        out[..., t, :] = d * (
            spec.omega0 + spec.alpha0 * y[..., t - 1, :] ** 2 + spec.beta0 * out[..., t - 1, :]
        )
    return out


def _bivariate_scores(
    spec: DgpSpec,
    y: np.ndarray,
    sigma2_tilde: np.ndarray,
    delta_cop: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """(marginal, copula) scores per period for one forecaster, vectorized
    over any leading axes."""
    s_marg = 0.5 * np.sum(_LOG_2PI + np.log(sigma2_tilde) + y**2 / sigma2_tilde, axis=-1)
    u = np.clip(ndtr(y / np.sqrt(sigma2_tilde)), UNIT_CLAMP, 1.0 - UNIT_CLAMP)
    z = ndtri(u)
    s_cop = -gaussian_logdensity_from_scores(spec.dim, spec.rho * delta_cop, z)
    return s_marg, s_cop


def _experiment_diffs(
    spec: DgpSpec,
    setting: Setting,
    reps: int,
    seed: int,
    variance_mode: str = "one-step",
) -> tuple[np.ndarray, np.ndarray]:
    """Score-difference series of all replications, shape (reps, n) each.

    Row r depends only on (seed, r); see :func:`_rep_rng`.
    """
    n, dim = spec.n, spec.dim
    eps = np.empty((reps, spec.burn_in + n, dim))
    deltas = {name: np.empty((reps, n)) for name in ("dm1", "dc1", "dm2", "dc2")}
    widths = {
        "dm1": setting.spec1.delta_marg,
        "dc1": setting.spec1.delta_cop,
        "dm2": setting.spec2.delta_marg,
        "dc2": setting.spec2.delta_cop,
    }
    chol = np.linalg.cholesky(EquiCorr(dim, spec.rho).matrix())
    for r in range(reps):
        rng = _rep_rng(seed, r)
        eps[r] = rng.standard_normal((spec.burn_in + n, dim)) @ chol.T
        for name in ("dm1", "dc1", "dm2", "dc2"):
            w = widths[name]
            deltas[name][r] = rng.uniform(1.0 - w, 1.0 + w, size=n)

    y_all, sigma2_all = _garch_paths(spec, eps)
    y = y_all[:, spec.burn_in :, :]
    sigma2 = sigma2_all[:, spec.burn_in :, :]

    sig2_1 = _forecast_variances(spec, deltas["dm1"], sigma2, y, variance_mode)
    sig2_2 = _forecast_variances(spec, deltas["dm2"], sigma2, y, variance_mode)
    sm1, sc1 = _bivariate_scores(spec, y, sig2_1, deltas["dc1"])
    sm2, sc2 = _bivariate_scores(spec, y, sig2_2, deltas["dc2"])
    return sm1 - sm2, sc1 - sc2


def run_experiment(
    spec: DgpSpec,
    setting: Setting,
    reps: int,
    alpha: float,
    seed: int,
    hac: HacConfig = HacConfig(),
    variance_mode: str = "one-step",
) -> FreqTable:
    """Rejection frequencies of both two-step tests over ``reps``
    replications of the scenario.

    Per replication (stream split from the master seed by replication
    index, draws in this order): innovations for burn-in plus window, then
    forecaster 1's volatility and correlation disturbances, then
    forecaster 2's.  Each forecaster is scored with its own contaminated
    marginals and copula; the two-step tests run on the score differences.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    setting.spec1.check_against(spec)
    setting.spec2.check_against(spec)

    d_m, d_c = _experiment_diffs(spec, setting, reps, seed, variance_mode)

    counts = {h: {"M": 0, "C": 0} for h in Hypothesis}
    for r in range(reps):
        series = ScoreDiffSeries(d_m[r], d_c[r])
        for h in Hypothesis:
            result = two_step_test(series, hac, alpha, h)
            if result.outcome is Outcome.REJECTED_AT_MARGINAL_STEP:
                counts[h]["M"] += 1
            elif result.outcome is Outcome.REJECTED_AT_COPULA_STEP:
                counts[h]["C"] += 1

    rows = []
    for h in Hypothesis:
        m_pct = 100.0 * counts[h]["M"] / reps
        c_pct = 100.0 * counts[h]["C"] / reps
        rows.append(
            FreqRow(
                hypothesis=h.value,
                setting=setting.label,
                n=spec.n,
                marginal_pct=m_pct,
                copula_pct=c_pct,
                joint_pct=m_pct + c_pct,
                reps=reps,
                seed=seed,
            )
        )
    return FreqTable(rows=tuple(rows))
