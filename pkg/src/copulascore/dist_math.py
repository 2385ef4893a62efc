"""Deterministic probability kernels.

Univariate normal pdf/cdf/quantile, centered bivariate normal rectangle
probabilities via nested Gauss-Legendre quadrature, and closed-form
determinant/inverse algebra for equicorrelation matrices.  Everything here
is a pure function, safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "EquiCorr",
    "BvnSpec",
    "norm_pdf",
    "norm_cdf",
    "norm_quantile",
    "bvn_rect_prob",
    "equicorr_logdet",
    "equicorr_quadform",
]

# Integration limits are truncated here; the discarded tail mass is < 1e-15.
_TAIL_SD = 8.5
# Fixed Gauss-Legendre order per panel; panel count doubles until two
# successive refinements agree to _REFINE_TOL.
_GL_ORDER = 20
_REFINE_TOL = 1e-9
_MAX_PANELS = 256

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class EquiCorr:
    """Equicorrelation matrix: ones on the diagonal, ``rho`` elsewhere.

    Positive definiteness requires -1/(dim-1) < rho < 1.
    """

    dim: int
    rho: float

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        lo = -1.0 / (self.dim - 1)
        if not lo < self.rho < 1.0:
            raise ValueError(
                f"rho={self.rho} outside ({lo}, 1) for dim={self.dim}; "
                "matrix would not be positive definite"
            )

    def matrix(self) -> np.ndarray:
        """Dense realization, mainly for brute-force cross-checks."""
        return np.full((self.dim, self.dim), self.rho) + (1.0 - self.rho) * np.eye(self.dim)


@dataclass(frozen=True)
class BvnSpec:
    """Covariance of a centered bivariate normal vector."""

    sigma11: float
    sigma22: float
    sigma12: float

    def __post_init__(self) -> None:
        if not (self.sigma11 > 0.0 and self.sigma22 > 0.0):
            raise ValueError("variances must be strictly positive")
        if self.sigma11 * self.sigma22 - self.sigma12**2 <= 0.0:
            raise ValueError("covariance matrix is not positive definite")


def norm_pdf(x):
    """Standard normal density; accepts scalars or arrays."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x - _LOG_SQRT_2PI)
    return float(out) if out.ndim == 0 else out


def norm_cdf(x):
    """Standard normal cdf; +/-inf map to 1/0. Accepts scalars or arrays."""
    out = ndtr(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def norm_quantile(p):
    """Standard normal quantile on the open interval (0, 1)."""
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr <= 0.0) or np.any(p_arr >= 1.0):
        raise ValueError("norm_quantile requires 0 < p < 1")
    out = ndtri(p_arr)
    return float(out) if out.ndim == 0 else out


def _panel_integral(fn, lo: float, hi: float, n_panels: int) -> float:
    """Composite Gauss-Legendre integral of ``fn`` over [lo, hi]."""
    edges = np.linspace(lo, hi, n_panels + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    nodes = (centers[:, None] + half * _GL_NODES[None, :]).ravel()
    weights = np.broadcast_to(half * _GL_WEIGHTS, (n_panels, _GL_ORDER)).ravel()
    return float(fn(nodes) @ weights)


def bvn_rect_prob(spec: BvnSpec, a1, b1, a2, b2) -> float:
    """P(a1 <= Z1 <= b1, a2 <= Z2 <= b2) for (Z1, Z2) ~ N(0, spec).

    Deterministic nested quadrature: the conditional cdf of Z2 given Z1 is
    integrated over [a1, b1] with composite Gauss-Legendre panels, doubling
    the panel count until two refinements agree to 1e-9.  Infinite limits
    are admissible in either coordinate.
    """
    if a1 > b1 or a2 > b2:
        raise ValueError("interval limits must satisfy a <= b")
    if a1 == b1 or a2 == b2:
        return 0.0

    s1 = math.sqrt(spec.sigma11)
    beta = spec.sigma12 / spec.sigma11
    s_cond = math.sqrt(spec.sigma22 - spec.sigma12**2 / spec.sigma11)

    lo = max(a1, -_TAIL_SD * s1)
    hi = min(b1, _TAIL_SD * s1)
    if lo >= hi:
        return 0.0

    def integrand(z):
        dens = np.exp(-0.5 * (z / s1) ** 2) / (s1 * math.sqrt(2.0 * math.pi))
        upper = ndtr((b2 - beta * z) / s_cond) if b2 != math.inf else 1.0
        lower = ndtr((a2 - beta * z) / s_cond) if a2 != -math.inf else 0.0
        return dens * (upper - lower)

    n_panels = 4
    prob = _panel_integral(integrand, lo, hi, n_panels)
    while n_panels < _MAX_PANELS:
        n_panels *= 2
        refined = _panel_integral(integrand, lo, hi, n_panels)
        if abs(refined - prob) < _REFINE_TOL:
            prob = refined
            break
        prob = refined
    return min(max(prob, 0.0), 1.0)


def equicorr_logdet(ec: EquiCorr) -> float:
    """log det of the equicorrelation matrix: (d-1)log(1-rho) + log(1+(d-1)rho)."""
    return (ec.dim - 1) * math.log1p(-ec.rho) + math.log1p((ec.dim - 1) * ec.rho)


def equicorr_quadform(ec: EquiCorr, z) -> float:
    """z' R^{-1} z using the rank-one inverse of the equicorrelation matrix.

    R^{-1} = (I - rho/(1+(d-1)rho) * ones*ones') / (1-rho).
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (ec.dim,):
        raise ValueError(f"z must have shape ({ec.dim},), got {z.shape}")
    ssq = float(z @ z)
    total_sq = float(z.sum()) ** 2
    return (ssq - ec.rho * total_sq / (1.0 + (ec.dim - 1) * ec.rho)) / (1.0 - ec.rho)
