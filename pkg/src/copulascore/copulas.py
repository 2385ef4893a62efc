"""Copula objects: closed-form cdf evaluation, sampling, and the Gaussian
equicorrelation copula density.

Also provides the two-block mixture construction that rescales a base
2-copula into diagonal or anti-diagonal blocks of the unit square; the
mixture is the dependence structure of an equal-weight mixture of a
bounded-support distribution with a disjoint translate of itself.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

from .dist_math import EquiCorr, norm_cdf, norm_quantile

__all__ = [
    "Copula",
    "Independence",
    "Comonotone",
    "Countermonotone",
    "GaussianEquiCorr",
    "Mixture2D",
    "ExtendedCopula",
    "UPPER_RIGHT",
    "LOWER_RIGHT",
    "copula_cdf",
    "mixture_cdf",
    "copula_sample",
    "gaussian_copula_logdensity",
    "gaussian_logdensity_from_scores",
]

UPPER_RIGHT = "upper-right"
LOWER_RIGHT = "lower-right"
_DIRECTIONS = (UPPER_RIGHT, LOWER_RIGHT)

# Sampled points exactly on the unit-cube boundary (possible in floating
# point, probability zero otherwise) are pulled inside before any density
# evaluation.
UNIT_CLAMP = 1e-15


class Copula(abc.ABC):
    """A d-dimensional copula: cdf on [0,1]^d with uniform marginals."""

    dim: int

    def cdf(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise ValueError(f"u must have shape ({self.dim},), got {u.shape}")
        if np.any(u < 0.0) or np.any(u > 1.0):
            raise ValueError("u must lie in the unit cube")
        return self._cdf(u)

    @abc.abstractmethod
    def _cdf(self, u: np.ndarray) -> float: ...

    @abc.abstractmethod
    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray: ...

    def sample(self, n: int, seed: int) -> np.ndarray:
        """Draw ``n`` i.i.d. points in [0,1]^dim, deterministic given ``seed``."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        return self._sample(n, np.random.default_rng(seed))


@dataclass(frozen=True)
class Independence(Copula):
    dim: int = 2

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")

    def _cdf(self, u):
        return float(np.prod(u))

    def _sample(self, n, rng):
        return rng.random((n, self.dim))


@dataclass(frozen=True)
class Comonotone(Copula):
    dim: int = 2

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")

    def _cdf(self, u):
        return float(np.min(u))

    def _sample(self, n, rng):
        v = rng.random(n)
        return np.tile(v[:, None], (1, self.dim))


@dataclass(frozen=True)
class Countermonotone(Copula):
    """The countermonotonicity copula, which exists only in dimension 2."""

    dim: int = field(default=2, init=False)

    def _cdf(self, u):
        return max(u[0] + u[1] - 1.0, 0.0)

    def _sample(self, n, rng):
        v = rng.random(n)
        return np.column_stack([v, 1.0 - v])


@dataclass(frozen=True)
class GaussianEquiCorr(Copula):
    """Gaussian copula with an equicorrelation dependence matrix.

    Only the density (:func:`gaussian_copula_logdensity`) and the sampler
    are provided; the cdf has no closed form and is not needed here.
    """

    corr: EquiCorr

    @property
    def dim(self) -> int:
        return self.corr.dim

    @property
    def rho(self) -> float:
        return self.corr.rho

    def _cdf(self, u):
        raise NotImplementedError(
            "the Gaussian copula cdf is not supported; use logdensity or sample"
        )

    def _sample(self, n, rng):
        chol = np.linalg.cholesky(self.corr.matrix())
        z = rng.standard_normal((n, self.dim)) @ chol.T
        return norm_cdf(z)

    def logdensity(self, u) -> float:
        return gaussian_copula_logdensity(self.corr, u)


@dataclass(frozen=True)
class ExtendedCopula:
    """A 2-copula extended from [0,1]^2 to the whole plane by clamping."""

    inner: Copula

    def __post_init__(self):
        if self.inner.dim != 2:
            raise ValueError("only 2-copulas can be extended")

    def cdf(self, x1: float, x2: float) -> float:
        u1 = min(max(x1, 0.0), 1.0)
        u2 = min(max(x2, 0.0), 1.0)
        return self.inner.cdf((u1, u2))


def mixture_cdf(base: Copula, direction: str, u1: float, u2: float) -> float:
    """Cdf of the two-block rescaling of ``base`` at (u1, u2).

    upper-right places half-mass copies of ``base`` in the lower-left and
    upper-right quarters of the unit square; lower-right places them in the
    upper-left and lower-right quarters.  Mixture weights are fixed at 1/2.
    """
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}")
    ext = ExtendedCopula(base)
    if direction == UPPER_RIGHT:
        return 0.5 * (ext.cdf(2 * u1, 2 * u2) + ext.cdf(2 * (u1 - 0.5), 2 * (u2 - 0.5)))
    return 0.5 * (ext.cdf(2 * u1, 2 * (u2 - 0.5)) + ext.cdf(2 * (u1 - 0.5), 2 * u2))


@dataclass(frozen=True)
class Mixture2D(Copula):
    """Two-block mixture copula built from a base 2-copula.

    ``lam`` records the mixing weight of the underlying distribution-level
    convex combination; the resulting copula does not depend on it and uses
    the fixed 1/2-weight block formula of :func:`mixture_cdf`.
    """

    base: Copula
    direction: str
    lam: float = 0.5

    def __post_init__(self):
        if self.base.dim != 2:
            raise ValueError("mixture base must be a 2-copula")
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"direction must be one of {_DIRECTIONS}")
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie in (0, 1)")

    @property
    def dim(self) -> int:
        return 2

    def _cdf(self, u):
        return mixture_cdf(self.base, self.direction, float(u[0]), float(u[1]))

    def _sample(self, n, rng):
        u, _ = self._sample_labeled(n, rng)
        return u

    def _sample_labeled(self, n, rng):
        # Draw order is fixed: base points first, then block coins.
        v = self.base._sample(n, rng)
        block = rng.integers(0, 2, size=n)
        u = np.empty_like(v)
        if self.direction == UPPER_RIGHT:
            # block 0 -> lower-left quarter, block 1 -> upper-right quarter
            u = 0.5 * v + 0.5 * block[:, None]
        else:
            # block 0 -> upper-left quarter, block 1 -> lower-right quarter
            u[:, 0] = 0.5 * v[:, 0] + 0.5 * block
            u[:, 1] = 0.5 * v[:, 1] + 0.5 * (1 - block)
        return u, block

    def sample_labeled(self, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
        """Sample points together with the index of the block each came from."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        return self._sample_labeled(n, np.random.default_rng(seed))


def copula_cdf(c: Copula, u) -> float:
    """Evaluate the copula cdf at a point of the unit cube."""
    return c.cdf(u)


def copula_sample(c: Copula, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` i.i.d. samples from ``c``, deterministic given ``seed``."""
    return c.sample(n, seed)


def gaussian_logdensity_from_scores(dim: int, rho, z):
    """Log density of the Gaussian equicorrelation copula from normal scores.

    ``z`` holds the per-coordinate standard normal quantiles of the copula
    argument, shape (..., dim); ``rho`` is a scalar or broadcasts against the
    leading axes of ``z``.  Uses the closed-form determinant and rank-one
    inverse of the equicorrelation matrix.
    """
    z = np.asarray(z, dtype=float)
    rho = np.asarray(rho, dtype=float)
    ssq = np.sum(z * z, axis=-1)
    tot = np.sum(z, axis=-1)
    logdet = (dim - 1) * np.log1p(-rho) + np.log1p((dim - 1) * rho)
    quad = (ssq - rho * tot**2 / (1.0 + (dim - 1) * rho)) / (1.0 - rho)
    return -0.5 * logdet - 0.5 * (quad - ssq)


def gaussian_copula_logdensity(ec: EquiCorr, u) -> float:
    """Log copula density of the Gaussian equicorrelation copula at ``u``.

    All coordinates must lie strictly inside (0, 1).
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (ec.dim,):
        raise ValueError(f"u must have shape ({ec.dim},), got {u.shape}")
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ValueError("u must lie strictly inside the open unit cube")
    z = norm_quantile(u)
    return float(gaussian_logdensity_from_scores(ec.dim, ec.rho, z))
