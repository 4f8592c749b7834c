"""Variate draws: base distributions plus the two structured transition samplers.

The base draws (gamma, beta, Poisson, normal) are exact samplers; the beta is
constructed as a gamma ratio because that construction *is* the beta-gamma
decomposition the thinned processes rest on: with X ~ Ga(a, c) and
Y ~ Ga(b, c) independent, U = X/(X+Y) ~ Be(a, b) independent of X+Y ~ Ga(a+b, c).

Shape 0 is allowed everywhere and means the point mass at 0 (``Ga(0, .)``),
which is exactly what ``numpy`` returns for a zero shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Dependence, GammaParams, ParameterError, RandomSource

__all__ = [
    "gamma_draw",
    "beta_draw",
    "poisson_draw",
    "normal_draw",
    "InnovationTrace",
    "walker_innovation_draw",
    "cir_transition_draw",
]


def gamma_draw(rng: RandomSource, shape, rate, size=None):
    """Draw from Ga(shape, rate); ``shape`` may be 0 (point mass at 0) or an array."""
    shape = np.asarray(shape, dtype=float)
    if np.any(shape < 0.0) or not np.all(np.isfinite(shape)):
        raise ParameterError("gamma shape must be finite and >= 0")
    rate = float(rate)
    if not (rate > 0.0) or not math.isfinite(rate):
        raise ParameterError("gamma rate must be finite and > 0")
    return rng.gen.gamma(shape, 1.0 / rate, size=size)


def beta_draw(rng: RandomSource, a, b, size=None):
    """Draw from Be(a, b) via the gamma ratio X/(X+Y).

    If both gamma draws underflow to exactly 0.0 (possible only for very small
    shapes), the draw falls back to the mean a/(a+b) rather than 0/0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise ParameterError("beta parameters must be > 0")
    x = rng.gen.gamma(a, 1.0, size=size)
    y = rng.gen.gamma(b, 1.0, size=size)
    s = x + y
    with np.errstate(invalid="ignore"):
        u = np.where(s > 0.0, x / np.where(s > 0.0, s, 1.0), a / (a + b))
    return float(u) if np.ndim(u) == 0 else u


def poisson_draw(rng: RandomSource, mean, size=None):
    """Draw from Po(mean); ``mean`` may be 0 or an array."""
    mean = np.asarray(mean, dtype=float)
    if np.any(mean < 0.0) or not np.all(np.isfinite(mean)):
        raise ParameterError("poisson mean must be finite and >= 0")
    return rng.gen.poisson(mean, size=size)


def normal_draw(rng: RandomSource, size=None):
    """Standard normal draw(s)."""
    return rng.gen.standard_normal(size=size)


@dataclass(frozen=True)
class InnovationTrace:
    """One innovation draw with its latent stages kept for inspection.

    ``value = 0.0`` exactly whenever ``count == 0``.
    """

    mixing: float
    count: int
    value: float


def walker_innovation_draw(rng: RandomSource, params: GammaParams, rho_step) -> InnovationTrace:
    """One AR(1) innovation via the gamma-Poisson-gamma ladder.

    With L ~ Ga(alpha, 1), N | L ~ Po(((1-rho)/rho) L) and
    zeta | N ~ Ga(N, beta/rho), the innovation zeta has characteristic function
    ((beta - i w) / (beta - i rho w))^(-alpha), which is exactly what is needed
    for X_t = rho X_{t-1} + zeta_t to preserve the Ga(alpha, beta) marginal.
    P(zeta = 0) = rho^alpha.
    """
    rho = float(rho_step)
    if not (0.0 < rho < 1.0):
        raise ParameterError(f"rho_step must lie strictly in (0, 1), got {rho_step!r}")
    mixing = gamma_draw(rng, params.alpha, 1.0)
    count = int(poisson_draw(rng, (1.0 - rho) / rho * mixing))
    value = gamma_draw(rng, float(count), params.beta / rho) if count else 0.0
    return InnovationTrace(mixing=float(mixing), count=count, value=float(value))


def cir_transition_draw(rng: RandomSource, params: GammaParams, dep: Dependence, x, dt) -> float:
    """Exact draw of X_{t+dt} | X_t = x for the stationary gamma diffusion.

    The transition is a Poisson mixture of gammas: with
    c = beta/(1 - rho_d) and rho_d = rho**dt,

        K ~ Po(c * x * rho_d),   X_{t+dt} | K ~ Ga(alpha + K, c).

    This is the noncentral-chi-square form of the transition kernel (2*c*X is
    noncentral chi-square with 2*alpha degrees of freedom and noncentrality
    2*c*x*rho_d) and makes X_{t+dt} ~ Ga(alpha, beta) whenever x is.
    """
    x = float(x)
    if x < 0.0 or not math.isfinite(x):
        raise ParameterError(f"state x must be finite and >= 0, got {x!r}")
    dt = float(dt)
    if not (dt > 0.0) or not math.isfinite(dt):
        raise ParameterError(f"dt must be finite and > 0, got {dt!r}")
    rho_d = dep.rho**dt
    c = params.beta / (1.0 - rho_d)
    k = poisson_draw(rng, c * x * rho_d)
    return float(gamma_draw(rng, params.alpha + float(k), c))
