"""Closed-form single-level crossing results.

Rice's formula for the mean crossing rate, its even split into up- and
down-crossings, the Rayleigh law for lengths of excursions above a high
level, the Erlang law for the time to the k-th subsequent up-crossing, the
exponential law for up-excursions above a low (negative) level, and the
parabolic excursion model that underlies the two-level results.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .acf import SpectralMoments
from .errors import DomainError, PreconditionError

__all__ = [
    "LevelContext",
    "RayleighLaw",
    "ExponentialLaw",
    "ErlangLaw",
    "rice_rate",
    "up_rate",
    "down_rate",
    "large_excursion_length_law",
    "erlang_interval_law",
    "erlang_interval_physical",
    "negative_excursion_length_law",
    "parabola",
    "parabola_root_length",
    "parabola_peak",
    "write_theory_curve_csv",
]


@dataclass(frozen=True)
class LevelContext:
    gamma: float
    lambda2: float
    lambda0: float = 1.0

    def __post_init__(self):
        if not (self.lambda0 > 0) or not math.isfinite(self.lambda0):
            raise DomainError("lambda0 must be positive and finite")
        if not (self.lambda2 > 0) or not math.isfinite(self.lambda2):
            raise DomainError("lambda2 must be positive and finite (finite crossing rate)")
        if not math.isfinite(self.gamma):
            raise DomainError("gamma must be finite")

    @classmethod
    def from_moments(cls, gamma: float, moments: SpectralMoments) -> "LevelContext":
        return cls(gamma=gamma, lambda2=moments.lambda2, lambda0=moments.lambda0)


def rice_rate(ctx: LevelContext) -> float:
    """Mean number of crossings of ``ctx.gamma`` per unit time."""
    return (
        math.sqrt(ctx.lambda2 / ctx.lambda0)
        * math.exp(-(ctx.gamma**2) / (2.0 * ctx.lambda0))
        / math.pi
    )


def up_rate(ctx: LevelContext) -> float:
    return 0.5 * rice_rate(ctx)


down_rate = up_rate


class _Law:
    """Shared helpers; subclasses define ``sf``, ``pdf``, ``mean``, ``quantile``."""

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def rvs(self, rng: np.random.Generator, size=None):
        return self.quantile(rng.random(size))


@dataclass(frozen=True)
class RayleighLaw(_Law):
    scale: float

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return np.exp(-0.5 * (x / self.scale) ** 2)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        s2 = self.scale**2
        return np.where(x >= 0, x / s2 * np.exp(-0.5 * x**2 / s2), 0.0)

    @property
    def mean(self) -> float:
        return self.scale * math.sqrt(math.pi / 2.0)

    def quantile(self, p):
        return self.scale * np.sqrt(-2.0 * np.log1p(-np.asarray(p, dtype=float)))


@dataclass(frozen=True)
class ExponentialLaw(_Law):
    rate: float

    def sf(self, x):
        return np.exp(-self.rate * np.maximum(np.asarray(x, dtype=float), 0.0))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * x), 0.0)

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    def quantile(self, p):
        return -np.log1p(-np.asarray(p, dtype=float)) / self.rate


@dataclass(frozen=True)
class ErlangLaw(_Law):
    """Erlang law of shape ``k`` in physical time with event rate ``rate``."""

    k: int
    rate: float = 1.0

    def sf(self, x):
        return 1.0 - erlang_interval_law(self.k, np.asarray(x, dtype=float) * self.rate)[0]

    def cdf(self, x):
        return erlang_interval_law(self.k, np.asarray(x, dtype=float) * self.rate)[0]

    def pdf(self, x):
        return self.rate * erlang_interval_law(self.k, np.asarray(x, dtype=float) * self.rate)[1]

    @property
    def mean(self) -> float:
        return self.k / self.rate

    def quantile(self, p):
        return special.gammaincinv(self.k, np.asarray(p, dtype=float)) / self.rate


def large_excursion_length_law(ctx: LevelContext) -> RayleighLaw:
    """Rayleigh law of excursion lengths above a high level ``gamma > 0``.

    The scale ``2 / (gamma sqrt(lambda2))`` follows from the parabolic model
    with Rayleigh slope, see :func:`parabola_root_length`.
    """
    if not (ctx.gamma > 0):
        raise DomainError("the large-excursion law needs gamma > 0")
    return RayleighLaw(scale=2.0 / (ctx.gamma * math.sqrt(ctx.lambda2 / ctx.lambda0)))


def erlang_interval_law(k: int, t):
    """``(F_k(t), f_k(t))`` in time normalized by the up-crossing rate.

    ``F_k(t) = 1 - exp(-t) * sum_{n<k} t^n / n!`` and
    ``f_k(t) = t^(k-1) exp(-t) / (k-1)!``.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    # running term t^n / n!
    term = np.ones_like(t)
    partial = np.ones_like(t)
    for n in range(1, k):
        term = term * t / n
        partial = partial + term
    e = np.exp(-t)
    F, f = 1.0 - partial * e, term * e
    if F.ndim == 0:
        return float(F), float(f)
    return F, f


def erlang_interval_physical(k: int, t, mu: float):
    """Erlang CDF/PDF in physical time for up-crossing rate ``mu``."""
    if not (mu > 0):
        raise DomainError("mu must be positive")
    F, f = erlang_interval_law(k, np.asarray(t, dtype=float) * mu)
    return F, mu * f


def negative_excursion_length_law(
    ctx: LevelContext, moments: SpectralMoments
) -> ExponentialLaw:
    """Exponential law of up-excursion lengths above a low level ``gamma < 0``.

    The rate is the up-crossing rate at the level.  ``moments`` must come from
    a model with a finite fourth spectral moment and polynomial decay.
    """
    if not (ctx.gamma < 0):
        raise DomainError("the negative-excursion law needs gamma < 0")
    if not moments.cond_eq8_9 or not math.isfinite(moments.lambda4):
        raise PreconditionError(
            "negative-excursion law needs finite lambda4 and polynomial ACF decay "
            f"(cond_eq8_9={moments.cond_eq8_9}, lambda4={moments.lambda4})"
        )
    return ExponentialLaw(rate=up_rate(ctx))


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


def parabola(gamma, xi, lambda2, t):
    """Asymptotic trajectory ``gamma + xi t - gamma lambda2 t^2 / 2`` of a high excursion."""
    t = np.asarray(t, dtype=float)
    return _scalar(gamma + xi * t - 0.5 * gamma * lambda2 * t**2)


def parabola_root_length(gamma, xi, lambda2):
    """Time the parabola spends above ``gamma``: ``2 xi / (gamma lambda2)``."""
    return _scalar(2.0 * np.asarray(xi, dtype=float) / (gamma * lambda2))


def parabola_peak(gamma, xi, lambda2):
    """``(t_peak, X_peak)`` of the parabola."""
    xi = np.asarray(xi, dtype=float)
    return _scalar(xi / (gamma * lambda2)), _scalar(gamma + xi**2 / (2.0 * gamma * lambda2))


def write_theory_curve_csv(law, grid, filename) -> None:
    grid = np.asarray(grid, dtype=float)
    cdf, pdf = np.asarray(law.cdf(grid)), np.asarray(law.pdf(grid))
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau", "cdf", "pdf"])
        for row in zip(grid, cdf, pdf):
            w.writerow([repr(float(v)) for v in row])
