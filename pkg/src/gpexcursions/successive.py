"""Two-level statistics of high excursions.

Above a high level ``gamma1`` an excursion follows the parabola
``gamma1 + xi t - gamma1 lambda2 t^2 / 2`` with Rayleigh slope ``xi``.  Its
length is ``T1 = 2 xi / (gamma1 lambda2)``; it reaches a second level
``gamma2 >= gamma1`` iff the discriminant
``Delta = xi^2 - 2 gamma1 lambda2 (gamma2 - gamma1)`` is positive, and then
spends ``T2 = 2 sqrt(Delta) / (gamma1 lambda2)`` above it.  Because ``xi^2``
is exponential, every quantity below reduces to Gaussian-type exponentials in
the constant ``V = gamma1^2 lambda2 / 8`` and the critical length
``tau1* = sqrt(8 (gamma2 - gamma1) / (gamma1 lambda2))``.

Conditioning is always on the ``gamma1`` excursion having ``T1 >= tau1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special, stats

from .errors import ConditioningError, DomainError, OracleInsufficientError
from .gp import make_rng
from .theory import LevelContext, up_rate

__all__ = [
    "TwoLevelSpec",
    "T2PositiveLaw",
    "OracleResult",
    "mean_upcrossings_conditional",
    "mean_downcrossings_conditional",
    "mean_crossings_conditional",
    "t2_mass_at_zero",
    "t2_survival",
    "t2_at_least",
    "t2_tail_integral",
    "expected_t2_conditional",
    "window_case",
    "window_probability",
    "window_probability_terms",
    "window_probability_product_form",
    "parabola_mc_oracle",
    "export_json",
]


@dataclass(frozen=True)
class TwoLevelSpec:
    gamma1: float
    gamma2: float
    lambda2: float
    tau1: float = 0.0
    tau2: float = 0.0

    def __post_init__(self):
        if not (self.gamma1 > 0) or not math.isfinite(self.gamma1):
            raise DomainError("gamma1 must be positive and finite")
        if not (self.gamma2 >= self.gamma1) or not math.isfinite(self.gamma2):
            raise DomainError("gamma2 must be finite and >= gamma1")
        if not (self.lambda2 > 0) or not math.isfinite(self.lambda2):
            raise DomainError("lambda2 must be positive and finite")
        if not (self.tau1 >= 0 and self.tau2 >= 0):
            raise DomainError("tau1 and tau2 must be non-negative")

    @property
    def V(self) -> float:
        return self.gamma1**2 * self.lambda2 / 8.0

    @property
    def tau1_star(self) -> float:
        return math.sqrt(8.0 * (self.gamma2 - self.gamma1) / (self.gamma1 * self.lambda2))

    @property
    def tau2_star(self) -> Optional[float]:
        """``sqrt(tau1^2 - tau1*^2)``, defined only when ``tau1 > tau1*``."""
        t1s = self.tau1_star
        if self.tau1 > t1s:
            return math.sqrt(self.tau1**2 - t1s**2)
        return None

    @property
    def long_first_excursion(self) -> bool:
        """True when ``tau1 > tau1*``: every qualifying excursion reaches ``gamma2``."""
        return self.tau1 > self.tau1_star

    def derived(self) -> dict:
        return {"V": self.V, "tau1_star": self.tau1_star, "tau2_star": self.tau2_star}


def mean_upcrossings_conditional(spec: TwoLevelSpec) -> float:
    """Mean # up-crossings of ``gamma2`` in a ``gamma1`` excursion with ``T1 >= tau1``."""
    t1s2, t12 = spec.tau1_star**2, spec.tau1**2
    return math.exp(-spec.V * (max(t1s2, t12) - t12))


def mean_downcrossings_conditional(spec: TwoLevelSpec) -> float:
    return mean_upcrossings_conditional(spec)


def mean_crossings_conditional(spec: TwoLevelSpec) -> float:
    return 2.0 * mean_upcrossings_conditional(spec)


def t2_mass_at_zero(spec: TwoLevelSpec) -> float:
    """``P(T2 = 0 | T1 >= tau1)``: the excursion never reaches ``gamma2``."""
    if spec.long_first_excursion:
        return 0.0
    return -math.expm1(-spec.V * (spec.tau1_star**2 - spec.tau1**2))


def t2_survival(spec: TwoLevelSpec, tau):
    """``P(T2 > tau | T1 >= tau1)`` for ``tau >= 0``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be non-negative")
    t12 = spec.tau1**2
    out = np.exp(-spec.V * (np.maximum(tau**2 + spec.tau1_star**2, t12) - t12))
    return float(out) if out.ndim == 0 else out


def t2_at_least(spec: TwoLevelSpec, tau2: Optional[float] = None) -> float:
    """``P(T2 >= tau2 | T1 >= tau1)``; at ``tau2 = 0`` the atom is included."""
    tau2 = spec.tau2 if tau2 is None else tau2
    p = t2_survival(spec, tau2)
    if tau2 == 0:
        p += t2_mass_at_zero(spec)
    return p


def _scaled_erfc_tail(spec: TwoLevelSpec, a: float) -> float:
    # exp(-V (tau1*^2 - tau1^2)) * sqrt(pi / 4V) * erfc(sqrt(V) a), kept finite via erfcx
    V = spec.V
    log_pref = -V * (spec.tau1_star**2 - spec.tau1**2 + a * a)
    return math.exp(log_pref) * math.sqrt(math.pi / (4.0 * V)) * special.erfcx(math.sqrt(V) * a)


def t2_tail_integral(spec: TwoLevelSpec, tau2: Optional[float] = None) -> float:
    """``integral_{tau2}^inf P(T2 > tau | T1 >= tau1) dtau`` in closed form."""
    tau2 = spec.tau2 if tau2 is None else float(tau2)
    t2s = spec.tau2_star
    if t2s is None:
        return _scaled_erfc_tail(spec, tau2)
    flat = max(t2s - tau2, 0.0)
    return flat + _scaled_erfc_tail(spec, max(t2s, tau2))


def expected_t2_conditional(spec: TwoLevelSpec) -> float:
    """``E{T2 | T2 >= tau2, T1 >= tau1}``."""
    p = t2_at_least(spec)
    if not p > 0:
        raise ConditioningError(f"P(T2 >= tau2 | T1 >= tau1) is zero for {spec}")
    return spec.tau2 + t2_tail_integral(spec) / p


def window_case(spec: TwoLevelSpec) -> int:
    """Closed-form branch for the window probability (1-4)."""
    if not spec.long_first_excursion:
        return 1 if spec.tau2 == 0 else 2
    return 3 if spec.tau2 >= spec.tau2_star else 4


def window_probability(spec: TwoLevelSpec, up_rate_gamma1: float) -> float:
    """Long-run fraction of time spent in a ``gamma2`` excursion of length
    ``>= tau2`` nested in a ``gamma1`` excursion of length ``>= tau1``.

    The window length cancels, so this is also the probability for any
    window under ergodicity.  ``up_rate_gamma1`` is the up-crossing rate of
    ``gamma1``.
    """
    V, t1s, tau1, tau2 = spec.V, spec.tau1_star, spec.tau1, spec.tau2
    root = math.sqrt(math.pi / (4.0 * V))
    case = window_case(spec)
    if case == 1:
        p = math.exp(-V * t1s**2) * root
    elif case in (2, 3):
        p = math.exp(-V * t1s**2) * (
            tau2 * math.exp(-V * tau2**2) + root * special.erfc(math.sqrt(V) * tau2)
        )
    else:
        t2s = spec.tau2_star
        p = t2s * math.exp(-V * tau1**2) + math.exp(-V * t1s**2) * root * special.erfc(
            math.sqrt(V) * t2s
        )
    p *= up_rate_gamma1
    if not (0.0 <= p <= 1.0):
        raise ArithmeticError(f"window probability {p!r} outside [0, 1] for {spec}")
    return p


def window_probability_terms(spec: TwoLevelSpec, up_rate_gamma1: float) -> dict:
    """Factors whose product is :func:`window_probability`.

    ``qualifying_rate`` is the rate of ``gamma1`` excursions with
    ``T1 >= tau1``; ``p_t2_at_least`` and ``expected_t2_conditional`` are the
    conditional law of the nested ``gamma2`` excursion.
    """
    rate = up_rate_gamma1 * math.exp(-spec.V * spec.tau1**2)
    p = t2_at_least(spec)
    return {
        "qualifying_rate": rate,
        "p_t2_at_least": p,
        "expected_t2_conditional": expected_t2_conditional(spec) if p > 0 else None,
        "t2_tail_integral": t2_tail_integral(spec),
    }


def window_probability_product_form(spec: TwoLevelSpec, up_rate_gamma1: float) -> float:
    """Three-factor product that also multiplies by the conditional up-crossing
    mean.

    Kept for comparison only.  ``P(T2 >= tau2)`` already contains the
    probability of reaching ``gamma2``, so for ``tau1 < tau1*`` this counts it
    twice and falls below :func:`window_probability` by that factor.
    """
    terms = window_probability_terms(spec, up_rate_gamma1)
    return (
        terms["qualifying_rate"]
        * mean_upcrossings_conditional(spec)
        * (terms["p_t2_at_least"] * spec.tau2 + terms["t2_tail_integral"])
    )


@dataclass(frozen=True)
class T2PositiveLaw:
    """Law of ``T2`` given ``T2 > 0`` and ``T1 >= tau1``."""

    spec: TwoLevelSpec

    @property
    def _floor2(self) -> float:
        t2s = self.spec.tau2_star
        return 0.0 if t2s is None else t2s**2

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return np.exp(-self.spec.V * (np.maximum(x**2, self._floor2) - self._floor2))

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x**2 > self._floor2, 2.0 * self.spec.V * x * self.sf(x), 0.0)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        return np.sqrt(self._floor2 - np.log1p(-p) / self.spec.V)

    @property
    def mean(self) -> float:
        return t2_tail_integral(self.spec, 0.0) / t2_survival(self.spec, 0.0)


@dataclass(frozen=True, eq=False)
class OracleResult:
    estimates: dict
    std_errors: dict
    grid: np.ndarray
    p_t2_gt: np.ndarray
    p_t2_gt_se: np.ndarray
    n_samples: int
    n_conditioned: int
    conditioning_rate: float
    conditioning: str = "truncate"
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "estimates": dict(self.estimates),
            "std_errors": dict(self.std_errors),
            "grid": self.grid.tolist(),
            "p_t2_gt": self.p_t2_gt.tolist(),
            "p_t2_gt_se": self.p_t2_gt_se.tolist(),
            "n_samples": self.n_samples,
            "n_conditioned": self.n_conditioned,
            "conditioning_rate": self.conditioning_rate,
            "conditioning": self.conditioning,
        }


def _mean_se(x: np.ndarray):
    n = x.size
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf


def parabola_mc_oracle(
    spec: TwoLevelSpec,
    n_samples: int = 10**6,
    seed: int = 0,
    grid=None,
    up_rate_gamma1: Optional[float] = None,
    conditioning: str = "truncate",
) -> OracleResult:
    """Monte Carlo over Rayleigh slopes of the parabolic excursion model.

    ``conditioning="truncate"`` draws ``xi`` from the Rayleigh law truncated
    to ``T1 >= tau1`` by inverse transform, so every draw is conditioned even
    when the event is rare.  ``"reject"`` draws unconditioned slopes and
    discards those below the threshold.
    """
    if n_samples < 10**4:
        raise ValueError("the oracle needs at least 1e4 draws")
    g1, lam2 = spec.gamma1, spec.lambda2
    rng = make_rng(seed)
    slope = stats.rayleigh(scale=math.sqrt(lam2))
    threshold = 0.5 * g1 * lam2 * spec.tau1

    if conditioning == "truncate":
        mass = float(slope.sf(threshold))
        if not mass > 0:
            raise OracleInsufficientError("conditioning event has zero mass", 0.0)
        u = rng.random(n_samples)
        xi = slope.isf((1.0 - u) * mass)
        weight = np.ones(n_samples, dtype=bool)
    elif conditioning == "reject":
        xi_all = slope.rvs(size=n_samples, random_state=rng)
        weight = xi_all >= threshold
        xi = xi_all[weight]
        mass = float(weight.mean())
        if xi.size == 0:
            raise OracleInsufficientError(
                f"no draw satisfied T1 >= {spec.tau1} (observed rate {mass})", mass
            )
    else:
        raise ValueError(f"unknown conditioning {conditioning!r}")

    delta = xi**2 - 2.0 * g1 * lam2 * (spec.gamma2 - g1)
    t2 = np.where(delta > 0, 2.0 * np.sqrt(np.maximum(delta, 0.0)) / (g1 * lam2), 0.0)
    m = xi.size

    est, se = {}, {}
    est["p_upcross"], se["p_upcross"] = _mean_se((delta > 0).astype(float))
    est["t2_mass_at_zero"], se["t2_mass_at_zero"] = _mean_se((t2 == 0).astype(float))
    est["p_t2_at_least"], se["p_t2_at_least"] = _mean_se((t2 >= spec.tau2).astype(float))
    est["p_t2_gt_tau2"], se["p_t2_gt_tau2"] = _mean_se((t2 > spec.tau2).astype(float))
    selected = t2[t2 >= spec.tau2]
    if selected.size >= 2:
        est["mean_t2_conditional"], se["mean_t2_conditional"] = _mean_se(selected)
    else:
        est["mean_t2_conditional"], se["mean_t2_conditional"] = None, None
    t1 = 2.0 * xi / (g1 * lam2)
    est["mean_t1"], se["mean_t1"] = _mean_se(t1)

    if up_rate_gamma1 is None:
        up_rate_gamma1 = up_rate(LevelContext(g1, lam2))
    occupied = t2 * (t2 >= spec.tau2)
    if conditioning == "truncate":
        mean, err = _mean_se(occupied)
        est["window_probability"] = up_rate_gamma1 * mass * mean
        se["window_probability"] = up_rate_gamma1 * mass * err
    else:
        full = np.zeros(n_samples)
        full[weight] = occupied
        mean, err = _mean_se(full)
        est["window_probability"] = up_rate_gamma1 * mean
        se["window_probability"] = up_rate_gamma1 * err

    if grid is None:
        grid = np.linspace(0.0, max(float(t2.max()), spec.tau2, 1.0), 16)
    grid = np.asarray(grid, dtype=float)
    p_gt = (t2[None, :] > grid[:, None]).mean(axis=1)
    p_gt_se = np.sqrt(p_gt * (1.0 - p_gt) / m)
    return OracleResult(
        estimates=est,
        std_errors=se,
        grid=grid,
        p_t2_gt=p_gt,
        p_t2_gt_se=p_gt_se,
        n_samples=int(n_samples),
        n_conditioned=int(m),
        conditioning_rate=mass,
        conditioning=conditioning,
        extra={"t2": t2},
    )


def export_json(
    spec: TwoLevelSpec, up_rate_gamma1: float, oracle: Optional[OracleResult] = None
) -> dict:
    """Serializable record of inputs, derived constants, closed forms and oracle."""
    p_ge = t2_at_least(spec)
    out = {
        "inputs": {
            "gamma1": spec.gamma1,
            "gamma2": spec.gamma2,
            "tau1": spec.tau1,
            "tau2": spec.tau2,
            "lambda2": spec.lambda2,
            "up_rate_gamma1": up_rate_gamma1,
        },
        "derived": spec.derived(),
        "outputs": {
            "case": window_case(spec),
            "mean_upcrossings": mean_upcrossings_conditional(spec),
            "mean_downcrossings": mean_downcrossings_conditional(spec),
            "mean_crossings": mean_crossings_conditional(spec),
            "t2_mass_at_zero": t2_mass_at_zero(spec),
            "t2_survival_tau2": t2_survival(spec, spec.tau2),
            "t2_at_least_tau2": p_ge,
            "expected_t2_conditional": expected_t2_conditional(spec) if p_ge > 0 else None,
            "window_probability": window_probability(spec, up_rate_gamma1),
        },
    }
    if oracle is not None:
        d = oracle.as_dict()
        out["oracle"] = {
            "estimates": d["estimates"],
            "std_errors": d["std_errors"],
            "n_samples": d["n_samples"],
            "conditioning_rate": d["conditioning_rate"],
        }
    return out
