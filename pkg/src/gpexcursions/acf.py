"""Autocorrelation models of a unit-variance stationary Gaussian process.

Two parametric families are built in,

* ``exponential``          R(tau) = exp(-|tau| / d_c)          (Gauss-Markov)
* ``squared_exponential``  R(tau) = exp(-(tau / d_c)**2 / 2)

plus a ``tabulated`` kind read from ``lag,value`` pairs and linearly
interpolated.  The spectral moments ``lambda0 = R(0)``, ``lambda2 = -R''(0)``
and ``lambda4 = R''''(0)`` drive every crossing formula in the package.
"""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import AcfRangeError, EstimationError

__all__ = [
    "AcfKind",
    "AcfModel",
    "ConditionFlags",
    "SpectralMoments",
    "eval_acf",
    "spectral_moments",
    "check_conditions",
    "derivative_moments",
    "read_acf_csv",
]

# lag-0 normalization slack for tabulated input
_NORMALIZATION_TOL = 1e-9
# relative disagreement between two stencil widths that flags a divergent moment
_DIVERGENCE_TOL = 0.10


class AcfKind(str, enum.Enum):
    EXPONENTIAL = "exponential"
    SQUARED_EXPONENTIAL = "squared_exponential"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class ConditionFlags:
    """Regularity conditions on R used by the asymptotic theorems.

    ``None`` means unknown.  ``eq2`` is the local expansion with finite
    ``lambda2``; ``eq5``/``eq6`` are the smoothness and decay hypotheses of
    the parabolic large-excursion theorem; ``eq8``/``eq9`` are the fourth-order
    expansion and polynomial decay needed by the Erlang interval theorem and
    the negative-excursion exponential law.
    """

    eq2: Optional[bool] = None
    eq5: Optional[bool] = None
    eq6: Optional[bool] = None
    eq8: Optional[bool] = None
    eq9: Optional[bool] = None

    @staticmethod
    def _both(a, b):
        if a is False or b is False:
            return False
        if a is None or b is None:
            return None
        return True

    @property
    def cond_eq5_6(self) -> Optional[bool]:
        return self._both(self.eq5, self.eq6)

    @property
    def cond_eq8_9(self) -> Optional[bool]:
        return self._both(self.eq8, self.eq9)

    def as_dict(self) -> dict:
        return {
            "cond_eq2": self.eq2,
            "cond_eq5": self.eq5,
            "cond_eq6": self.eq6,
            "cond_eq8": self.eq8,
            "cond_eq9": self.eq9,
            "cond_eq5_6": self.cond_eq5_6,
            "cond_eq8_9": self.cond_eq8_9,
        }


_PARAMETRIC_FLAGS = {
    AcfKind.SQUARED_EXPONENTIAL: ConditionFlags(True, True, True, True, True),
    # not differentiable at 0, but it does decay
    AcfKind.EXPONENTIAL: ConditionFlags(False, False, True, False, True),
}


@dataclass(frozen=True, eq=False)
class AcfModel:
    """An autocorrelation function with unit variance.

    Use the :meth:`exponential`, :meth:`squared_exponential` and
    :meth:`tabulated` constructors rather than the raw initializer.
    """

    kind: AcfKind
    d_c: Optional[float] = None
    lags: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    flags: Optional[ConditionFlags] = None

    def __post_init__(self):
        kind = AcfKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is AcfKind.TABULATED:
            if self.lags is None or self.values is None:
                raise ValueError("tabulated ACF needs lags and values")
            lags = np.array(self.lags, dtype=float)
            values = np.array(self.values, dtype=float)
            if lags.ndim != 1 or lags.shape != values.shape or lags.size < 2:
                raise ValueError("lags and values must be 1-D of equal length >= 2")
            if lags[0] != 0.0:
                raise ValueError("tabulated ACF must start at lag 0")
            if np.any(np.diff(lags) <= 0):
                raise ValueError("lags must be strictly increasing")
            if not np.all(np.isfinite(values)):
                raise ValueError("ACF values must be finite")
            r0 = values[0]
            if r0 <= 0:
                raise ValueError("R(0) must be positive")
            if abs(r0 - 1.0) > _NORMALIZATION_TOL:
                warnings.warn(
                    f"tabulated ACF has R(0)={r0!r}; normalizing to unit variance",
                    stacklevel=3,
                )
            values = values / r0
            if np.any(np.abs(values) > 1.0 + 1e-12):
                raise ValueError("normalized ACF must satisfy |R| <= 1")
            lags.setflags(write=False)
            values.setflags(write=False)
            object.__setattr__(self, "lags", lags)
            object.__setattr__(self, "values", values)
        else:
            if self.d_c is None or not (self.d_c > 0) or not math.isfinite(self.d_c):
                raise ValueError("d_c must be a positive finite number")
            object.__setattr__(self, "d_c", float(self.d_c))

    @classmethod
    def exponential(cls, d_c: float) -> "AcfModel":
        return cls(AcfKind.EXPONENTIAL, d_c=d_c)

    @classmethod
    def squared_exponential(cls, d_c: float) -> "AcfModel":
        return cls(AcfKind.SQUARED_EXPONENTIAL, d_c=d_c)

    @classmethod
    def tabulated(cls, lags, values, flags: Optional[ConditionFlags] = None) -> "AcfModel":
        return cls(AcfKind.TABULATED, lags=lags, values=values, flags=flags)

    @classmethod
    def from_csv(cls, path, flags: Optional[ConditionFlags] = None) -> "AcfModel":
        lags, values = read_acf_csv(path)
        return cls.tabulated(lags, values, flags=flags)

    @property
    def max_lag(self) -> float:
        if self.kind is AcfKind.TABULATED:
            return float(self.lags[-1])
        return math.inf

    @property
    def model_id(self) -> str:
        if self.kind is AcfKind.TABULATED:
            return f"tabulated(n={self.lags.size},max_lag={self.max_lag:g})"
        return f"{self.kind.value}(d_c={self.d_c:g})"

    def __call__(self, tau):
        return eval_acf(self, tau)

    def __repr__(self):
        return f"AcfModel<{self.model_id}>"


def eval_acf(model: AcfModel, tau):
    """Evaluate R(tau); accepts scalars or arrays and is even in ``tau``."""
    a = np.abs(np.asarray(tau, dtype=float))
    if model.kind is AcfKind.EXPONENTIAL:
        out = np.exp(-a / model.d_c)
    elif model.kind is AcfKind.SQUARED_EXPONENTIAL:
        out = np.exp(-0.5 * (a / model.d_c) ** 2)
    else:
        if np.any(a > model.max_lag):
            raise AcfRangeError(
                f"lag {float(np.max(a))!r} beyond tabulated range {model.max_lag!r}"
            )
        out = np.interp(a, model.lags, model.values)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SpectralMoments:
    lambda0: float
    lambda2: float
    lambda4: float
    cond_eq2: bool
    cond_eq5_6: Optional[bool]
    cond_eq8_9: Optional[bool]
    numeric: bool = False

    @property
    def has_finite_rate(self) -> bool:
        return math.isfinite(self.lambda2)


def _second_diff(r, h):
    # symmetric stencil folded by evenness: (R(h) - 2R(0) + R(-h)) / h^2
    return 2.0 * (r(h) - r(0.0)) / h**2


def _fourth_diff(r, h):
    return (2.0 * r(2 * h) - 8.0 * r(h) + 6.0 * r(0.0)) / h**4


def _richardson(f: Callable[[float], float], h: float, levels: int) -> float:
    """Richardson extrapolation of an O(h^2)-accurate even stencil."""
    table = [f(h / 2**i) for i in range(levels)]
    for k in range(1, levels):
        factor = 4.0**k
        table = [
            (factor * table[i + 1] - table[i]) / (factor - 1.0)
            for i in range(len(table) - 1)
        ]
    return table[0]


def derivative_moments(r: Callable[[float], float], step: float, levels: int = 4):
    """Estimate ``(lambda2, lambda4)`` of a smooth ACF given as a callable.

    Central differences at the origin, Richardson extrapolated over
    ``levels`` successive halvings of ``step``.
    """
    lam2 = -_richardson(lambda h: _second_diff(r, h), step, levels)
    lam4 = _richardson(lambda h: _fourth_diff(r, h), step, levels)
    return lam2, lam4


def _tabulated_moments(model: AcfModel, step: Optional[float]):
    lags = model.lags
    h = float(lags[1]) if step is None else float(step)
    if lags.size < 5 or 4 * h > model.max_lag:
        raise EstimationError(
            "tabulated ACF grid too coarse: need at least lags h, 2h, 4h "
            f"(h={h!r}, max lag {model.max_lag!r})"
        )
    r = lambda x: eval_acf(model, x)  # noqa: E731
    fine, coarse = -_second_diff(r, h), -_second_diff(r, 2 * h)
    if fine <= 0:
        raise EstimationError("ACF does not decrease near the origin")
    if abs(fine - coarse) > _DIVERGENCE_TOL * abs(fine):
        return math.inf, math.inf
    lam2 = (4.0 * fine - coarse) / 3.0
    fine4, coarse4 = _fourth_diff(r, h), _fourth_diff(r, 2 * h)
    if fine4 <= 0 or abs(fine4 - coarse4) > _DIVERGENCE_TOL * abs(fine4):
        return lam2, math.inf
    return lam2, (4.0 * fine4 - coarse4) / 3.0


def check_conditions(model: AcfModel) -> ConditionFlags:
    """Declared regularity flags of ``model``.

    The conditions involving unspecified exponents are asymptotic and are not
    decidable from finitely many evaluations, so they are declared per kind.
    Tabulated models echo the caller's flags, or all-unknown.
    """
    if model.kind is AcfKind.TABULATED:
        return model.flags if model.flags is not None else ConditionFlags()
    return _PARAMETRIC_FLAGS[model.kind]


def spectral_moments(model: AcfModel, step: Optional[float] = None) -> SpectralMoments:
    """Spectral moments ``lambda0``, ``lambda2``, ``lambda4`` of ``model``.

    Parametric kinds are analytic.  Tabulated kinds use central differences at
    the origin with ``step`` (default: the first grid spacing); a moment is
    reported as ``inf`` when the estimates at ``step`` and ``2*step`` disagree
    by more than 10%.
    """
    flags = check_conditions(model)
    if model.kind is AcfKind.SQUARED_EXPONENTIAL:
        d = model.d_c
        return SpectralMoments(1.0, 1.0 / d**2, 3.0 / d**4, True, True, True)
    if model.kind is AcfKind.EXPONENTIAL:
        return SpectralMoments(1.0, math.inf, math.inf, False, False, False)
    lam2, lam4 = _tabulated_moments(model, step)
    finite2 = math.isfinite(lam2)
    return SpectralMoments(
        lambda0=1.0,
        lambda2=lam2,
        lambda4=lam4,
        cond_eq2=finite2,
        cond_eq5_6=flags.cond_eq5_6 if finite2 else False,
        cond_eq8_9=flags.cond_eq8_9 if math.isfinite(lam4) else False,
        numeric=True,
    )


def read_acf_csv(path):
    """Read a two-column ``lag,value`` CSV with a mandatory header."""
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if row.strip() and not row.startswith("#"))
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["lag", "value"]:
            raise ValueError(f"{path}: expected header 'lag,value', got {header!r}")
        rows = [(float(a), float(b)) for a, b in reader]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    lags, values = map(np.asarray, zip(*rows))
    if np.any(lags < 0):
        raise ValueError(f"{path}: lags must be non-negative")
    return lags, values
