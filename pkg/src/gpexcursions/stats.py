"""Empirical distributions and theory-versus-simulation reports."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "EmpiricalDistribution",
    "ValidationReport",
    "ScalarCheck",
    "ecdf",
    "ks_statistic",
    "histogram",
    "validate",
    "check_scalar",
]

GRID_POINTS = 201


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    samples: np.ndarray

    def __post_init__(self):
        x = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if x.size < 1:
            raise ValueError("an empirical distribution needs at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def n(self) -> int:
        return self.samples.size

    def cdf(self, x):
        return ecdf(self, x)

    def cdf_left(self, x):
        """Left limit ``P(X < x)``."""
        out = np.searchsorted(self.samples, x, side="left") / self.n
        return float(out) if np.ndim(out) == 0 else out


def ecdf(dist: EmpiricalDistribution, x):
    """Right-continuous fraction of samples ``<= x``."""
    out = np.searchsorted(dist.samples, x, side="right") / dist.n
    return float(out) if np.ndim(out) == 0 else out


def ks_statistic(dist: EmpiricalDistribution, cdf) -> float:
    """Kolmogorov-Smirnov distance ``sup |ECDF - F|``.

    ``cdf`` is a callable or an object with a ``cdf`` method.  Both one-sided
    limits of the ECDF are compared at every distinct sample; if ``cdf`` also
    offers ``cdf_left`` the left limits are compared with it, so laws with
    atoms are handled exactly.
    """
    f = getattr(cdf, "cdf", cdf)
    f_left = getattr(cdf, "cdf_left", f)
    x = np.unique(dist.samples)
    right = np.searchsorted(dist.samples, x, side="right") / dist.n
    left = np.searchsorted(dist.samples, x, side="left") / dist.n
    d_plus = np.abs(right - np.asarray(f(x), dtype=float))
    d_minus = np.abs(left - np.asarray(f_left(x), dtype=float))
    return float(max(d_plus.max(), d_minus.max()))


def histogram(dist: EmpiricalDistribution, bins: int, range: tuple):
    """Density histogram normalized by the total sample count.

    The bars integrate to the fraction of samples inside ``range``.
    """
    lo, hi = range
    if bins < 1 or not lo < hi:
        raise ValueError("need bins >= 1 and lo < hi")
    counts, edges = np.histogram(dist.samples, bins=bins, range=(lo, hi))
    return edges, counts / (dist.n * np.diff(edges))


@dataclass(frozen=True, eq=False)
class ValidationReport:
    label: str
    n_events: int
    ks_distance: float
    tolerance: float
    min_events: int
    theory_grid: np.ndarray = field(repr=False)
    empirical_grid: np.ndarray = field(repr=False)
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.n_events >= self.min_events and self.ks_distance <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "type": "ks",
            "label": self.label,
            "n_events": self.n_events,
            "ks_distance": self.ks_distance,
            "tolerance": self.tolerance,
            "min_events": self.min_events,
            "pass": self.passed,
            "reason": self.reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    def write_grid_csv(self, filename) -> None:
        with open(filename, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "theory_cdf", "empirical_cdf"])
            for (x, f), (_, e) in zip(self.theory_grid, self.empirical_grid):
                w.writerow([repr(float(x)), repr(float(f)), repr(float(e))])

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.reason})" if self.reason else ""
        return (
            f"[{status}] {self.label}: KS={self.ks_distance:.4f} <= {self.tolerance} "
            f"n={self.n_events} (min {self.min_events}){extra}"
        )


def validate(
    label: str,
    samples,
    theory,
    tolerance: float,
    min_events: int,
    grid: Optional[np.ndarray] = None,
) -> ValidationReport:
    """Compare ``samples`` with the law ``theory`` by KS distance."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n == 0:
        empty = np.empty((0, 2))
        return ValidationReport(label, 0, 1.0, tolerance, min_events, empty, empty,
                                "insufficient events")
    dist = EmpiricalDistribution(samples)
    d = ks_statistic(dist, theory)
    if grid is None:
        grid = np.linspace(dist.samples[0], dist.samples[-1], GRID_POINTS)
    f = getattr(theory, "cdf", theory)
    theory_grid = np.column_stack([grid, np.asarray(f(grid), dtype=float)])
    empirical_grid = np.column_stack([grid, ecdf(dist, grid)])
    reason = ""
    if n < min_events:
        reason = "insufficient events"
    elif d > tolerance:
        reason = "distance above tolerance"
    return ValidationReport(label, n, d, tolerance, min_events, theory_grid, empirical_grid,
                            reason)


@dataclass(frozen=True)
class ScalarCheck:
    """An observed statistic against its closed-form value."""

    label: str
    observed: Optional[float]
    expected: float
    tolerance: float
    relative: bool = False
    n_events: int = 0
    min_events: int = 0

    @property
    def error(self) -> float:
        if self.observed is None:
            return math.inf
        err = abs(self.observed - self.expected)
        return err / abs(self.expected) if self.relative else err

    @property
    def passed(self) -> bool:
        return self.n_events >= self.min_events and self.error <= self.tolerance

    @property
    def reason(self) -> str:
        if self.n_events < self.min_events:
            return "insufficient events"
        return "" if self.passed else "error above tolerance"

    def as_dict(self) -> dict:
        return {
            "type": "scalar",
            "label": self.label,
            "observed": self.observed,
            "expected": self.expected,
            "error": self.error if math.isfinite(self.error) else None,
            "tolerance": self.tolerance,
            "relative": self.relative,
            "n_events": self.n_events,
            "min_events": self.min_events,
            "pass": self.passed,
            "reason": self.reason,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        kind = "rel" if self.relative else "abs"
        obs = "none" if self.observed is None else f"{self.observed:.6g}"
        return (
            f"[{status}] {self.label}: observed={obs} expected={self.expected:.6g} "
            f"{kind}err={self.error:.3g} <= {self.tolerance} n={self.n_events}"
        )


def check_scalar(label, observed, expected, tolerance, relative=False, n_events=0,
                 min_events=0) -> ScalarCheck:
    return ScalarCheck(label, None if observed is None else float(observed), float(expected),
                       tolerance, relative, int(n_events), int(min_events))
