"""Level crossings and excursions on a discretely sampled path.

A crossing of ``level`` is a sign change of ``X - level`` between two samples.
Samples exactly on the level are bridged: the event is placed between the
nearest samples on either side that differ from the level, so a tangency
(``-, 0, -``) produces nothing while ``-, 0, +`` produces one up-crossing.
Crossing instants are linearly interpolated between those straddling samples.

The array-level ``crossing_table`` / ``excursion_table`` do the work; the
list-of-records functions are thin views for small inputs and exports.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .gp import SamplePath

__all__ = [
    "CrossingEvent",
    "Excursion",
    "ExcursionList",
    "CrossingTable",
    "ExcursionTable",
    "Rates",
    "ConditionalStats",
    "crossing_table",
    "excursion_table",
    "detect_crossings",
    "segment_excursions",
    "empirical_rates",
    "pooled_rates",
    "crossing_intervals",
    "conditional_upcrossing_stats",
    "write_excursions_csv",
    "write_events_csv",
]

UP, DOWN = 1, -1


@dataclass(frozen=True)
class CrossingEvent:
    kind: str  # "up" | "down"
    time: float
    # last sample before the crossing that is off the level
    left_index: int


@dataclass(frozen=True)
class Excursion:
    kind: str  # "up_above" | "down_below"
    level: float
    start: float
    end: float
    length: float
    peak: float


class ExcursionList(list):
    """A list of :class:`Excursion` that also reports censored segments."""

    def __init__(self, items=(), discarded_boundary=0, discarded_duration=0.0):
        super().__init__(items)
        self.discarded_boundary = discarded_boundary
        self.discarded_duration = discarded_duration


@dataclass(frozen=True, eq=False)
class CrossingTable:
    level: float
    times: np.ndarray
    kinds: np.ndarray  # +1 up, -1 down
    left: np.ndarray
    right: np.ndarray
    duration: float

    def __len__(self):
        return self.times.size

    def times_of(self, kind: str) -> np.ndarray:
        return self.times[self.kinds == _kind_code(kind)]


@dataclass(frozen=True, eq=False)
class ExcursionTable:
    level: float
    kinds: np.ndarray  # +1 up_above, -1 down_below
    start: np.ndarray
    end: np.ndarray
    peak: np.ndarray
    discarded_boundary: int
    discarded_duration: float

    @property
    def length(self) -> np.ndarray:
        return self.end - self.start

    def select(self, kind: str) -> "ExcursionTable":
        keep = self.kinds == (UP if kind == "up_above" else DOWN)
        return ExcursionTable(
            self.level,
            self.kinds[keep],
            self.start[keep],
            self.end[keep],
            self.peak[keep],
            self.discarded_boundary,
            self.discarded_duration,
        )


def _kind_code(kind: str) -> int:
    if kind == "up":
        return UP
    if kind == "down":
        return DOWN
    raise ValueError(f"kind must be 'up' or 'down', got {kind!r}")


def crossing_table(path: SamplePath, level: float) -> CrossingTable:
    d = path.values - level
    off = np.flatnonzero(d != 0.0)
    sign = np.sign(d[off])
    change = np.flatnonzero(sign[1:] != sign[:-1])
    i, j = off[change], off[change + 1]
    di, dj = d[i], d[j]
    times = (i + (j - i) * (di / (di - dj))) * path.dt
    kinds = np.where(dj > 0, UP, DOWN).astype(np.int8)
    return CrossingTable(float(level), times, kinds, i, j, path.duration)


def detect_crossings(path: SamplePath, level: float) -> list[CrossingEvent]:
    """Time-ordered up/down crossings of ``level``; up and down alternate."""
    tab = crossing_table(path, level)
    return [
        CrossingEvent("up" if k == UP else "down", float(t), int(i))
        for t, k, i in zip(tab.times, tab.kinds, tab.left)
    ]


def excursion_table(path: SamplePath, level: float) -> ExcursionTable:
    """Excursions between consecutive crossings; both path ends are censored."""
    tab = crossing_table(path, level)
    n = len(tab)
    if n == 0:
        touches = bool(np.any(path.values != level))
        empty = np.empty(0)
        return ExcursionTable(
            float(level), np.empty(0, np.int8), empty, empty, empty,
            int(touches), path.duration if touches else 0.0,
        )
    start, end = tab.times[:-1], tab.times[1:]
    kinds = tab.kinds[:-1]
    # samples[right[k] : right[k+1]] all lie on the excursion side (or on the level)
    hi = np.maximum.reduceat(path.values, tab.right)[:-1]
    lo = np.minimum.reduceat(path.values, tab.right)[:-1]
    peak = np.where(kinds == UP, hi, lo)
    discarded = tab.times[0] + (path.duration - tab.times[-1])
    return ExcursionTable(float(level), kinds, start, end, peak, 2, float(discarded))


def segment_excursions(path: SamplePath, level: float) -> ExcursionList:
    tab = excursion_table(path, level)
    items = [
        Excursion(
            "up_above" if k == UP else "down_below",
            tab.level, float(s), float(e), float(e - s), float(p),
        )
        for k, s, e, p in zip(tab.kinds, tab.start, tab.end, tab.peak)
    ]
    return ExcursionList(items, tab.discarded_boundary, tab.discarded_duration)


@dataclass(frozen=True)
class Rates:
    up_rate: float
    down_rate: float
    total_rate: float
    n_up: int
    n_down: int
    duration: float


def pooled_rates(paths: Iterable[SamplePath], level: float) -> Rates:
    n_up = n_down = 0
    duration = 0.0
    for p in paths:
        tab = crossing_table(p, level)
        ups = int(np.count_nonzero(tab.kinds == UP))
        n_up += ups
        n_down += len(tab) - ups
        duration += p.duration
    if duration <= 0:
        raise ValueError("total path duration must be positive")
    up, down = n_up / duration, n_down / duration
    return Rates(up, down, up + down, n_up, n_down, duration)


def empirical_rates(path: SamplePath, level: float) -> Rates:
    """Up, down and total crossing counts per unit time."""
    return pooled_rates([path], level)


def crossing_intervals(path: SamplePath, level: float, kind: str = "down", k: int = 1):
    """Times from each ``kind`` crossing to the ``k``-th subsequent one."""
    if k < 1:
        raise ValueError("k must be >= 1")
    t = crossing_table(path, level).times_of(kind)
    return t[k:] - t[:-k]


@dataclass(frozen=True, eq=False)
class ConditionalStats:
    """Up-crossings of ``gamma2`` inside qualifying up-excursions above ``gamma1``.

    ``mean_upcrossings`` is ``None`` when no excursion qualified.
    """

    gamma1: float
    gamma2: float
    tau1: float
    upcrossing_counts: np.ndarray
    t2_samples: np.ndarray

    @property
    def n_excursions(self) -> int:
        return self.upcrossing_counts.size

    @property
    def empty(self) -> bool:
        return self.n_excursions == 0

    @property
    def mean_upcrossings(self) -> Optional[float]:
        if self.empty:
            return None
        return float(self.upcrossing_counts.mean())

    @property
    def atom_fraction(self) -> Optional[float]:
        """Fraction of qualifying excursions that never reach ``gamma2``."""
        if self.empty:
            return None
        return float(np.mean(self.t2_samples == 0.0))

    @classmethod
    def pool(cls, parts: Iterable["ConditionalStats"]) -> "ConditionalStats":
        parts = list(parts)
        if not parts:
            raise ValueError("nothing to pool")
        g1, g2, t1 = parts[0].gamma1, parts[0].gamma2, parts[0].tau1
        return cls(
            g1, g2, t1,
            np.concatenate([p.upcrossing_counts for p in parts]),
            np.concatenate([p.t2_samples for p in parts]),
        )


def conditional_upcrossing_stats(
    path: SamplePath, gamma1: float, gamma2: float, tau1: float = 0.0
) -> ConditionalStats:
    """Per qualifying ``gamma1`` excursion: # up-crossings of ``gamma2`` and time above it."""
    if gamma2 < gamma1:
        raise ValueError("gamma2 must be >= gamma1")
    if tau1 < 0:
        raise ValueError("tau1 must be non-negative")
    ex1 = excursion_table(path, gamma1).select("up_above")
    keep = ex1.length >= tau1
    start, end = ex1.start[keep], ex1.end[keep]

    up2 = crossing_table(path, gamma2).times_of("up")
    counts = np.searchsorted(up2, end, "right") - np.searchsorted(up2, start, "left")

    ex2 = excursion_table(path, gamma2).select("up_above")
    cum = np.concatenate([[0.0], np.cumsum(ex2.length)])
    lo = np.searchsorted(ex2.start, start, "left")
    hi = np.searchsorted(ex2.start, end, "right")
    t2 = cum[hi] - cum[lo]
    return ConditionalStats(float(gamma1), float(gamma2), float(tau1), counts, t2)


_EXPORT_COLUMNS = ["kind", "start", "end", "length", "peak"]


def write_excursions_csv(excursions: Iterable[Excursion], filename) -> None:
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_EXPORT_COLUMNS)
        for e in excursions:
            w.writerow([e.kind, repr(e.start), repr(e.end), repr(e.length), repr(e.peak)])


def write_events_csv(events: Iterable[CrossingEvent], filename) -> None:
    """Crossing events in the excursion layout: zero length, no peak."""
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_EXPORT_COLUMNS)
        for e in events:
            w.writerow([e.kind, repr(e.time), repr(e.time), "0.0", ""])
