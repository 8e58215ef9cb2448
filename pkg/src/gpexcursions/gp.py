"""Sample-path synthesis for stationary Gaussian processes.

Paths are drawn by circulant embedding: the covariance sequence
``R(k*dt)`` is wrapped into a symmetric circulant of size ``m >= 2(n-1)``,
diagonalized by the FFT, and coloured complex white noise is transformed
back.  The real part of the result has exactly the target covariance on its
first ``n`` samples whenever the embedding is non-negative definite.

All randomness comes from a Philox counter-based generator keyed by
``(seed, replicate)`` so that replicates are independent, reproducible and
can be generated in any order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from scipy import fft as sp_fft

from .acf import AcfKind, AcfModel, eval_acf
from .errors import DomainError, SynthesisError

__all__ = [
    "SamplePath",
    "make_rng",
    "synthesize_path",
    "synthesize_blocks",
    "sample_rayleigh_xi",
    "write_path_csv",
    "read_path_csv",
]

MAX_CLIPPED_MASS = 1e-3
DIRECT_FALLBACK_MAX_N = 4096
# negative eigenvalues smaller than this (relative to the largest) are roundoff
_ROUNDOFF = 1e-12
_SEED_LIMIT = 2**64


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for the stream ``(seed, *stream)``."""
    for s in (seed, *stream):
        if not (0 <= int(s) < _SEED_LIMIT):
            raise ValueError(f"seed components must be unsigned 64-bit integers, got {s!r}")
    ss = np.random.SeedSequence([int(seed), *map(int, stream)])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class SamplePath:
    """A realization of X sampled at ``t = 0, dt, 2dt, ...``."""

    values: np.ndarray
    dt: float
    seed: int
    model_id: str
    replicate: int = 0
    method: str = "circulant"
    clipped_mass: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("a sample path needs at least two samples")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample path contains non-finite values")
        if not (self.dt > 0):
            raise ValueError("dt must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values, dt: float = 1.0, **kw) -> "SamplePath":
        kw.setdefault("seed", 0)
        kw.setdefault("model_id", "fixture")
        return cls(values=values, dt=dt, method="given", **kw)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def duration(self) -> float:
        return (self.n - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n) * self.dt


def _embedding_sizes(model: AcfModel, dt: float, n: int):
    base = 2 * (n - 1)
    if model.kind is AcfKind.TABULATED:
        if (n - 1) * dt > model.max_lag * (1 + 1e-12):
            raise SynthesisError(
                f"path span {(n - 1) * dt!r} exceeds tabulated lag range {model.max_lag!r}"
            )
        return [base]
    first = sp_fft.next_fast_len(base, real=True)
    return [first, sp_fft.next_fast_len(2 * first, real=True)]


def _circulant_spectrum(model: AcfModel, dt: float, m: int) -> np.ndarray:
    k = np.arange(m)
    c = eval_acf(model, np.minimum(k, m - k) * dt)
    return sp_fft.fft(c).real


def _clipped_fraction(lam: np.ndarray) -> float:
    neg = lam < -_ROUNDOFF * lam.max()
    if not neg.any():
        return 0.0
    return float(-lam[neg].sum() / np.abs(lam).sum())


def _direct(model: AcfModel, dt: float, n: int, rng: np.random.Generator) -> np.ndarray:
    idx = np.arange(n)
    cov = eval_acf(model, (idx[:, None] - idx[None, :]) * dt)
    w, v = np.linalg.eigh(cov)
    return v @ (np.sqrt(np.clip(w, 0.0, None)) * rng.standard_normal(n))


def synthesize_path(
    model: AcfModel, dt: float, n: int, seed: int, replicate: int = 0
) -> SamplePath:
    """Draw ``n`` samples spaced ``dt`` apart with covariance ``R(|i-j| dt)``.

    Raises :class:`SynthesisError` when the embedding has too much negative
    spectral mass and the path is too long for the direct fallback.
    """
    n = int(n)
    if n < 2:
        raise ValueError("n must be at least 2")
    if not (dt > 0) or not math.isfinite(dt):
        raise ValueError("dt must be positive and finite")
    rng = make_rng(seed, replicate)

    best = None
    for m in _embedding_sizes(model, dt, n):
        lam = _circulant_spectrum(model, dt, m)
        frac = _clipped_fraction(lam)
        if best is None or frac < best[2]:
            best = (m, lam, frac)
        if frac == 0.0:
            break
    m, lam, frac = best

    if frac == 0.0 or (frac <= MAX_CLIPPED_MASS and n > DIRECT_FALLBACK_MAX_N):
        method = "circulant"
        if frac > 0.0:
            method = "circulant-clipped"
            warnings.warn(
                f"clipped {frac:.3g} of the circulant spectrum for {model.model_id}, dt={dt}",
                stacklevel=2,
            )
        lam = np.clip(lam, 0.0, None)
        z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        values = sp_fft.fft(np.sqrt(lam / m) * z).real[:n]
    elif n <= DIRECT_FALLBACK_MAX_N:
        method = "direct"
        values = _direct(model, dt, n, rng)
        frac = 0.0
    else:
        raise SynthesisError(
            f"circulant embedding of {model.model_id} at dt={dt}, n={n} has "
            f"negative spectral mass {frac:.3g} > {MAX_CLIPPED_MASS}"
        )
    return SamplePath(
        values=values,
        dt=float(dt),
        seed=int(seed),
        model_id=model.model_id,
        replicate=int(replicate),
        method=method,
        clipped_mass=frac,
    )


def synthesize_blocks(
    model: AcfModel,
    dt: float,
    total_time: float,
    seed: int,
    block_samples: int = 2**21,
    first_replicate: int = 0,
) -> Iterator[SamplePath]:
    """Independent paths of at most ``block_samples`` covering ``total_time``.

    Block ``i`` uses the stream ``(seed, first_replicate + i)``.  Statistics
    over the blocks are pooled by the caller; excursions cut by a block edge
    are censored exactly like those cut by the ends of a single path.
    """
    n_total = int(round(total_time / dt)) + 1
    if n_total < 2:
        raise ValueError("total_time must cover at least one step")
    n_blocks = max(1, math.ceil((n_total - 1) / (block_samples - 1)))
    base, extra = divmod(n_total - 1, n_blocks)
    for i in range(n_blocks):
        steps = base + (1 if i < extra else 0)
        yield synthesize_path(model, dt, steps + 1, seed, first_replicate + i)


def sample_rayleigh_xi(lambda2: float, seed: int, size=None, replicate: int = 0):
    """Rayleigh slope draws with ``P(xi <= x) = 1 - exp(-x^2 / (2 lambda2))``."""
    if not (lambda2 > 0) or not math.isfinite(lambda2):
        raise DomainError(f"lambda2 must be positive and finite, got {lambda2!r}")
    rng = make_rng(seed, replicate)
    out = rng.rayleigh(scale=math.sqrt(lambda2), size=size)
    return float(out) if size is None else out


def write_path_csv(path: SamplePath, filename) -> None:
    header = (
        f"# model={path.model_id}\n# dt={path.dt!r}\n# n={path.n}\n"
        f"# seed={path.seed}\n# replicate={path.replicate}\n# method={path.method}\n"
    )
    data = np.column_stack([path.times, path.values])
    with open(filename, "w", newline="") as fh:
        fh.write(header)
        fh.write("t,x\n")
        np.savetxt(fh, data, delimiter=",", fmt="%.17g")


def read_path_csv(filename) -> SamplePath:
    meta = {}
    with open(filename) as fh:
        for line in fh:
            if not line.startswith("#"):
                if line.strip() != "t,x":
                    raise ValueError(f"{filename}: expected header 't,x', got {line!r}")
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return SamplePath(
        values=data[:, 1],
        dt=float(meta["dt"]),
        seed=int(meta.get("seed", 0)),
        model_id=meta.get("model", "unknown"),
        replicate=int(meta.get("replicate", 0)),
        method=meta.get("method", "file"),
    )
