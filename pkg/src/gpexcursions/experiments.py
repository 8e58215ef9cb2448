"""Simulation-versus-theory experiments behind the command-line tools.

Each ``run_*`` function synthesizes paths from a :class:`RunConfig`, extracts
the relevant crossing statistics, compares them with the closed forms and
returns a plain ``dict`` report.  Reports contain no timestamps, so equal
configs give byte-identical JSON.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import crossings, successive, theory
from .acf import AcfModel, SpectralMoments, check_conditions, spectral_moments
from .config import RunConfig
from .errors import PreconditionError
from .gp import synthesize_path
from .stats import check_scalar, validate

__all__ = [
    "SCHEMA_VERSION",
    "block_plan",
    "map_blocks",
    "run_rice_rate",
    "run_large_excursion",
    "run_interval_erlang",
    "run_negative_excursion",
    "run_successive",
    "run_window_prob",
    "SINGLE_LEVEL",
]

SCHEMA_VERSION = 1
STREAM_STRIDE = 2**32


def block_plan(cfg: RunConfig):
    """``(n_samples, stream)`` for every block of every replicate."""
    dt = cfg.step
    n_total = int(round(cfg.total_time / dt)) + 1
    n_blocks = max(1, math.ceil((n_total - 1) / (cfg.block_samples - 1)))
    base, extra = divmod(n_total - 1, n_blocks)
    plan = []
    for r in range(cfg.replicates):
        for b in range(n_blocks):
            plan.append((base + (1 if b < extra else 0) + 1, r * STREAM_STRIDE + b))
    return plan


def _apply(model, dt, seed, func, item):
    n, stream = item
    return func(synthesize_path(model, dt, n, seed, stream))


def map_blocks(cfg: RunConfig, model: AcfModel, func):
    """``[func(path) for path in blocks]`` in plan order, optionally in parallel."""
    work = partial(_apply, model, cfg.step, cfg.seed, func)
    plan = block_plan(cfg)
    if cfg.workers > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(work, plan))
    return [work(item) for item in plan]


def _manifest(cfg: RunConfig) -> dict:
    plan = block_plan(cfg)
    return {
        "master_seed": cfg.seed,
        "rng": "numpy Philox via SeedSequence([master_seed, stream])",
        "streams": [s for _, s in plan],
        "block_samples": [n for n, _ in plan],
    }


def _report(cfg, command, checks, extra=None) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": cfg.as_dict(),
        "manifest": _manifest(cfg),
        "checks": [c.as_dict() for c in checks],
        "passed": all(c.passed for c in checks),
    }
    if extra:
        out.update(extra)
    out["_objects"] = checks
    return out


def _require(moments: SpectralMoments, flags, what: str, needed: str):
    ok = {
        "cond_eq2": moments.cond_eq2,
        "cond_eq5_6": moments.cond_eq5_6,
        "cond_eq8_9": moments.cond_eq8_9,
    }[needed]
    if not ok:
        raise PreconditionError(
            f"{what} requires {needed}, which is {ok!r} for this model ({flags.as_dict()})"
        )


def _setup(cfg: RunConfig, what: str, needed: str):
    model = cfg.model()
    moments = spectral_moments(model)
    _require(moments, check_conditions(model), what, needed)
    return model, moments


# per-block extractors; module level so they pickle for worker processes


def _up_lengths(level, path):
    return crossings.excursion_table(path, level).select("up_above").length


def _intervals(level, ks, path):
    return [crossings.crossing_intervals(path, level, "down", k) for k in ks]


def _counts(level, path):
    tab = crossings.crossing_table(path, level)
    ups = int(np.count_nonzero(tab.kinds == crossings.UP))
    return ups, len(tab) - ups, path.duration


def _conditional(pairs, tau1, path):
    return [crossings.conditional_upcrossing_stats(path, g1, g2, tau1) for g1, g2 in pairs]


def run_rice_rate(cfg: RunConfig) -> dict:
    model, moments = _setup(cfg, "rice_rate", "cond_eq2")
    ctx = theory.LevelContext.from_moments(cfg.gamma, moments)
    parts = map_blocks(cfg, model, partial(_counts, cfg.gamma))
    n_up = sum(p[0] for p in parts)
    n_down = sum(p[1] for p in parts)
    duration = sum(p[2] for p in parts)
    total, half = theory.rice_rate(ctx), theory.up_rate(ctx)
    tol = cfg.rate_tolerance
    min_events = cfg.min_events or 0
    checks = [
        check_scalar(f"total crossing rate at {cfg.gamma:g}", (n_up + n_down) / duration, total,
                     tol, relative=True, n_events=n_up + n_down, min_events=min_events),
        check_scalar(f"up-crossing rate at {cfg.gamma:g}", n_up / duration, half, tol,
                     relative=True, n_events=n_up, min_events=min_events),
        check_scalar(f"down-crossing rate at {cfg.gamma:g}", n_down / duration, half, tol,
                     relative=True, n_events=n_down, min_events=min_events),
    ]
    return _report(cfg, "validate-single rice_rate", checks,
                   {"theory": {"rice_rate": total, "up_rate": half, "duration": duration}})


def run_large_excursion(cfg: RunConfig) -> dict:
    model, moments = _setup(cfg, "large_excursion", "cond_eq5_6")
    law = theory.large_excursion_length_law(theory.LevelContext.from_moments(cfg.gamma, moments))
    lengths = np.concatenate(map_blocks(cfg, model, partial(_up_lengths, cfg.gamma)))
    rep = validate(f"excursion lengths above {cfg.gamma:g} vs Rayleigh(scale={law.scale:.6g})",
                   lengths, law, cfg.tolerance or 0.05, cfg.min_events or 2000,
                   grid=np.linspace(0.0, law.quantile(0.999), 201))
    return _report(cfg, "validate-single large_excursion", [rep],
                   {"theory": {"rayleigh_scale": law.scale, "mean": law.mean},
                    "empirical": {"mean": float(lengths.mean()) if lengths.size else None},
                    "_laws": {rep.label: law}})


def run_interval_erlang(cfg: RunConfig) -> dict:
    model, moments = _setup(cfg, "interval_erlang", "cond_eq8_9")
    mu = theory.up_rate(theory.LevelContext.from_moments(cfg.gamma, moments))
    ks = [int(k) for k in cfg.k_values]
    parts = map_blocks(cfg, model, partial(_intervals, cfg.gamma, ks))
    checks, laws = [], {}
    for i, k in enumerate(ks):
        samples = np.concatenate([p[i] for p in parts])
        law = theory.ErlangLaw(k, mu)
        tol = (cfg.tolerance or 0.05) if k == 1 else cfg.erlang_tolerance
        rep = validate(f"down-crossing to {k}-th next at {cfg.gamma:g} vs Erlang(k={k}, mu={mu:.6g})",
                       samples, law, tol, cfg.min_events or 2000,
                       grid=np.linspace(0.0, law.quantile(0.999), 201))
        checks.append(rep)
        laws[rep.label] = law
    return _report(cfg, "validate-single interval_erlang", checks,
                   {"theory": {"mu": mu}, "_laws": laws})


def run_negative_excursion(cfg: RunConfig) -> dict:
    model, moments = _setup(cfg, "negative_excursion", "cond_eq8_9")
    ctx = theory.LevelContext.from_moments(cfg.gamma, moments)
    law = theory.negative_excursion_length_law(ctx, moments)
    lengths = np.concatenate(map_blocks(cfg, model, partial(_up_lengths, cfg.gamma)))
    rep = validate(f"up-excursion lengths above {cfg.gamma:g} vs Exponential(mu={law.rate:.6g})",
                   lengths, law, cfg.tolerance or 0.05, cfg.min_events or 2000,
                   grid=np.linspace(0.0, law.quantile(0.999), 201))
    return _report(cfg, "validate-single negative_excursion", [rep],
                   {"theory": {"mu": law.rate, "mean": law.mean},
                    "empirical": {"mean": float(lengths.mean()) if lengths.size else None},
                    "_laws": {rep.label: law}})


SINGLE_LEVEL = {
    "rice_rate": run_rice_rate,
    "large_excursion": run_large_excursion,
    "interval_erlang": run_interval_erlang,
    "negative_excursion": run_negative_excursion,
}


def _oracle_check(label, closed, oracle, key, sigmas):
    est, se = oracle.estimates[key], oracle.std_errors[key]
    return check_scalar(f"{label} [oracle {key}, {sigmas:g} SE]", est, closed,
                        sigmas * se + 1e-12, n_events=oracle.n_conditioned)


def run_successive(cfg: RunConfig) -> dict:
    """Conditional up-crossing means over a level grid and the law of ``T2``."""
    if cfg.gamma2 < cfg.gamma1:
        raise PreconditionError("gamma2 must be >= gamma1")
    model, moments = _setup(cfg, "validate-successive", "cond_eq5_6")
    lam2 = moments.lambda2
    min_events = cfg.min_events or 1000

    pairs = [(cfg.gamma1, cfg.gamma1 + dg) for dg in cfg.delta_gammas]
    pairs += [(g1, g1 + cfg.fixed_delta_gamma) for g1 in cfg.gamma1_grid]
    pairs.append((cfg.gamma1, cfg.gamma2))
    parts = map_blocks(cfg, model, partial(_conditional, pairs, cfg.tau1))
    pooled = [crossings.ConditionalStats.pool(p[i] for p in parts) for i in range(len(pairs))]

    checks, curve = [], []
    for i, (g1, g2) in enumerate(pairs[:-1]):
        spec = successive.TwoLevelSpec(g1, g2, lam2, cfg.tau1)
        closed = successive.mean_upcrossings_conditional(spec)
        stats_ = pooled[i]
        checks.append(check_scalar(
            f"E U(gamma2={g2:g} | gamma1={g1:g}, tau1={cfg.tau1:g})",
            stats_.mean_upcrossings, closed, cfg.mean_tolerance,
            n_events=stats_.n_excursions, min_events=min_events))
        oracle = successive.parabola_mc_oracle(spec, cfg.oracle_samples, cfg.seed + i)
        checks.append(_oracle_check(f"E U(gamma2={g2:g} | gamma1={g1:g})", closed, oracle,
                                    "p_upcross", cfg.oracle_sigmas))
        curve.append({"gamma1": g1, "gamma2": g2, "closed_form": closed,
                      "simulation": stats_.mean_upcrossings, "n_excursions": stats_.n_excursions,
                      "oracle": oracle.estimates["p_upcross"],
                      "oracle_se": oracle.std_errors["p_upcross"]})

    spec = successive.TwoLevelSpec(cfg.gamma1, cfg.gamma2, lam2, cfg.tau1)
    stats_ = pooled[-1]
    atom = successive.t2_mass_at_zero(spec)
    checks.append(check_scalar(
        f"P(T2 = 0) at gamma1={cfg.gamma1:g}, gamma2={cfg.gamma2:g}", stats_.atom_fraction, atom,
        cfg.atom_tolerance, n_events=stats_.n_excursions, min_events=min_events))
    positive = stats_.t2_samples[stats_.t2_samples > 0]
    law = successive.T2PositiveLaw(spec)
    rep = validate(f"T2 | T2 > 0 at gamma1={cfg.gamma1:g}, gamma2={cfg.gamma2:g}", positive, law,
                   cfg.t2_tolerance, min_events, grid=np.linspace(0.0, float(law.quantile(0.999)), 201))
    checks.append(rep)
    oracle = successive.parabola_mc_oracle(spec, cfg.oracle_samples, cfg.seed + len(pairs))
    checks.append(_oracle_check("P(T2 = 0)", atom, oracle, "t2_mass_at_zero", cfg.oracle_sigmas))
    return _report(cfg, "validate-successive", checks, {
        "curve": curve,
        "t2": {"closed_form_atom": atom, "simulation_atom": stats_.atom_fraction,
               "oracle_atom": oracle.estimates["t2_mass_at_zero"],
               "n_excursions": stats_.n_excursions, "n_positive": int(positive.size)},
        "_laws": {rep.label: law},
    })


def run_window_prob(cfg: RunConfig) -> dict:
    """Closed-form window probability with its Monte Carlo cross-check."""
    model = cfg.model()
    moments = spectral_moments(model)
    _require(moments, check_conditions(model), "window-prob", "cond_eq2")
    spec = successive.TwoLevelSpec(cfg.gamma1, cfg.gamma2, moments.lambda2, cfg.tau1, cfg.tau2)
    eu = theory.up_rate(theory.LevelContext.from_moments(cfg.gamma1, moments))
    oracle = successive.parabola_mc_oracle(spec, cfg.oracle_samples, cfg.seed, up_rate_gamma1=eu)
    record = successive.export_json(spec, eu, oracle)
    p = record["outputs"]["window_probability"]
    record["outputs"]["expected_total_time"] = p * cfg.total_time
    record["outputs"]["window_length"] = cfg.total_time
    checks = [_oracle_check(f"window probability (case {record['outputs']['case']})", p,
                            oracle, "window_probability", cfg.oracle_sigmas)]
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": "window-prob",
        "config": cfg.as_dict(),
        "manifest": {"master_seed": cfg.seed, "oracle_stream": [cfg.seed]},
        **record,
        "checks": [c.as_dict() for c in checks],
        "passed": all(c.passed for c in checks),
        "_objects": checks,
    }
    return out
