"""Acceptance criteria for the package, one test per criterion.

Each test logs a single ``criterion N: PASS|FAIL ...`` line (collected in the
terminal summary) and then asserts the same verdict.  Tolerances, levels and
run lengths are fixed here and are not tuned to the outcome.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate

from gpexcursions import LevelContext, RunConfig, TwoLevelSpec, experiments, up_rate
from gpexcursions import successive as S
from gpexcursions import theory
from gpexcursions.cli import main
from gpexcursions.stats import ScalarCheck

LAM2 = 0.25  # squared-exponential ACF with d_c = 2
LONG = 1.0e6  # simulated time units for the distribution-level criteria


def _summary(checks):
    return "; ".join(
        f"KS={c.ks_distance:.4f}<= {c.tolerance} n={c.n_events}" if hasattr(c, "ks_distance")
        else f"|err|={c.error:.4g}<= {c.tolerance:.3g} n={c.n_events}"
        for c in checks
    )


def test_acceptance_rice_rate(acceptance_log):
    cfg = RunConfig(gamma=1.0, dt=0.05, total_time=2.0e5, seed=0)
    t0 = time.perf_counter()
    rep = experiments.run_rice_rate(cfg)
    elapsed = time.perf_counter() - t0
    checks = rep["_objects"]
    ok = rep["passed"] and elapsed < 60.0
    total = checks[0]
    acceptance_log(
        1, ok,
        f"crossing rate at gamma=1: total {total.observed:.6f} vs {total.expected:.6f}, "
        f"up {checks[1].observed:.6f} / down {checks[2].observed:.6f} vs {checks[1].expected:.6f} "
        f"(rel tol 0.05), {elapsed:.1f}s (< 60s)",
    )
    assert ok


def test_acceptance_large_excursions(acceptance_log):
    rep = experiments.run_large_excursion(RunConfig(gamma=2.5, total_time=LONG, seed=0))
    (c,) = rep["_objects"]
    ok = acceptance_log(
        2, rep["passed"],
        f"excursion lengths above 2.5 vs Rayleigh(1.6): {_summary([c])} (min 2000); "
        f"mean {rep['empirical']['mean']:.4f} vs {rep['theory']['mean']:.4f}",
    )
    assert ok


def test_acceptance_crossing_intervals(acceptance_log):
    rep = experiments.run_interval_erlang(RunConfig(gamma=-1.0, total_time=LONG, seed=0))
    checks = rep["_objects"]
    ok = acceptance_log(
        3, rep["passed"],
        f"down-to-down intervals at -1, mu={rep['theory']['mu']:.7f}, k=1,2,3: "
        f"{_summary(checks)}",
    )
    assert ok


def test_acceptance_negative_excursions(acceptance_log):
    rep = experiments.run_negative_excursion(RunConfig(gamma=-1.0, total_time=LONG, seed=0))
    (c,) = rep["_objects"]
    ok = acceptance_log(
        4, rep["passed"],
        f"up-excursion lengths above -1 vs exponential(mu={rep['theory']['mu']:.7f}): "
        f"{_summary([c])}; mean {rep['empirical']['mean']:.3f} vs {rep['theory']['mean']:.3f}",
    )
    assert ok


@pytest.fixture(scope="module")
def successive_report():
    cfg = RunConfig(gamma1=2.5, gamma2=2.7, total_time=LONG, seed=0,
                    delta_gammas=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    return experiments.run_successive(cfg)


def test_acceptance_conditional_upcrossing_means(acceptance_log, successive_report):
    sims = [c for c in successive_report["_objects"]
            if isinstance(c, ScalarCheck) and c.label.startswith("E U") and "oracle" not in c.label]
    assert len(sims) == 6
    ok = all(c.passed for c in sims)
    pts = ", ".join(f"{c.observed:.3f}/{c.expected:.3f}" for c in sims)
    worst = max(c.error for c in sims)
    acceptance_log(
        5, ok,
        f"E U given 2.5 over delta 0..0.5 (sim/closed): {pts}; max |err| {worst:.4f} <= 0.05, "
        f"min n {min(c.n_events for c in sims)} (>= 1000)",
    )
    assert ok


def test_acceptance_t2_atom_and_positive_part(acceptance_log, successive_report):
    objs = successive_report["_objects"]
    atom = next(c for c in objs if c.label.startswith("P(T2 = 0) at"))
    ks = next(c for c in objs if c.label.startswith("T2 | T2 > 0"))
    ok = atom.passed and ks.passed
    acceptance_log(
        6, ok,
        f"T2 atom {atom.observed:.4f} vs {atom.expected:.5f} (+-0.03) "
        f"[{'pass' if atom.passed else 'fail'}]; positive part KS {ks.ks_distance:.4f} <= 0.07 "
        f"n={ks.n_events} [{'pass' if ks.passed else 'fail'}]",
    )
    assert ok


def _random_specs(n, seed):
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(n):
        g1, dg = rng.uniform(2.0, 4.0), rng.uniform(0.0, 0.5)
        hi = 2.0 * math.sqrt(8.0 * dg / (g1 * LAM2)) + 1.0
        specs.append(TwoLevelSpec(g1, g1 + dg, LAM2, rng.uniform(0, hi), rng.uniform(0, hi)))
    return specs


def _survival(spec, tau):
    # written out independently of the module
    V = spec.gamma1**2 * spec.lambda2 / 8.0
    t1s2 = 8.0 * (spec.gamma2 - spec.gamma1) / (spec.gamma1 * spec.lambda2)
    return math.exp(-V * (max(tau * tau + t1s2, spec.tau1**2) - spec.tau1**2))


def _expected_t2_quadrature(spec):
    t1s2 = 8.0 * (spec.gamma2 - spec.gamma1) / (spec.gamma1 * spec.lambda2)
    cuts = [spec.tau2]
    if spec.tau1**2 > t1s2 and math.sqrt(spec.tau1**2 - t1s2) > spec.tau2:
        cuts.append(math.sqrt(spec.tau1**2 - t1s2))
    cuts.append(np.inf)
    tail = sum(integrate.quad(lambda t: _survival(spec, t), a, b, epsabs=0, epsrel=1e-13,
                              limit=200)[0] for a, b in zip(cuts[:-1], cuts[1:]))
    p = 1.0 if spec.tau2 == 0 else _survival(spec, spec.tau2)
    return spec.tau2 + tail / p


def test_acceptance_oracle_equivalence(acceptance_log):
    worst_z, n_cmp, fails, quad_err = 0.0, 0, [], 0.0
    for i, spec in enumerate(_random_specs(20, 20260101)):
        eu = up_rate(LevelContext(spec.gamma1, LAM2))
        o = S.parabola_mc_oracle(spec, 10**6, 1000 + i, up_rate_gamma1=eu)
        closed = {
            "p_upcross": S.mean_upcrossings_conditional(spec),
            "t2_mass_at_zero": S.t2_mass_at_zero(spec),
            "p_t2_at_least": S.t2_at_least(spec),
            "p_t2_gt_tau2": S.t2_survival(spec, spec.tau2),
            "window_probability": S.window_probability(spec, eu),
        }
        if closed["p_t2_at_least"] > 0:
            closed["mean_t2_conditional"] = S.expected_t2_conditional(spec)
            rel = abs(closed["mean_t2_conditional"] / _expected_t2_quadrature(spec) - 1.0)
            quad_err = max(quad_err, rel)
        for key, value in closed.items():
            est, se = o.estimates[key], o.std_errors[key]
            n_cmp += 1
            if est is None or abs(est - value) > 3.0 * se + 1e-12:
                fails.append(f"spec {i} {key}")
            elif se > 0:
                worst_z = max(worst_z, abs(est - value) / se)
    ok = not fails and quad_err <= 1e-8
    acceptance_log(
        7, ok,
        f"20 random specs, {n_cmp} closed-form vs 10^6-draw oracle comparisons, "
        f"max |z| {worst_z:.2f} (<= 3), {len(fails)} outside 3 SE {fails[:3]}; "
        f"expected_t2_conditional vs quadrature max rel err {quad_err:.2e} (<= 1e-8)",
    )
    assert ok


def test_acceptance_algebraic_invariants(acceptance_log):
    rng = np.random.default_rng(8)
    norm_err = ident_err = 0.0
    for _ in range(1000):
        g1 = rng.uniform(0.5, 5.0)
        spec = TwoLevelSpec(g1, g1 + rng.uniform(0, 2), rng.uniform(0.05, 2), rng.uniform(0, 6))
        norm_err = max(norm_err, abs(S.t2_survival(spec, 0.0) + S.t2_mass_at_zero(spec) - 1))
        if spec.gamma2 > spec.gamma1:
            target = spec.gamma1 * (spec.gamma2 - spec.gamma1)
            ident_err = max(ident_err, abs(spec.V * spec.tau1_star**2 / target - 1))

    cont_err = 0.0
    for g1, g2 in [(2.5, 2.7), (2.0, 2.5), (3.5, 3.6), (4.0, 4.4)]:
        eu = up_rate(LevelContext(g1, LAM2))
        t1s = TwoLevelSpec(g1, g2, LAM2).tau1_star

        def P(t1, t2):
            return S.window_probability(TwoLevelSpec(g1, g2, LAM2, t1, t2), eu)

        pairs = [(P(t1, 0.0), P(t1, 1e-13)) for t1 in (0.0, 0.5 * t1s, t1s)]  # 1 <-> 2
        t1 = 1.5 * t1s
        t2s = math.sqrt(t1**2 - t1s**2)
        pairs.append((P(t1, t2s), P(t1, t2s * (1 - 1e-14))))  # 3 <-> 4
        pairs.append((P(t1s, 0.7), P(t1s * (1 + 1e-14), 0.7)))  # 2 <-> 3
        cont_err = max(cont_err, max(abs(a - b) / a for a, b in pairs))

    fk_err = 0.0
    for k in (1, 2, 3):
        f = lambda t, k=k: theory.erlang_interval_law(k, t)[1]  # noqa: E731
        mass = integrate.quad(f, 0, np.inf, epsabs=1e-13, epsrel=1e-13)[0]
        mean = integrate.quad(lambda t: t * f(t), 0, np.inf, epsabs=1e-13, epsrel=1e-13)[0]
        fk_err = max(fk_err, abs(mass - 1), abs(mean - k))

    ok = norm_err <= 1e-12 and ident_err <= 1e-12 and cont_err <= 1e-10 and fk_err <= 1e-8
    acceptance_log(
        8, ok,
        f"T2 normalization {norm_err:.1e} (<= 1e-12), V tau1*^2 identity {ident_err:.1e} "
        f"(<= 1e-12), case continuity {cont_err:.1e} (<= 1e-10), f_k mass/mean {fk_err:.1e} "
        f"(<= 1e-8)",
    )
    assert ok


def test_acceptance_determinism(acceptance_log, tmp_path):
    commands = {
        "rice_rate_report.json": ["validate-single", "--which", "rice_rate", "--gamma", "1",
                                  "--dt", "0.05", "--total-time", "2e5"],
        "window_prob.json": ["window-prob", "--tau1", "3", "--tau2", "1"],
        "successive_report.json": ["validate-successive", "--total-time", "1e5",
                                   "--oracle-samples", "100000"],
    }
    identical = []
    for name, args in commands.items():
        blobs = []
        for run in ("a", "b"):
            out = tmp_path / run / name
            main(args + ["--seed", "123", "--out", str(out)])
            blobs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        identical.append(blobs[0] == blobs[1] and name in blobs[0])
    ok = all(identical)
    acceptance_log(
        9, ok,
        "repeat runs with seed 123 give byte-identical output directories: "
        + ", ".join(f"{args[0]}={'same' if same else 'DIFFERENT'}"
                    for args, same in zip(commands.values(), identical)),
    )
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
