"""Excursion lengths against their asymptotic laws.

* above a high level g: Rayleigh with scale 2 / (g sqrt(lambda2))
* between a down-crossing and the k-th next one: Erlang(k, mu), mu the
  up-crossing rate
* above a low level -g: exponential(mu)

These laws are limits as |g| grows.  By ergodicity the mean excursion length
above g is exactly P(X > g) / mu, so at moderate levels one can read off how
far the limit still is; the last column shows this.
"""
import numpy as np
from scipy.stats import norm

from gpexcursions import EmpiricalDistribution, ks_statistic, synthesize_blocks
from gpexcursions import AcfModel, LevelContext, spectral_moments
from gpexcursions import crossings, theory

model = AcfModel.squared_exponential(2.0)
mom = spectral_moments(model)
paths = list(synthesize_blocks(model, dt=0.1, total_time=1e6, seed=7))


def lengths_above(level):
    return np.concatenate(
        [crossings.excursion_table(p, level).select("up_above").length for p in paths])


print(" level  law                 n      KS     mean(sim)  mean(law)  P(X>g)/mu")
for g in (2.0, 2.5, 3.0):
    x = lengths_above(g)
    ctx = LevelContext.from_moments(g, mom)
    law = theory.large_excursion_length_law(ctx)
    print(f"{g:6.1f}  Rayleigh({law.scale:.3f})  {x.size:6d}  "
          f"{ks_statistic(EmpiricalDistribution(x), law):.4f}  {x.mean():9.4f}  "
          f"{law.mean:9.4f}  {norm.sf(g) / theory.up_rate(ctx):9.4f}")

for g in (-1.0, -2.0):
    x = lengths_above(g)
    ctx = LevelContext.from_moments(g, mom)
    law = theory.negative_excursion_length_law(ctx, mom)
    print(f"{g:6.1f}  Exponential({law.rate:.4f})  {x.size:6d}  "
          f"{ks_statistic(EmpiricalDistribution(x), law):.4f}  {x.mean():9.3f}  "
          f"{law.mean:9.3f}  {norm.sf(g) / law.rate:9.3f}")

## Down-crossing to k-th next down-crossing
for g in (2.5, -1.0):
    mu = theory.up_rate(LevelContext.from_moments(g, mom))
    for k in (1, 2, 3):
        t = np.concatenate([crossings.crossing_intervals(p, g, "down", k) for p in paths])
        d = ks_statistic(EmpiricalDistribution(t), theory.ErlangLaw(k, mu))
        print(f"level {g:5.1f}  k={k}  n={t.size:6d}  KS vs Erlang = {d:.4f}")
