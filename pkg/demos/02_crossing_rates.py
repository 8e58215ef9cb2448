"""Counting level crossings and comparing with the Rice rate.

For unit variance the mean number of crossings of level g per unit time is
sqrt(lambda2) exp(-g^2/2) / pi, shared equally between up- and
down-crossings.
"""
import numpy as np

from gpexcursions import (
    AcfModel,
    LevelContext,
    pooled_rates,
    rice_rate,
    spectral_moments,
    synthesize_blocks,
    up_rate,
)

model = AcfModel.squared_exponential(2.0)
mom = spectral_moments(model)
paths = list(synthesize_blocks(model, dt=0.05, total_time=2e5, seed=1))

print(" level   total(sim)  total(Rice)   up(sim)    down(sim)   half Rice")
for g in (-2.0, -1.0, 0.0, 1.0, 2.0):
    r = pooled_rates(paths, g)
    ctx = LevelContext.from_moments(g, mom)
    print(f"{g:6.1f}   {r.total_rate:.6f}   {rice_rate(ctx):.6f}    "
          f"{r.up_rate:.6f}   {r.down_rate:.6f}   {up_rate(ctx):.6f}")

## A rough model has no finite rate: refining dt keeps adding crossings
rough = AcfModel.exponential(2.0)
for dt in (0.1, 0.01, 0.001):
    p = next(synthesize_blocks(rough, dt, 1000.0, seed=3))
    print(f"exponential ACF, dt={dt:<6g} crossings of 0 per unit time: "
          f"{pooled_rates([p], 0.0).total_rate:8.2f}")
