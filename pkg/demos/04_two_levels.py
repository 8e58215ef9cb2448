"""Two successive levels g1 <= g2.

Inside a g1 excursion the path is nearly a parabola, so the chance of also
crossing g2 is exp(-g1 (g2 - g1)), the time above g2 has an atom at zero, and
the long-run fraction of time spent in nested excursions has a closed form.
Simulation, closed forms and a Monte Carlo over the parabola model are
compared side by side.
"""
import numpy as np

from gpexcursions import AcfModel, LevelContext, TwoLevelSpec, spectral_moments
from gpexcursions import conditional_upcrossing_stats, parabola_mc_oracle, synthesize_blocks
from gpexcursions import successive as S
from gpexcursions import up_rate
from gpexcursions.crossings import ConditionalStats

model = AcfModel.squared_exponential(2.0)
lam2 = spectral_moments(model).lambda2
paths = list(synthesize_blocks(model, dt=0.1, total_time=1e6, seed=11))
g1 = 2.5

## Mean number of g2 up-crossings per g1 excursion
print(" g2    simulation  closed form  parabola MC")
for dg in np.arange(0.0, 0.51, 0.1):
    spec = TwoLevelSpec(g1, g1 + dg, lam2)
    sim = ConditionalStats.pool(conditional_upcrossing_stats(p, g1, g1 + dg) for p in paths)
    mc = parabola_mc_oracle(spec, 10**5, seed=0).estimates["p_upcross"]
    print(f"{g1 + dg:4.1f}  {sim.mean_upcrossings:10.4f}  "
          f"{S.mean_upcrossings_conditional(spec):11.4f}  {mc:11.4f}")

## Time above g2 = 2.7: the atom at zero
spec = TwoLevelSpec(g1, 2.7, lam2)
sim = ConditionalStats.pool(conditional_upcrossing_stats(p, g1, 2.7) for p in paths)
print(f"P(T2 = 0): simulation {sim.atom_fraction:.4f}, closed form {S.t2_mass_at_zero(spec):.4f}")

## Fraction of time in a g2 excursion of length >= tau2 inside a g1 excursion >= tau1
eu = up_rate(LevelContext(g1, lam2))
for tau1, tau2 in [(0.0, 0.0), (0.0, 1.0), (3.0, 0.0), (3.0, 3.0)]:
    spec = TwoLevelSpec(g1, 2.7, lam2, tau1, tau2)
    mc = parabola_mc_oracle(spec, 10**6, seed=1, up_rate_gamma1=eu)
    print(f"tau1={tau1} tau2={tau2}: case {S.window_case(spec)}, "
          f"P = {S.window_probability(spec, eu):.6e}, parabola MC "
          f"{mc.estimates['window_probability']:.6e} +/- {mc.std_errors['window_probability']:.1e}")
