"""How often a conditioned exponential walk stays close to its chord.

p_s is the probability that s exponentials conditioned on their sum keep
every partial sum within r of the straight line.  It decays exponentially
in s / r^2; plain sampling runs out of hits quickly, so the default
estimator splits the walk into steps and resamples the survivors.
"""
from lightpath import (ConditionedSequenceSpec, check_superadditivity, estimate_p,
                       fit_deviation_rate)

spec = ConditionedSequenceSpec(64)
for method in ("naive", "splitting"):
    est = estimate_p(spec, r=2.0, reps=100_000, seed=3, method=method)
    print(f"p_64 at r = 2 ({method:>9}): {est.p_hat:.3e} +/- {est.std_err:.1e}")

fit = fit_deviation_rate(1.0, 2.0, [16, 32, 64, 128, 256], reps=100_000, seed=0)
print(f"\n-ln p vs s/r^2: slope {fit.slope:.3f}, 95% CI ({fit.slope_ci[0]:.3f}, {fit.slope_ci[1]:.3f})")
for p in fit.points:
    print(f"  s = {p.s:3d}: p = {p.p_hat:.3e}, rate {p.rate:.3f}")

rep = check_superadditivity(16, 64, rho=0.5, r=2.0, reps=100_000, seed=1)
print(f"\np_80 against p_16 p_64 / (1e8 r sqrt 16): {rep.verdict}")
