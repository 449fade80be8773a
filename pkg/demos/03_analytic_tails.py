"""Gamma tails in log space, the first-moment certificate and the bridge tail.

The log-cdf stays finite far below the smallest double, which is what the
path-count sums need: |Gamma_l| is astronomically large and the matching
probability astronomically small.
"""
import math

from lightpath import (INV_E, atypical_union_bound, bridge_lowertail, first_moment_upper_certificate,
                       gamma_cdf, gamma_log_cdf)

print("P(Gamma(1, 2) <= 1) =", gamma_cdf((1, 2), 1), " vs 1 - 2/e =", 1 - 2 / math.e)
print("ln P(Gamma(1e6, 500) <= 100) =", gamma_log_cdf((1e6, 500), 100.0))

for n in (10**3, 10**6, 10**9):
    certs = [first_moment_upper_certificate(n, lam, 0.01) for lam in (0.2, 0.3, INV_E - 0.02)]
    print(f"n = {n:>10}: L < {certs} at lam = 0.2, 0.3, 1/e - 0.02 (prob >= 0.99)")

# the union bound visits every length, so keep n moderate here
for n in (10**3, 10**5, 10**6):
    print(f"n = {n:>7}: ln P(some path weighs <= l/e - ln n) <= {atypical_union_bound(n):.2f}")

for d in (0.3, 0.6, 1.0, 2.0):
    print(f"P(sup |bridge| <= {d}) = {bridge_lowertail(d):.6f}"
          f"  (small-delta form {bridge_lowertail(d, 'asymptotic'):.6f})")
