"""Overlap structure between two paths, checked exhaustively on small K_n.

For a fixed path g the other paths of the same length split by (theta, |S|),
where S is the set of shared edges and theta the number of runs of g inside
S.  The counts are compared with the combinatorial bound used in the
second-moment computation.
"""
import math

from lightpath import (INV_E, EventSpec, counting_bound_exact, enumerate_overlap_histogram,
                       exhaustive_overlap_check, overlap_profile, second_moment_ratio)

prof = overlap_profile([0, 1, 2, 3, 4, 5], [9, 1, 2, 7, 4, 5])
print("S =", sorted(prof.S), "components =", prof.components, "theta =", prof.i, "|S| =", prof.j)

n, ell, g = 7, 4, (0, 1, 2, 3, 4)
hist = enumerate_overlap_histogram(n, ell, g)
print(f"\nn = {n}, l = {ell}: |A_ij| against the bound")
for (i, j), c in sorted(hist.items()):
    print(f"  i={i} j={j}: {c:5d} <= {counting_bound_exact(n, ell, i, j)}")

print("\nexhaustive suites at n = 6:")
for chk in exhaustive_overlap_check(6):
    print(f"  {chk.name:<18} {'PASS' if chk.passed else 'FAIL'}  ({chk.checked} checks)")

n = 10**6
ln = math.log(n)
spec = EventSpec("F", math.floor(1e-3 * ln ** 3), INV_E - ln ** -2, 0.1 * ln)
print(f"\nsecond-moment ratio at n = 1e6, l = {spec.ell}: {second_moment_ratio(n, spec, 1.0):.3e}")
