"""Exact L(n, lam) by bitmask dynamic programming, and the heuristic lower bound.

Up to n = 20 both are available and the heuristic never exceeds the exact
value; beyond that only the heuristic runs, and every path it reports is
re-weighed from the instance before it is returned.
"""
from lightpath import INV_E, exact_L, generate_instance, heuristic_search, min_weight_per_length

inst = generate_instance(14, seed=3)
prof = min_weight_per_length(inst)
print("lambda   exact  heuristic")
# weights have mean n = 14, so at this size the interesting lambdas are a few units
for lam in (0.5, 0.8, 1.0, 1.5, 2.0):
    h = heuristic_search(inst, lam, budget=50_000, seed=1)
    print(f"{lam:6.3f}  {exact_L(inst, lam, prof):5d}  {h.L:9d}")

L = prof.longest_light(1.0)
if L:
    print("lightest", L, "edge path:", prof.witnesses[L].vertices)

big = generate_instance(4096, seed=3)
res = heuristic_search(big, INV_E - 0.1, seed=1)
print(f"n = 4096, lam = 1/e - 0.1: heuristic L = {res.L} after {res.steps} steps")
