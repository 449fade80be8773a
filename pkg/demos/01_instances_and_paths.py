"""Seeded instances of K_n and the statistics of a path through them.

Weights are recomputed from (seed, u, v), so a large instance costs nothing
until its edges are read, and two runs with the same seed agree bit for bit.
"""
from lightpath import generate_instance, path_stats

inst = generate_instance(10, seed=42)
print("header:", inst.to_json())
print("W[0, 1] =", inst.weight(0, 1), "(mean-n exponential, here n = 10)")

path = [0, 3, 7, 2, 9]
st = path_stats(inst, path)
print(f"path {path}: total {st.total_weight:.3f}, average {st.total_weight / (len(path) - 1):.3f}, "
      f"deviation {st.deviation:.3f}")

big = generate_instance(100_000, seed=1)
print("a sparse instance with n = 100000, weight(5, 99999) =", big.weight(5, 99_999))
