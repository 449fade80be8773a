"""Exhaustive small-n suites behind the ``verify`` command.

Each suite returns :class:`~lightpath.overlap.OverlapCheck` rows: a name, a
pass flag, the number of items checked and the first counterexample.
"""
from __future__ import annotations

import numpy as np

from . import rng
from .model import Path, generate_instance, path_weight
from .overlap import OverlapCheck, exhaustive_overlap_check
from .solvers import enumerate_min_weights, min_weight_per_length, split_witness

SOLVER_MAX_N = 9
INSTANCES_PER_N = 10
RANDOM_PATHS = 200


def overlap_suites(max_n: int) -> list[OverlapCheck]:
    """Overlap identities and counting bounds for every n in [2, max_n], merged by suite."""
    merged: dict[str, OverlapCheck] = {}
    for n in range(2, max_n + 1):
        for c in exhaustive_overlap_check(n):
            m = merged.setdefault(c.name, OverlapCheck(c.name))
            m.checked += c.checked
            if not c.passed:
                m.fail((n,) + tuple(c.counterexample))
    return list(merged.values())


def solver_suites(max_n: int, instances: int = INSTANCES_PER_N, seed: int = 0) -> list[OverlapCheck]:
    """DP minima against enumeration, witness weights, coarse monotonicity, split pieces."""
    dp_vs_enum = OverlapCheck("dp_vs_enumeration")
    witness = OverlapCheck("witness_weight")
    coarse = OverlapCheck("coarse_monotonicity")
    split = OverlapCheck("split_witness")
    for n in range(3, min(max_n, SOLVER_MAX_N) + 1):
        for t in range(instances):
            inst = generate_instance(n, seed=rng.mix(seed, n, t))
            prof = min_weight_per_length(inst)
            m = prof.min_total_weight
            ref = enumerate_min_weights(inst)
            dp_vs_enum.checked += 1
            if not np.allclose(m[1:], ref[1:], rtol=1e-12, atol=0):
                dp_vs_enum.fail((n, inst.seed))
            for ell, p in prof.witnesses.items():
                witness.checked += 1
                if p.length != ell or not np.isclose(path_weight(inst, p), m[ell], rtol=1e-12):
                    witness.fail((n, inst.seed, p.vertices))
            avg = m[1:] / np.arange(1, n)
            for L in range(1, n):
                for ell in range(1, L + 1):
                    coarse.checked += 1
                    window = avg[ell - 1:min(2 * ell, n) - 1]
                    if window.min() > avg[L - 1] * (1 + 1e-12):
                        coarse.fail((n, inst.seed, ell, L))
            gen = rng.generator(seed, n, t, 1)
            for _ in range(RANDOM_PATHS // instances + 1):
                L = int(gen.integers(1, n))
                p = Path(gen.permutation(n)[:L + 1])
                ell = int(gen.integers(1, L + 1))
                piece = split_witness(inst, p, ell)
                split.checked += 1
                text = " ".join(map(str, p.vertices))
                ok = (ell <= piece.length < 2 * ell
                      and f" {' '.join(map(str, piece.vertices))} " in f" {text} "
                      and path_weight(inst, piece) / piece.length
                      <= path_weight(inst, p) / L * (1 + 1e-12))
                if not ok:
                    split.fail((n, inst.seed, p.vertices, ell))
    return [dp_vs_enum, witness, coarse, split]


def run_all(max_n: int = 7, seed: int = 0) -> list[OverlapCheck]:
    return overlap_suites(max_n) + solver_suites(max_n, seed=seed)
