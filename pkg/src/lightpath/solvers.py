"""Exact and heuristic solvers for the longest light path.

L(n, lam) is the largest l such that some simple path with l edges has total
weight at most lam * l.  The exact route fixes l, computes the minimum total
weight over all l-edge paths, and reads L off that profile.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np

from . import rng
from .errors import CapacityExceeded, InvalidArgument
from .model import Instance, Path, as_path, edge_weights, path_weight

EXACT_CAP = 20


@dataclass
class MinWeightProfile:
    """Minimum total weight per path length.

    ``min_total_weight[l]`` is the minimum of X over all l-edge paths for
    l = 1..l_max (entry 0 is NaN so lengths index directly);
    ``witnesses[l]`` attains it and is the lexicographically smallest vertex
    sequence among optimal paths.
    """

    min_total_weight: np.ndarray
    witnesses: dict[int, Path] = field(default_factory=dict)

    @property
    def ell_max(self) -> int:
        return len(self.min_total_weight) - 1

    def longest_light(self, lam: float) -> int:
        """max{l : min_total_weight[l] <= lam * l}, or 0 if there is none."""
        m = self.min_total_weight[1:]
        ok = np.nonzero(m <= lam * np.arange(1, len(m) + 1))[0]
        return int(ok[-1] + 1) if len(ok) else 0


def _popcounts(bits: int) -> np.ndarray:
    pc = np.zeros(1 << bits, dtype=np.uint8)
    for b in range(bits):
        pc[1 << b:2 << b] = pc[:1 << b] + 1
    return pc


def min_weight_per_length(inst: Instance, ell_max: int | None = None,
                          witnesses: bool = True, cap: int = EXACT_CAP) -> MinWeightProfile:
    """Exact minima by dynamic programming over (vertex subset, last vertex).

    ``dp[mask, v]`` is the least weight of a simple path that visits exactly
    the vertices of ``mask`` and ends at ``v``.  Subsets are processed in
    order of size; O(2^n n^2) time and O(2^n n) memory.
    """
    n = inst.n
    if n > cap:
        raise CapacityExceeded(f"n={n} is above the exact-solver cap {cap}; use heuristic_L")
    if ell_max is None:
        ell_max = n - 1
    if not 1 <= ell_max <= n - 1:
        raise InvalidArgument(f"need 1 <= ell_max <= n-1, got {ell_max}")
    W = np.asarray(inst.weights)
    pc = _popcounts(n)
    layers = [np.nonzero(pc == c)[0] for c in range(n + 1)]
    dp = np.full((1 << n, n), np.inf)
    dp[1 << np.arange(n), np.arange(n)] = 0.0
    best = np.full(ell_max + 1, np.nan)
    for c in range(1, ell_max + 1):
        masks = layers[c]
        for u in range(n):
            src = masks[(masks >> u) & 1 == 0]
            dp[src | (1 << u), u] = (dp[src] + W[:, u]).min(axis=1)
        best[c] = dp[layers[c + 1]].min()
    prof = MinWeightProfile(best)
    if witnesses:
        for ell in range(1, ell_max + 1):
            prof.witnesses[ell] = _lexmin_witness(dp, layers, W, ell, best[ell])
    return prof


def _lexmin_witness(dp, layers, W, ell, opt) -> Path:
    # dp[mask, v] also bounds paths *starting* at v (reverse them), so a
    # prefix can be grown greedily, smallest feasible vertex first.
    tol = 1e-9 * (1.0 + abs(opt))
    masks = layers[ell + 1]
    first = np.nonzero((dp[masks] <= opt + tol).any(axis=0))[0]
    seq = [int(first[0])]
    used = 1 << seq[0]
    budget = opt
    for k in range(1, ell + 1):
        masks = layers[ell + 1 - k]
        masks = masks[(masks & used) == 0]
        step = W[seq[-1]]
        ok = (dp[masks] + step <= budget + tol).any(axis=0)
        ok[seq] = False
        y = int(np.nonzero(ok)[0][0])
        budget -= step[y]
        seq.append(y)
        used |= 1 << y
    return Path(seq)


def exact_L(inst: Instance, lam: float, profile: MinWeightProfile | None = None) -> int:
    """Exact L(n, lam); 0 when no single edge is light enough."""
    if profile is None:
        profile = min_weight_per_length(inst, witnesses=False)
    return profile.longest_light(lam)


def split_witness(inst: Instance, path: Path | Sequence[int], ell: int) -> Path:
    """A piece of ``path`` with length in [ell, 2 ell) and no larger average weight.

    The path is cut into consecutive pieces, all of length ``ell`` except one
    that also absorbs the remainder.  Every placement of the long piece is
    tried and the piece with least average weight is returned (earliest
    start, then shortest, on ties).
    """
    p = as_path(path)
    L = p.length
    if not 1 <= ell <= L:
        raise InvalidArgument(f"need 1 <= ell <= path length {L}, got {ell}")
    x = edge_weights(inst, p)
    s = np.concatenate([[0.0], np.cumsum(x)])
    q, rem = divmod(L, ell)
    pieces = set()
    for long_at in range(q):
        start = 0
        for i in range(q):
            size = ell + rem if i == long_at else ell
            pieces.add((start, size))
            start += size
    best = min(pieces, key=lambda ps: ((s[ps[0] + ps[1]] - s[ps[0]]) / ps[1], ps[0], ps[1]))
    a, size = best
    return Path(p.vertices[a:a + size + 1])


# -- heuristic ----------------------------------------------------------------
#
# Phase 1 (beam): every directed edge among each vertex's K lightest
# neighbours seeds a path; paths are grown at their tail, keeping at each
# depth the `width` lightest.  The lightest path at depth d approximates the
# minimum weight over d-edge paths, and any depth where it is <= lam*d is a
# feasible length.  The beam stops when its half of the budget is spent or
# after max(10, d/2) depths with no new feasible length.
#
# Phase 2 (local search) spends the rest of the budget on a feasible path,
# one move per step:
#   extend  - append the lightest vertex not on the path at either end,
#             if the result is still light; always tried first;
#   reverse - Posa rotation: for an end v0 and a candidate neighbour v_i on
#             the path, reverse v0..v_{i-1} so v_{i-1} becomes the end;
#   eject   - drop an end vertex whose edge is heavier than lam, or an
#             interior vertex when bridging its neighbours lowers the excess;
#   restart - after `RESTART_AFTER` steps without a longer path, move to the
#             next elite path from the beam, then to a random light edge;
#             after `MAX_RANDOM_RESTARTS` random restarts the search stops
#             even if budget remains.
# When extend fails the other move is picked with probabilities
# reverse 0.6 / eject 0.4 from the seeded stream.

CANDIDATES = 6
RESTART_AFTER = 64
MAX_RANDOM_RESTARTS = 16
DEFAULT_BUDGET = 1_000_000


@dataclass
class HeuristicResult:
    L: int
    witness: Path | None
    steps: int


def _beam(inst, lam, nbr, nw, width, budget):
    n, K = nbr.shape
    P = np.stack([np.repeat(np.arange(n), K), nbr.ravel()], axis=1)
    c = nw.ravel().copy()
    elites: list[np.ndarray] = []
    best_depth = 0
    steps = 0
    depth = 1
    while True:
        if len(c) > width:
            keep = np.argpartition(c, width - 1)[:width]
            keep = keep[np.lexsort((keep, c[keep]))]
            P, c = P[keep], c[keep]
        i = int(np.argmin(c))
        if c[i] <= lam * depth:
            best_depth = depth
            elites.append(P[i].copy())
        if depth - best_depth > max(10, depth // 2) or depth >= n - 1:
            break
        if steps + len(c) * K > budget:
            break
        steps += len(c) * K
        last = P[:, -1]
        ch = nbr[last]
        cw = c[:, None] + nw[last]
        cw[(P[:, :, None] == ch[:, None, :]).any(axis=1)] = np.inf
        pi, ki = np.nonzero(np.isfinite(cw))
        if len(pi) == 0:
            break
        P = np.concatenate([P[pi], ch[pi, ki][:, None]], axis=1)
        c = cw[pi, ki]
        depth += 1
    return elites[::-1], steps


class _LocalSearch:
    def __init__(self, inst, lam, nbr, gen):
        self.inst, self.lam, self.nbr, self.gen = inst, lam, nbr, gen
        self.on = np.zeros(inst.n, dtype=bool)
        self.path: list[int] = []
        self.cost = 0.0

    def load(self, vertices):
        self.on[:] = False
        self.path = [int(v) for v in vertices]
        self.on[self.path] = True
        self.cost = path_weight(self.inst, self.path)

    def w(self, u, v):
        return self.inst.weight(u, v)

    def light(self, cost, length):
        return cost <= self.lam * length

    def extend(self) -> bool:
        best = None
        for end in (0, -1):
            row = self.inst.row(self.path[end]).copy()
            row[self.on] = np.inf
            y = int(np.argmin(row))
            if np.isfinite(row[y]) and (best is None or row[y] < best[0]):
                best = (row[y], end, y)
        if best is None:
            return False
        wy, end, y = best
        if not self.light(self.cost + wy, len(self.path)):
            return False
        if end == 0:
            self.path.insert(0, y)
        else:
            self.path.append(y)
        self.on[y] = True
        self.cost += wy
        return True

    def reverse(self) -> bool:
        p = self.path
        if len(p) < 4:
            return False
        at_head = bool(self.gen.integers(2))
        if not at_head:
            p.reverse()
        pos = {v: i for i, v in enumerate(p)}
        opts = [pos[y] for y in self.nbr[p[0]] if y in pos and pos[y] >= 2]
        done = False
        if opts:
            i = opts[int(self.gen.integers(len(opts)))]
            new_cost = self.cost - self.w(p[i - 1], p[i]) + self.w(p[0], p[i])
            if self.light(new_cost, len(p) - 1):
                p[:i] = p[:i][::-1]
                self.cost = new_cost
                done = True
        if not at_head:
            p.reverse()
        return done

    def eject(self) -> bool:
        p, lam = self.path, self.lam
        if len(p) <= 2:
            return False
        i = int(self.gen.integers(len(p)))
        if i in (0, len(p) - 1):
            j = 1 if i == 0 else len(p) - 2
            wi = self.w(p[i], p[j])
            if wi <= lam:
                return False
            self.cost -= wi
        else:
            delta = self.w(p[i - 1], p[i + 1]) - self.w(p[i - 1], p[i]) - self.w(p[i], p[i + 1])
            if delta >= -lam:
                return False
            self.cost += delta
        self.on[p[i]] = False
        del p[i]
        return True


def heuristic_search(inst: Instance, lam: float, budget: int = DEFAULT_BUDGET, seed: int = 0,
                     start: Path | Sequence[int] | None = None,
                     beam_width: int | None = None) -> HeuristicResult:
    """Randomised search for a long light path; the result is a certified lower bound on L.

    Deterministic in ``(instance, lam, budget, seed, start)``.  ``start`` is
    an optional warm-start path; if it is light it is kept as a candidate,
    so L never drops below its length.
    """
    if budget < 1:
        raise InvalidArgument("budget must be >= 1")
    n = inst.n
    gen = rng.generator(seed, n)
    nbr, nw = candidate_lists(inst, CANDIDATES)
    K = nbr.shape[1]
    if beam_width is None:
        beam_width = max(1, min(8192, (budget // 2) // (K * 48)))
    elites, steps = _beam(inst, lam, nbr, nw, beam_width, budget // 2)

    pool: list[list[int]] = []
    if start is not None:
        sp = as_path(start)
        if path_weight(inst, sp) <= lam * sp.length:
            pool.append(list(sp.vertices))
    pool += [list(e) for e in elites]
    if not pool:
        u = int(np.argmin(nw[:, 0]))
        pool.append([u, int(nbr[u, 0])])
        if nw[u, 0] > lam:
            pool = []

    best: list[int] | None = max(pool, key=len) if pool else None
    if pool:
        ls = _LocalSearch(inst, lam, nbr, gen)
        ls.load(pool[0])
        next_pool = 1
        stall = 0
        random_restarts = 0
        while steps < budget and random_restarts <= MAX_RANDOM_RESTARTS:
            steps += 1
            moved = ls.extend()
            if not moved:
                if gen.random() < 0.6:
                    ls.reverse()
                else:
                    ls.eject()
            if len(ls.path) > len(best):
                best = list(ls.path)
                stall = 0
            else:
                stall += 1
            if stall >= RESTART_AFTER:
                stall = 0
                if next_pool < len(pool):
                    ls.load(pool[next_pool])
                    next_pool += 1
                else:
                    random_restarts += 1
                    u = int(gen.integers(n))
                    if nw[u, 0] <= lam:
                        ls.load([u, int(nbr[u, 0])])
    if best is None:
        return HeuristicResult(0, None, steps)
    witness = Path(best)
    # certification: recompute from the instance, never trust the running sum
    if path_weight(inst, witness) > lam * witness.length:
        raise AssertionError("heuristic produced an uncertified path")
    return HeuristicResult(witness.length, witness, steps)


def heuristic_L(inst: Instance, lam: float, budget: int = DEFAULT_BUDGET, seed: int = 0) -> int:
    """Length of the best light path found by :func:`heuristic_search`."""
    return heuristic_search(inst, lam, budget, seed).L


def candidate_lists(inst: Instance, k: int) -> tuple[np.ndarray, np.ndarray]:
    """The ``k`` lightest neighbours of every vertex (ties by vertex id) and their weights."""
    n = inst.n
    k = min(k, n - 1)
    nbr = np.empty((n, k), dtype=np.int64)
    wts = np.empty((n, k))
    for u in range(n):
        row = inst.row(u).copy()
        row[u] = np.inf
        part = np.argpartition(row, k - 1)[:k] if k < n - 1 else np.nonzero(np.isfinite(row))[0]
        order = np.lexsort((part, row[part]))
        nbr[u] = part[order]
        wts[u] = row[nbr[u]]
    return nbr, wts


ENUMERATION_CAP = 10


def enumerate_min_weights(inst: Instance, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Reference minima by listing every ordered simple path (same layout as the DP profile)."""
    n = inst.n
    if n > cap:
        raise CapacityExceeded(f"n={n} is above the enumeration cap {cap}")
    W = np.asarray(inst.weights)
    out = np.full(n, np.nan)
    for ell in range(1, n):
        P = np.array(list(permutations(range(n), ell + 1)))
        out[ell] = W[P[:, :-1], P[:, 1:]].sum(axis=1).min()
    return out
