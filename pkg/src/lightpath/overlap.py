"""Overlap structure between pairs of paths, and the second-moment bound built on it.

For paths g, h let S be their common (unordered) edges.  The S-components of
g are its maximal runs of consecutive edges lying in S; theta(g, h) counts
them.  Although theta is read off g, it equals |V(S)| - |S| and so depends
on S alone: theta(g, h) = theta(h, g), and the components of h are those of
g up to orientation.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .analytics import EventSpec, expected_count, gamma_log_cdf
from .errors import CapacityExceeded, InvalidArgument
from .model import Path, as_path

EXHAUSTIVE_CAP = 8


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class OverlapProfile:
    S: frozenset
    components: tuple[tuple[int, ...], ...]
    i: int
    j: int

    @property
    def vertex_count(self) -> int:
        """|V(S)|, counted from the edges themselves."""
        return len({v for e in self.S for v in e})


def overlap_profile(g: Path | Sequence[int], h: Path | Sequence[int]) -> OverlapProfile:
    """Common edges of ``g`` and ``h`` and the S-components of ``g``."""
    g, h = as_path(g), as_path(h)
    S = frozenset(_edge(*e) for e in g.edges()) & frozenset(_edge(*e) for e in h.edges())
    comps = []
    run: list[int] = []
    vs = g.vertices
    for k in range(g.length):
        if _edge(vs[k], vs[k + 1]) in S:
            if not run:
                run = [vs[k]]
            run.append(vs[k + 1])
        elif run:
            comps.append(tuple(run))
            run = []
    if run:
        comps.append(tuple(run))
    return OverlapProfile(S, tuple(comps), len(comps), len(S))


# -- exhaustive engine ----------------------------------------------------------

@lru_cache(maxsize=32)
def all_paths(n: int, ell: int) -> np.ndarray:
    """Every ordered simple path with ``ell`` edges in K_n, one per row."""
    return np.array(list(permutations(range(n), ell + 1)), dtype=np.int16).reshape(-1, ell + 1)


def _edge_ids(n: int, P: np.ndarray) -> np.ndarray:
    a = np.minimum(P[:, :-1], P[:, 1:]).astype(np.int32)
    b = np.maximum(P[:, :-1], P[:, 1:]).astype(np.int32)
    return a * n + b


class _PairTable:
    """Vectorised (theta, |S|, |V(S)|) of one path against all paths of a length."""

    def __init__(self, n: int, ell: int):
        self.n, self.ell = n, ell
        self.P = all_paths(n, ell)
        self.E = _edge_ids(n, self.P)
        m = len(self.P)
        self.member = np.zeros((m, n * n), dtype=bool)
        self.member[np.arange(m)[:, None], self.E] = True

    def against(self, row: int):
        e_g = self.E[row]
        # theta and j from g's side: which of g's edges each h contains
        in_g = self.member[:, e_g]
        theta = in_g[:, 0].astype(np.int32) + (in_g[:, 1:] & ~in_g[:, :-1]).sum(axis=1)
        j = in_g.sum(axis=1)
        # |V(S)| and j again from h's side: which of h's edges lie on g
        g_mask = np.zeros(self.n * self.n, dtype=bool)
        g_mask[e_g] = True
        in_h = g_mask[self.E]
        touched = np.zeros((len(self.P), self.ell + 1), dtype=bool)
        touched[:, :-1] |= in_h
        touched[:, 1:] |= in_h
        return theta, j, in_h.sum(axis=1), touched.sum(axis=1)


def _path_row(n: int, ell: int, g: Path) -> int:
    P = all_paths(n, ell)
    hit = np.nonzero((P == np.asarray(g.vertices)).all(axis=1))[0]
    return int(hit[0])


def enumerate_overlap_histogram(n: int, ell: int, g: Path | Sequence[int],
                                cap: int = EXHAUSTIVE_CAP) -> Counter:
    """|A_{i,j}(g)| for every (i, j), by enumerating all ordered paths of length ``ell``."""
    if n > cap:
        raise CapacityExceeded(f"n={n} is above the exhaustive cap {cap}")
    g = as_path(g)
    if g.length != ell or max(g.vertices) >= n:
        raise InvalidArgument("g must be a path of the given length inside K_n")
    if not 1 <= ell <= n - 1:
        raise InvalidArgument("need 1 <= ell <= n-1")
    theta, j, _, _ = _PairTable(n, ell).against(_path_row(n, ell, g))
    return Counter(zip(theta.tolist(), j.tolist()))


# -- counting and conditional bounds ------------------------------------------------

def _log_comb(a: int, b: int) -> float:
    if b < 0 or a < 0 or b > a:
        return -math.inf
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def _check_ij(ell: int, i: int, j: int):
    if i > j:
        raise InvalidArgument(f"need i <= j, got i={i}, j={j}")
    if i < 0 or j > ell:
        raise InvalidArgument(f"need 0 <= i <= j <= l, got i={i}, j={j}, l={ell}")


def counting_bound_exact(n: int, ell: int, i: int, j: int) -> int:
    """C(l+1, 2i) C(n-i-j, l+1-i-j) 2^i (l+1-j)! as an exact integer (0 if undefined)."""
    _check_ij(ell, i, j)
    top, pick = n - i - j, ell + 1 - i - j
    if top < 0 or pick < 0 or pick > top or 2 * i > ell + 1:
        return 0
    return math.comb(ell + 1, 2 * i) * math.comb(top, pick) * 2 ** i * math.factorial(ell + 1 - j)


def counting_bound(n: int, ell: int, i: int, j: int) -> tuple[float, float]:
    """Log upper bounds on |A_{i,j}|: (binomial form, simplified form).

    The binomial form is ln[C(l+1, 2i) C(n-i-j, l+1-i-j) 2^i (l+1-j)!]; the
    simplified form is ln[(l+1)^(3i) n^(l+1-i-j)], which dominates it.
    """
    _check_ij(ell, i, j)
    binom = (_log_comb(ell + 1, 2 * i) + _log_comb(n - i - j, ell + 1 - i - j)
             + i * math.log(2) + math.lgamma(ell + 2 - j))
    simple = 3 * i * math.log(ell + 1) + (ell + 1 - i - j) * math.log(n)
    return binom, simple


def conditional_overlap_bound(n: int, ell: int, lam: float, trunc_per_component: float,
                              i: int, j: int, window: float = 1.0) -> float:
    """ln P(Gamma(n, l-j) <= lam (l-j) + window + 2 i trunc).

    Given the event on g, the shared edges weigh at least
    lam j - window - 2 i trunc, so the l - j private edges of h must be
    light enough to make up the difference; they are independent of g.
    """
    _check_ij(ell, i, j)
    if j >= ell:
        raise InvalidArgument("j >= l leaves no free edges")
    free = ell - j
    return gamma_log_cdf((float(n), free), lam * free + window + 2 * i * trunc_per_component)


def second_moment_terms(n: int, spec: EventSpec, dev_prob: float) -> dict[tuple[int, int], float]:
    """Log summands |A_ij| P(event on h | event on g) / E N for 1 <= i <= j <= l.

    |A_ij| uses the binomial-form count; j = l (h uses every edge of g)
    takes conditional probability 1.
    """
    ell = spec.ell
    log_en = expected_count(n, spec, dev_prob)
    terms = {}
    for i in range(1, ell + 1):
        for j in range(i, ell + 1):
            count, _ = counting_bound(n, ell, i, j)
            if count == -math.inf:
                continue
            cond = 0.0 if j == ell else conditional_overlap_bound(
                n, ell, spec.lam, spec.trunc, i, j, spec.window)
            terms[(i, j)] = count + cond - log_en
    return terms


def second_moment_ratio(n: int, spec: EventSpec, dev_prob: float) -> float:
    """Upper bound on sum_{i >= 1} sum_{h in A_ij} P(event on h | event on g) / E N.

    A value well below 1 certifies E N^2 <= (1 + ratio) (E N)^2 at these
    parameters.  Nothing is clamped: a weak configuration returns a ratio
    above 1.
    """
    terms = second_moment_terms(n, spec, dev_prob)
    if not terms:
        return 0.0
    return float(math.exp(logsumexp(list(terms.values()))))


# -- exhaustive verification ----------------------------------------------------

@dataclass
class OverlapCheck:
    """Outcome of one exhaustive identity suite; ``counterexample`` holds (g, h) or (g, (i, j))."""

    name: str
    passed: bool = True
    checked: int = 0
    counterexample: tuple | None = None

    def fail(self, witness):
        if self.passed:
            self.passed = False
            self.counterexample = witness


def _simplified_dominates(n: int, ell: int, i: int, j: int, binom: int) -> bool:
    e = ell + 1 - i - j
    if e >= 0:
        return binom <= (ell + 1) ** (3 * i) * n ** e
    return binom * n ** (-e) <= (ell + 1) ** (3 * i)


def exhaustive_overlap_check(n: int, cap: int = EXHAUSTIVE_CAP) -> list[OverlapCheck]:
    """Check the overlap identities over every ordered pair of paths of every length in K_n.

    Suites: |V(S)| = |S| + theta, theta <= |S|, S agrees from both sides,
    the A_ij histogram partitions all paths, and each |A_ij| is below the
    binomial-form bound, which is in turn below the simplified form.
    """
    if n > cap:
        raise CapacityExceeded(f"n={n} is above the exhaustive cap {cap}")
    if n < 2:
        raise InvalidArgument("need n >= 2")
    checks = {k: OverlapCheck(k) for k in
              ("vertex_identity", "theta_le_j", "symmetric_S", "partition",
               "binomial_bound", "simplified_bound")}
    for ell in range(1, n):
        tab = _PairTable(n, ell)
        m = len(tab.P)
        width = ell + 1
        bound = np.zeros((width, width), dtype=object)
        for i in range(width):
            for j in range(i, width):
                b = counting_bound_exact(n, ell, i, j)
                bound[i, j] = b
                checks["simplified_bound"].checked += 1
                if not _simplified_dominates(n, ell, i, j, b):
                    checks["simplified_bound"].fail(((n, ell), (i, j)))
        for row in range(m):
            theta, j, j_h, vcount = tab.against(row)
            g = tuple(tab.P[row].tolist())
            for name, ok in (("vertex_identity", vcount == j + theta),
                             ("theta_le_j", theta <= j),
                             ("symmetric_S", j == j_h)):
                checks[name].checked += m
                if not ok.all():
                    checks[name].fail((g, tuple(tab.P[int(np.argmin(ok))].tolist())))
            hist = np.bincount(theta * width + j, minlength=width * width).reshape(width, width)
            checks["partition"].checked += 1
            if hist.sum() != m:
                checks["partition"].fail((g, int(hist.sum())))
            checks["binomial_bound"].checked += 1
            for i, jj in zip(*np.nonzero(hist)):
                if i > jj or hist[i, jj] > bound[i, jj]:
                    checks["binomial_bound"].fail((g, (int(i), int(jj))))
                    break
    return list(checks.values())
