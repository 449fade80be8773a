import math
from collections import Counter
from itertools import permutations

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lightpath.analytics import INV_E, EventSpec, expected_count
from lightpath.errors import CapacityExceeded, InvalidArgument, InvalidPath
from lightpath.model import Path
from lightpath.overlap import (all_paths, conditional_overlap_bound, counting_bound,
                               counting_bound_exact, enumerate_overlap_histogram,
                               exhaustive_overlap_check, overlap_profile, second_moment_ratio,
                               second_moment_terms)


def _paths(n, ell):
    return list(permutations(range(n), ell + 1))


def test_profile_single_component():
    pr = overlap_profile([1, 2, 3, 4, 5], [2, 3, 4, 5, 1])
    assert pr.S == {(2, 3), (3, 4), (4, 5)}
    assert pr.components == ((2, 3, 4, 5),)
    assert (pr.i, pr.j, pr.vertex_count) == (1, 3, 4)


def test_profile_two_components():
    pr = overlap_profile([1, 2, 3, 4, 5], [1, 2, 5, 4, 3])
    assert pr.S == {(1, 2), (3, 4), (4, 5)}
    assert pr.components == ((1, 2), (3, 4, 5))
    assert (pr.i, pr.j, pr.vertex_count) == (2, 3, 5)


def test_profile_disjoint():
    pr = overlap_profile([0, 1, 2], [3, 4, 5])
    assert (pr.i, pr.j, pr.components) == (0, 0, ())


def test_profile_invalid():
    with pytest.raises(InvalidPath):
        overlap_profile([0, 1, 0], [1, 2])


def test_theta_symmetric_exhaustive_n5():
    # theta(g, h) = |V(S)| - |S| depends on S alone, so swapping the paths keeps it;
    # the components differ only in orientation
    for lg in range(1, 5):
        for lh in range(1, 5):
            for g in _paths(5, lg):
                for h in _paths(5, lh):
                    a, b = overlap_profile(g, h), overlap_profile(h, g)
                    assert (a.i, a.j, a.S) == (b.i, b.j, b.S)
                    assert {frozenset(c) for c in a.components} == \
                        {frozenset(c) for c in b.components}


def test_reversal_of_second_path_is_invisible():
    gen = np.random.default_rng(3)
    for _ in range(500):
        g = Path(gen.permutation(9)[:gen.integers(2, 9)])
        h = Path(gen.permutation(9)[:gen.integers(2, 9)])
        assert overlap_profile(g, h) == overlap_profile(g, h.reversed())


@settings(max_examples=300, deadline=None)
@given(st.permutations(range(8)), st.permutations(range(8)), st.integers(1, 7), st.integers(1, 7))
def test_profile_invariants(pg, ph, lg, lh):
    g, h = pg[:lg + 1], ph[:lh + 1]
    pr = overlap_profile(g, h)
    assert pr.i <= pr.j
    assert pr.vertex_count == pr.i + pr.j
    seen = set()
    text = " " + " ".join(map(str, g)) + " "
    for comp in pr.components:
        assert not seen & set(comp)
        seen |= set(comp)
        assert " " + " ".join(map(str, comp)) + " " in text
        assert all(tuple(sorted(e)) in pr.S for e in zip(comp, comp[1:]))
    assert sum(len(c) - 1 for c in pr.components) == pr.j


def test_histogram_n5_l4_total():
    hist = enumerate_overlap_histogram(5, 4, [0, 1, 2, 3, 4])
    assert sum(hist.values()) == 120
    assert all(i <= j for i, j in hist)


def test_histogram_matches_scalar_profiles():
    for n, ell in [(5, 2), (5, 4), (6, 3)]:
        g = tuple(range(ell + 1))
        scalar = Counter((overlap_profile(g, h).i, overlap_profile(g, h).j)
                         for h in _paths(n, ell))
        assert enumerate_overlap_histogram(n, ell, g) == scalar


def test_histogram_bounded_n6():
    hist = enumerate_overlap_histogram(6, 4, [0, 1, 2, 3, 4])
    for (i, j), c in hist.items():
        assert c <= counting_bound_exact(6, 4, i, j)
        assert math.log(c) <= counting_bound(6, 4, i, j)[0] + 1e-12


def test_histogram_caps():
    with pytest.raises(CapacityExceeded):
        enumerate_overlap_histogram(9, 3, [0, 1, 2, 3])
    with pytest.raises(InvalidArgument):
        enumerate_overlap_histogram(5, 3, [0, 1, 2])


def test_all_pairs_agree_with_scalar_n5():
    # every ordered pair at n = 5: vectorised table against the scalar scan
    from lightpath.overlap import _PairTable
    for ell in range(1, 5):
        tab = _PairTable(5, ell)
        for row, g in enumerate(tab.P.tolist()):
            theta, j, _, vcount = tab.against(row)
            for col, h in enumerate(tab.P.tolist()):
                pr = overlap_profile(g, h)
                assert (theta[col], j[col], vcount[col]) == (pr.i, pr.j, pr.vertex_count)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_exhaustive_suites_small(n):
    assert all(c.passed for c in exhaustive_overlap_check(n))


def test_exhaustive_cap():
    with pytest.raises(CapacityExceeded):
        exhaustive_overlap_check(9)


def test_all_paths_counts():
    assert len(all_paths(6, 3)) == 6 * 5 * 4 * 3


def test_counting_bound_example():
    assert counting_bound_exact(5, 4, 1, 3) == 40
    assert math.exp(counting_bound(5, 4, 1, 3)[0]) == pytest.approx(40, rel=1e-12)


def test_counting_bound_zero_overlap():
    n, ell = 7, 3
    assert counting_bound_exact(n, ell, 0, 0) == math.comb(n, ell + 1) * math.factorial(ell + 1)
    hist = enumerate_overlap_histogram(n, ell, [0, 1, 2, 3])
    assert hist[(0, 0)] <= counting_bound_exact(n, ell, 0, 0)


def test_counting_bound_invalid():
    with pytest.raises(InvalidArgument):
        counting_bound(7, 4, 3, 2)
    assert counting_bound(5, 4, 2, 4)[0] == -math.inf     # C(5-6, ...) undefined
    assert counting_bound_exact(5, 4, 2, 4) == 0


def test_counting_bound_n7_l5_dominates_enumeration():
    hist = enumerate_overlap_histogram(7, 5, [0, 1, 2, 3, 4, 5])
    for i in range(6):
        for j in range(i, 6):
            assert hist.get((i, j), 0) <= counting_bound_exact(7, 5, i, j)


def test_simplified_form_uses_l_plus_one():
    # l^(3i) n^(l+1-i-j) would be 56 here, below the binomial form
    binom, simple = counting_bound(7, 2, 1, 1)
    assert round(math.exp(binom)) == 60
    assert math.exp(simple) == pytest.approx(3**3 * 7, rel=1e-12)
    assert binom <= simple


@settings(max_examples=300, deadline=None)
@given(st.integers(3, 60), st.data())
def test_binomial_below_simplified(n, data):
    ell = data.draw(st.integers(2, n - 1))
    j = data.draw(st.integers(0, ell))
    i = data.draw(st.integers(0, j))
    b, s = counting_bound(n, ell, i, j)
    assert b <= s + 1e-9


def test_conditional_reduces_to_tail():
    n, ell, lam = 500, 20, 0.3
    v = conditional_overlap_bound(n, ell, lam, 2.0, 0, 0)
    mp.mp.dps = 30
    ref = float(mp.log(mp.gammainc(ell, 0, mp.mpf(lam * ell + 1) / n, regularized=True)))
    assert v == pytest.approx(ref, rel=1e-12)


def test_conditional_recomputed():
    n, ell, lam = 1000, 50, INV_E
    trunc = 0.1 * math.log(n)
    mp.mp.dps = 30
    z = lam * 45 + 1 + 2 * 2 * trunc
    ref = float(mp.log(mp.gammainc(45, 0, mp.mpf(z) / n, regularized=True)))
    assert conditional_overlap_bound(n, ell, lam, trunc, 2, 5) == pytest.approx(ref, rel=1e-12)


def test_conditional_monotone():
    n, ell, lam = 1000, 30, 0.35
    by_i = [conditional_overlap_bound(n, ell, lam, 0.5, i, 10) for i in range(11)]
    by_t = [conditional_overlap_bound(n, ell, lam, t, 3, 10) for t in (0.0, 0.1, 1.0, 5.0)]
    assert by_i == sorted(by_i) and by_t == sorted(by_t)


def test_conditional_errors():
    with pytest.raises(InvalidArgument):
        conditional_overlap_bound(100, 5, 0.3, 1.0, 1, 5)
    with pytest.raises(InvalidArgument):
        conditional_overlap_bound(100, 5, 0.3, 1.0, 3, 2)


def test_second_moment_summand_definition():
    n = 10**4
    spec = EventSpec.F(n, 6, 0.33, 0.1)
    terms = second_moment_terms(n, spec, 0.5)
    ref = (counting_bound(n, 6, 1, 1)[0]
           + conditional_overlap_bound(n, 6, 0.33, spec.trunc, 1, 1)
           - expected_count(n, spec, 0.5))
    assert terms[(1, 1)] == pytest.approx(ref, rel=1e-13)
    assert (0, 0) not in terms and all(1 <= i <= j <= 6 for i, j in terms)
    assert terms[(1, 6)] == pytest.approx(counting_bound(n, 6, 1, 6)[0]
                                          - expected_count(n, spec, 0.5), rel=1e-13)


def test_second_moment_not_clamped():
    n = 1000
    spec = EventSpec("F", 5, 0.01, math.inf)
    assert second_moment_ratio(n, spec, 1.0) > 1


def test_second_moment_window_regime():
    n = 10**6
    L = math.log(n)
    ell = int(1e-3 * L**3)
    spec = EventSpec.F(n, ell, INV_E - L**-2, 0.1)
    r = second_moment_ratio(n, spec, 1.0)
    assert 0 < r < 1
    assert second_moment_ratio(n, spec, 0.5) == pytest.approx(2 * r, rel=1e-12)
