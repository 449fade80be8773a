"""Gamma densities and tails, path counts, first-moment bounds, bridge tails.

Probabilities for light paths sit near ``n**(-l)``, which leaves the double
range around l = 150 at n = 1e6, so everything that feeds a union bound is
carried as a natural log.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, InvalidArgument

INV_E = math.exp(-1.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


@dataclass(frozen=True)
class GammaParams:
    """Sum of ``k`` i.i.d. exponentials with mean ``theta``."""

    theta: float
    k: int

    def __post_init__(self):
        if not self.theta > 0:
            raise InvalidArgument(f"theta must be positive, got {self.theta}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidArgument(f"k must be a positive integer, got {self.k}")


def _params(p) -> GammaParams:
    return p if isinstance(p, GammaParams) else GammaParams(*p)


def log_factorial(k: int) -> float:
    return math.lgamma(k + 1.0)


def gamma_log_pdf(p: GammaParams | tuple, z: float) -> float:
    """ln f(z) = (k-1) ln z - z/theta - k ln theta - ln (k-1)!."""
    p = _params(p)
    if z < 0:
        raise DomainError(f"z must be nonnegative, got {z}")
    if z == 0:
        return 0.0 - p.k * math.log(p.theta) if p.k == 1 else -math.inf
    return ((p.k - 1) * math.log(z) - z / p.theta - p.k * math.log(p.theta)
            - log_factorial(p.k - 1))


_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188)


def _log1pmx(t: float) -> float:
    # log(1 + t) - t for |t| <= 0.25, by its power series
    total = 0.0
    power = t * t
    k = 2
    while True:
        term = power / k
        total += -term if k % 2 == 0 else term
        if abs(term) <= 1e-17 * abs(total):
            return total
        power *= t
        k += 1


def _log_prefactor(a: int, x: float) -> float:
    # a ln x - x - lgamma(a + 1), organised so large a near x = a loses nothing
    if a < 10:
        return a * math.log(x) - x - math.lgamma(a + 1.0)
    inv = 1.0 / a
    corr = inv * sum(c * inv ** (2 * i) for i, c in enumerate(_STIRLING))
    t = x / a - 1.0
    core = a * (math.log(x) - math.log(a)) - (x - a) if abs(t) > 0.25 else a * _log1pmx(t)
    return core - 0.5 * math.log(2 * math.pi * a) - corr


def _log_series(a: int, x: float) -> float:
    # ln P(a, x) from sum_m x^m / ((a+1)...(a+m)); caller guarantees x < a.
    term = 1.0
    total = 1.0
    m = 0
    while True:
        m += 1
        term *= x / (a + m)
        total += term
        if term < total * _EPS:
            break
        if m > _MAX_ITER:
            raise RuntimeError(f"incomplete gamma series did not converge (a={a}, x={x})")
    return _log_prefactor(a, x) + math.log(total)


def _log_contfrac(a: int, x: float) -> float:
    # ln Q(a, x) via the modified Lentz continued fraction; caller guarantees x >= a.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    i = 0
    while True:
        i += 1
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
        if i > _MAX_ITER:
            raise RuntimeError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")
    return _log_prefactor(a, x) + math.log(a) + math.log(h)


def gamma_log_cdf(p: GammaParams | tuple, z: float) -> float:
    """ln P(Gamma(theta, k) <= z); stays finite deep into the lower tail."""
    p = _params(p)
    if z < 0 or math.isnan(z):
        raise DomainError(f"z must be nonnegative, got {z}")
    if z == 0:
        return -math.inf
    if math.isinf(z):
        return 0.0
    x = z / p.theta
    if x < p.k:
        return _log_series(p.k, x)
    return math.log1p(-math.exp(_log_contfrac(p.k, x)))


def gamma_log_sf(p: GammaParams | tuple, z: float) -> float:
    """ln P(Gamma(theta, k) > z)."""
    p = _params(p)
    if z < 0 or math.isnan(z):
        raise DomainError(f"z must be nonnegative, got {z}")
    if z == 0:
        return 0.0
    if math.isinf(z):
        return -math.inf
    x = z / p.theta
    if x < p.k:
        return math.log1p(-math.exp(_log_series(p.k, x)))
    return _log_contfrac(p.k, x)


def gamma_cdf(p: GammaParams | tuple, z: float) -> float:
    """P(Gamma(theta, k) <= z): series below the mean, continued fraction above."""
    return math.exp(gamma_log_cdf(p, z))


def log_diff_exp(a: float, b: float) -> float:
    """ln(e^a - e^b) for a >= b."""
    if b == -math.inf:
        return a
    if b > a:
        raise ValueError("log_diff_exp needs a >= b")
    if b == a:
        return -math.inf
    return a + math.log1p(-math.exp(b - a))


def gamma_log_window(p: GammaParams | tuple, lo: float, hi: float) -> float:
    """ln P(lo <= Gamma <= hi); ``lo`` below zero is clipped to zero."""
    if hi <= 0:
        return -math.inf
    return log_diff_exp(gamma_log_cdf(p, hi), gamma_log_cdf(p, max(lo, 0.0)))


# -- path counts and first-moment bounds ------------------------------------

def count_paths(n: int, ell: int) -> float:
    """ln |Gamma_l| = sum_{i=0..l} ln(n - i), ordered simple paths with l edges."""
    if not 1 <= ell <= n - 1:
        raise InvalidArgument(f"need 1 <= l <= n-1, got l={ell}, n={n}")
    if ell <= 10_000:
        return math.fsum(math.log(n - i) for i in range(ell + 1))
    return math.lgamma(n + 1.0) - math.lgamma(n - ell)


def _log_falling(n: int, upto: int) -> np.ndarray:
    # out[l] = ln |Gamma_l| for l = 0..upto (l = 0 counts single vertices).
    return np.cumsum(np.log(n - np.arange(upto + 1, dtype=float)))


def atypical_union_terms(n: int) -> np.ndarray:
    """Per-length terms ln(|Gamma_l| P(Gamma(n, l) <= l/e - ln n)), l = 1..n-1.

    Lengths whose threshold is nonpositive contribute -inf (probability 0).
    """
    if n < 3:
        raise InvalidArgument("need n >= 3 so that ln n > 1")
    logn = math.log(n)
    counts = _log_falling(n, n - 1)
    out = np.full(n - 1, -math.inf)
    for ell in range(1, n):
        z = INV_E * ell - logn
        if z > 0:
            out[ell - 1] = counts[ell] + gamma_log_cdf((float(n), ell), z)
    return out


def atypical_union_bound(n: int) -> float:
    """ln of the union bound on P(some path has weight <= l/e - ln n).

    Lengths run over 1..n-1; a path with n edges does not exist in K_n.
    Every length is evaluated, so time and memory grow linearly in n.
    """
    return float(logsumexp(atypical_union_terms(n)))


_KINDS = ("F", "G", "H")


@dataclass(frozen=True)
class EventSpec:
    """A truncated light-path event on paths of length ``ell``.

    The weight window is ``[lam*ell - window, lam*ell]`` and the deviation cap
    is ``trunc`` (``inf`` removes it).  With ``normalized`` the cap is scaled
    by X/(lam*ell), which makes the conditional deviation probability the
    same for every total in the window.
    """

    kind: str
    ell: int
    lam: float
    trunc: float
    normalized: bool = False
    window: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidArgument(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.ell < 1:
            raise InvalidArgument("ell must be >= 1")
        if not self.trunc > 0:
            raise InvalidArgument("trunc must be positive")
        if not self.window > 0:
            raise InvalidArgument("window must be positive")

    @classmethod
    def F(cls, n: int, ell: int, lam: float, delta: float) -> "EventSpec":
        return cls("F", ell, lam, delta * math.log(n))

    @classmethod
    def G(cls, n: int, ell: int, lam: float, zeta: float) -> "EventSpec":
        return cls("G", ell, lam, zeta * math.log(n), normalized=True)

    @classmethod
    def H(cls, n: int, ell: int, lam: float) -> "EventSpec":
        return cls("H", ell, lam, math.log(n) / 10)


def log_window_probability(n: int, spec: EventSpec) -> float:
    """ln P(lam*l - window <= Gamma(n, l) <= lam*l)."""
    top = spec.lam * spec.ell
    return gamma_log_window((float(n), spec.ell), top - spec.window, top)


def expected_count(n: int, spec: EventSpec, dev_prob: float) -> float:
    """ln E N for N = number of length-l paths satisfying the event.

    The weight window and the conditional deviation probability ``dev_prob``
    multiply: given the total, the path's increments are uniform on a simplex
    whatever the total is.
    """
    if not 0 < dev_prob <= 1:
        raise InvalidArgument(f"dev_prob must lie in (0, 1], got {dev_prob}")
    return count_paths(n, spec.ell) + log_window_probability(n, spec) + math.log(dev_prob)


@lru_cache(maxsize=4096)
def _light_term(n: int, ell: int, lam: float) -> float:
    # ln(|Gamma_l| P(Gamma(n, l) <= lam l))
    return count_paths(n, ell) + gamma_log_cdf((float(n), ell), lam * ell)


def first_moment_upper_certificate(n: int, lam: float, fail_prob: float) -> int | None:
    """Smallest l with sum_{l <= l' < 2l} |Gamma_l'| P(Gamma(n, l') <= lam l') <= fail_prob.

    Any path of length >= l contains a piece of length in [l, 2l) with no
    larger average, so Markov's inequality gives L(n, lam) < l with
    probability at least 1 - fail_prob.  Returns None when no l <= n-1
    qualifies.  ``fail_prob >= 1`` is vacuous and returns 1.
    """
    if not fail_prob > 0:
        raise InvalidArgument("fail_prob must be positive")
    if fail_prob >= 1:
        return 1
    log_fail = math.log(fail_prob)
    for ell in range(1, n):
        hi = min(2 * ell - 1, n - 1)
        terms = [_light_term(n, m, lam) for m in range(ell, hi + 1)]
        if logsumexp(terms) <= log_fail:
            return ell
    return None


# -- Brownian bridge --------------------------------------------------------

def bridge_lowertail(delta: float, mode: str = "series") -> float:
    """P(max_{0<=t<=1} |B_t| <= delta) for a standard Brownian bridge.

    ``mode="asymptotic"`` is the leading small-delta form
    sqrt(2 pi)/delta * exp(-pi^2 / (8 delta^2)).  ``mode="series"`` sums the
    full expansion: the odd-term theta series for delta < 1, and the
    alternating Kolmogorov series 1 - 2 sum (-1)^(k-1) exp(-2 k^2 delta^2)
    otherwise, stopping once the next term is below 1e-16 of the partial sum.
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if mode == "asymptotic":
        return _SQRT_2PI / delta * math.exp(-math.pi ** 2 / (8 * delta * delta))
    if mode != "series":
        raise InvalidArgument(f"unknown mode {mode!r}")
    if delta < 1.0:
        c = math.pi ** 2 / (8 * delta * delta)
        total = 0.0
        k = 1
        while True:
            term = math.exp(-(2 * k - 1) ** 2 * c)
            if term == 0.0 or (total > 0 and term < _EPS * total):
                break
            total += term
            k += 1
        return min(1.0, _SQRT_2PI / delta * total)
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * delta * delta)
        if term == 0.0 or (total != 0 and term < _EPS * abs(total)):
            break
        total += term if k % 2 else -term
        k += 1
    return max(0.0, 1.0 - 2.0 * total)
