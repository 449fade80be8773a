"""Exponential sequences conditioned on their sum, and how far they stray from a line.

Given ``Z_1 + ... + Z_s = total`` the vector of i.i.d. exponentials is
uniform on the simplex, so rescaling fresh exponentials by their own sum
samples the conditional law exactly.  Pinned blocks fix some coordinates;
the free ones are again uniform on a smaller simplex.

p_s is the probability that the conditioned walk S_k = Z_1 + ... + Z_k stays
within r of the line rho*k for every k.  It decays like exp(-c s / r^2), so
plain frequencies vanish quickly; :func:`estimate_p` defaults to a splitting
estimator that walks particles forward with the exact one-step conditional
law, kills those that leave the band, and multiplies survival fractions.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from . import rng
from .errors import InvalidArgument

RHO_RANGE = (0.25, 4.0)
DEFAULT_BATCHES = 10
_NAIVE_CHUNK = 20_000


@dataclass(frozen=True)
class ConditionedSequenceSpec:
    """Length ``s`` walk with slope ``rho`` conditioned on ``sum == total`` (default rho*s).

    ``pins`` is a sequence of ``(a, values)``: coordinates ``a, ..., a+len(values)-1``
    (1-based) are fixed to ``values``.
    """

    s: int
    rho: float = 1.0
    total: float | None = None
    pins: tuple = ()

    def __post_init__(self):
        if self.s < 1:
            raise InvalidArgument("s must be >= 1")
        if not RHO_RANGE[0] <= self.rho <= RHO_RANGE[1]:
            raise InvalidArgument(f"rho must lie in {RHO_RANGE}, got {self.rho}")
        pins = tuple((int(a), tuple(float(v) for v in vals)) for a, vals in self.pins)
        object.__setattr__(self, "pins", pins)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "total", float(self.rho * self.s if self.total is None else self.total))
        taken = np.zeros(self.s + 1, dtype=bool)
        for a, vals in pins:
            b = a + len(vals) - 1
            if not vals or a < 1 or b > self.s:
                raise InvalidArgument(f"pin block [{a}, {b}] is empty or outside [1, {self.s}]")
            if taken[a:b + 1].any():
                raise InvalidArgument("pin blocks overlap")
            if min(vals) < 0:
                raise InvalidArgument("pinned values must be nonnegative")
            taken[a:b + 1] = True
        free_sum = self.free_sum
        tol = 1e-9 * max(1.0, abs(self.total))
        if free_sum < -tol or (self.free_count == 0 and abs(free_sum) > tol):
            raise InvalidArgument("pins are infeasible for the requested total")

    @property
    def pinned(self) -> dict[int, float]:
        """0-based position -> pinned value."""
        return {a - 1 + t: v for a, vals in self.pins for t, v in enumerate(vals)}

    @property
    def free_count(self) -> int:
        return self.s - len(self.pinned)

    @property
    def free_sum(self) -> float:
        return self.total - sum(self.pinned.values())


def sample_conditioned(spec: ConditionedSequenceSpec, gen: np.random.Generator,
                       size: int | None = None) -> np.ndarray:
    """Exact draw(s) from the conditional law; shape ``(s,)`` or ``(size, s)``."""
    rows = 1 if size is None else size
    out = np.empty((rows, spec.s))
    pinned = spec.pinned
    free = np.array([k for k in range(spec.s) if k not in pinned], dtype=np.int64)
    for k, v in pinned.items():
        out[:, k] = v
    if len(free):
        e = gen.standard_exponential((rows, len(free)))
        out[:, free] = e / e.sum(axis=1, keepdims=True) * max(spec.free_sum, 0.0)
    return out[0] if size is None else out


def deviation_of(seq, rho: float) -> float | np.ndarray:
    """max_k |Z_1 + ... + Z_k - rho k|; applied row-wise to 2-d input."""
    z = np.asarray(seq, dtype=float)
    if z.shape[-1] == 0:
        raise InvalidArgument("empty sequence")
    k = np.arange(1, z.shape[-1] + 1)
    dev = np.abs(np.cumsum(z, axis=-1) - rho * k).max(axis=-1)
    return float(dev) if z.ndim == 1 else dev


@dataclass(frozen=True)
class DeviationEstimate:
    """Estimate of P(M_s <= r).  ``std_err`` is binomial for the naive
    method and the spread of independent batches for splitting."""

    p_hat: float
    std_err: float
    reps: int
    r: float
    spec: ConditionedSequenceSpec
    method: str = "splitting"

    @property
    def censored(self) -> bool:
        return self.p_hat == 0.0


def _naive_batch(spec, r, reps, key) -> float:
    gen = rng.generator(*key)
    hits = 0
    for start in range(0, reps, _NAIVE_CHUNK):
        z = sample_conditioned(spec, gen, size=min(_NAIVE_CHUNK, reps - start))
        hits += int((deviation_of(z, spec.rho) <= r).sum())
    return hits / reps


def _splitting_batch(spec, r, particles, key) -> float:
    gen = rng.generator(*key)
    pinned = spec.pinned
    remaining = spec.free_count
    part = np.zeros(particles)                      # S_k
    rest = np.full(particles, max(spec.free_sum, 0.0))  # free mass still to place
    p = 1.0
    for k in range(spec.s):
        if k in pinned:
            part += pinned[k]
        else:
            if remaining == 1:
                step = rest.copy()
            else:
                u = gen.random(particles)
                step = -rest * np.expm1(np.log1p(-u) / (remaining - 1))
            part += step
            rest -= step
            remaining -= 1
        alive = np.abs(part - spec.rho * (k + 1)) <= r
        n_alive = int(alive.sum())
        if n_alive == particles:
            continue
        if n_alive == 0:
            return 0.0
        p *= n_alive / particles
        pick = np.flatnonzero(alive)[gen.integers(0, n_alive, particles)]
        part, rest = part[pick], rest[pick]
    return p


def estimate_p(spec: ConditionedSequenceSpec, r: float, reps: int, seed: int,
               method: str = "splitting", batches: int = DEFAULT_BATCHES,
               workers: int = 1) -> DeviationEstimate:
    """Estimate p = P(M_s <= r | sum, pins) from ``reps`` exact conditional samples.

    ``method="naive"`` is the plain frequency.  ``"splitting"`` spends the
    same ``reps`` as particles spread over ``batches`` independent runs.
    Batch b draws from ``rng.generator(seed, s, b)``, so the result does not
    depend on ``workers``.
    """
    if reps < 1000:
        raise InvalidArgument("reps must be >= 1000")
    if r < 0:
        raise InvalidArgument("r must be nonnegative")
    if method not in ("naive", "splitting"):
        raise InvalidArgument(f"unknown method {method!r}")
    batches = max(2, min(batches, reps // 100))
    sizes = [reps // batches + (b < reps % batches) for b in range(batches)]
    fn = _naive_batch if method == "naive" else _splitting_batch
    args = [(spec, r, sizes[b], (seed, spec.s, b)) for b in range(batches)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            vals = list(ex.map(fn, *zip(*args)))
    else:
        vals = [fn(*a) for a in args]
    vals = np.array(vals)
    if method == "naive":
        p = float(np.dot(vals, sizes) / reps)
        se = math.sqrt(p * (1 - p) / reps)
    else:
        p = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(batches))
    return DeviationEstimate(p, se, reps, float(r), spec, method)


# -- rate fitting ------------------------------------------------------------------

@dataclass(frozen=True)
class RatePoint:
    s: int
    x: float            # s / r^2
    p_hat: float
    std_err: float
    censored: bool
    neg_log_p: float    # for censored points, the lower bound -ln(3/reps)
    rate: float         # neg_log_p / x
    residual: float = math.nan


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    slope_ci: tuple[float, float]
    intercept_ci: tuple[float, float]
    points: list = field(default_factory=list)

    def rates(self, upper_half: bool = False) -> np.ndarray:
        pts = [p for p in self.points if not p.censored]
        if upper_half:
            pts = [p for p in self.points[len(self.points) // 2:] if not p.censored]
        return np.array([p.rate for p in pts])


def fit_deviation_rate(rho: float, r: float, s_grid: Sequence[int], reps: int, seed: int,
                       method: str = "splitting", level: float = 0.95) -> RateFit:
    """Regress -ln p_hat(s) on s / r^2 with a t-based confidence interval.

    Points with p_hat = 0 are kept in the table as censored (bounded via
    p <= 3/reps) and left out of the regression.
    """
    s_grid = [int(s) for s in s_grid]
    if len(s_grid) < 2:
        raise InvalidArgument("need at least two grid points for a slope")
    if any(b <= a for a, b in zip(s_grid, s_grid[1:])):
        raise InvalidArgument("s_grid must be increasing")
    if s_grid[0] < r * r:
        raise InvalidArgument("every s must be >= r^2")
    raw = []
    for idx, s in enumerate(s_grid):
        est = estimate_p(ConditionedSequenceSpec(s, rho), r, reps, rng.mix(seed, idx), method)
        x = s / r ** 2
        nl = -math.log(3 / reps) if est.censored else -math.log(est.p_hat)
        raw.append(RatePoint(s, x, est.p_hat, est.std_err, est.censored, nl, nl / x))
    use = [p for p in raw if not p.censored]
    if len(use) < 2:
        raise InvalidArgument("fewer than two uncensored points; raise reps")
    xs = np.array([p.x for p in use])
    ys = np.array([p.neg_log_p for p in use])
    fit = stats.linregress(xs, ys)
    dof = len(use) - 2
    if dof > 0:
        t = stats.t.ppf(0.5 + level / 2, dof)
        sci = (float(fit.slope - t * fit.stderr), float(fit.slope + t * fit.stderr))
        ici = (float(fit.intercept - t * fit.intercept_stderr),
               float(fit.intercept + t * fit.intercept_stderr))
    else:
        sci = ici = (-math.inf, math.inf)
    pts = [p if p.censored else
           RatePoint(**{**p.__dict__, "residual": p.neg_log_p - fit.intercept - fit.slope * p.x})
           for p in raw]
    return RateFit(float(fit.slope), float(fit.intercept), sci, ici, pts)


# -- bound checks ------------------------------------------------------------------

SUPERADD_CONSTANT = 1e8


@dataclass(frozen=True)
class SuperadditivityReport:
    j: int
    k: int
    p_j: DeviationEstimate
    p_k: DeviationEstimate
    p_jk: DeviationEstimate
    rhs: float
    margin: float
    std_err: float
    in_hypothesis: bool

    @property
    def verdict(self) -> str:
        if self.margin > 3 * self.std_err:
            return "holds"
        if self.margin >= -3 * self.std_err:
            return "inconclusive"
        return "violated"

    @property
    def passed(self) -> bool:
        return self.verdict != "violated"


def check_superadditivity(j: int, k: int, rho: float, r: float, reps: int, seed: int,
                          method: str = "splitting") -> SuperadditivityReport:
    """Compare p_{j+k} with p_j p_k / (1e8 r sqrt(min(j, k))).

    The bound is stated for j, k >= r^2 and rho in [1/4, 1]; outside that range the
    check still runs and ``in_hypothesis`` is False.
    """
    ests = [estimate_p(ConditionedSequenceSpec(s, rho), r, reps, rng.mix(seed, t), method)
            for t, s in enumerate((j, k, j + k))]
    pj, pk, pjk = ests
    rhs = pj.p_hat * pk.p_hat / (SUPERADD_CONSTANT * r * math.sqrt(min(j, k)))
    rel = math.hypot(pj.std_err / pj.p_hat, pk.std_err / pk.p_hat) if rhs > 0 else 0.0
    se = math.hypot(pjk.std_err, rhs * rel)
    ok = min(j, k) >= r * r and 0.25 <= rho <= 1
    return SuperadditivityReport(j, k, pj, pk, pjk, rhs, pjk.p_hat - rhs, se, ok)


@dataclass(frozen=True)
class PinnedReport:
    estimate: DeviationEstimate
    unpinned: DeviationEstimate
    c_star: float
    q: int
    m: int
    log_bound: float
    bracket: bool = True     # the O(1) constant is taken as 1

    @property
    def log_estimate(self) -> float:
        return math.log(self.estimate.p_hat) if self.estimate.p_hat > 0 else -math.inf

    @property
    def holds(self) -> bool:
        return self.log_estimate <= self.log_bound


def check_pinned_conditioning(n: int, rho: float, r: float, pins, reps: int, seed: int,
                              c_star: float | None = None,
                              method: str = "splitting") -> PinnedReport:
    """Estimate P(M_n <= r | sum = rho n, pins) and the pinned-block upper bound.

    The bound is r sqrt(min(q, n-q)) p_n 10^(100 m r) exp(C q / r^2) with the
    O(1) constant set to 1; it is evaluated in log space.  When ``c_star``
    is omitted it is the upper confidence limit of the fitted rate on the
    grid s = r^2 * (2, 4, 8, 16).
    """
    if r > math.sqrt(n):
        raise InvalidArgument(f"need r <= sqrt(n), got r={r}, n={n}")
    spec = ConditionedSequenceSpec(n, rho, pins=pins)
    q = n - spec.free_count
    m = len(spec.pins)
    if q > n - 10 * r:
        raise InvalidArgument(f"pinned count q={q} exceeds n - 10r")
    for a, vals in spec.pins:
        if abs(sum(vals) - rho * len(vals)) > 2 * r:
            raise InvalidArgument(f"pin block at {a} has centered sum beyond 2r")
    est = estimate_p(spec, r, reps, rng.mix(seed, 1), method)
    base = estimate_p(ConditionedSequenceSpec(n, rho), r, reps, rng.mix(seed, 0), method)
    if c_star is None:
        grid = [max(1, math.ceil(r * r * f)) for f in (2, 4, 8, 16)]
        c_star = fit_deviation_rate(rho, r, grid, reps, rng.mix(seed, 2), method).slope_ci[1]
    log_pn = math.log(base.p_hat) if base.p_hat > 0 else math.log(3 / reps)
    log_bound = (math.log(r * math.sqrt(max(min(q, n - q), 1))) + log_pn
                 + 100 * m * r * math.log(10) + c_star * q / r ** 2)
    return PinnedReport(est, base, float(c_star), q, m, log_bound)
