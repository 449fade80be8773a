"""Seeded sweeps over (n, lambda) grids and scaling fits of the measured L.

Seeds: replicate ``r`` at size ``n`` uses the instance seed
``mix(base_seed, n, r)`` for every lambda, so one graph is shared along the
lambda grid.  The heuristic stream of a record is
``mix(base_seed, n, lambda_index, r)``.  Lambda grids are stored in
increasing order of lambda, and the heuristic warm-starts each lambda from
the previous witness, which makes L nondecreasing along the grid.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy import stats

from . import rng
from .analytics import INV_E, first_moment_upper_certificate
from .errors import InvalidArgument
from .model import generate_instance
from .solvers import DEFAULT_BUDGET, EXACT_CAP, heuristic_search, min_weight_per_length

CSV_VERSION = 1
CSV_HEADER = f"# lightpath-sweep v{CSV_VERSION}"
LAMBDA_FORMS = ("absolute", "window", "subcritical")
METHODS = ("exact", "heuristic", "both")
CERT_FAIL_PROB = 0.01


@dataclass(frozen=True)
class ExperimentPlan:
    """A sweep over ``n_grid`` x lambda grid x replicates.

    ``lambda_form`` picks how ``lambda_values`` are read: ``absolute``
    values are lambda itself, ``window`` values are x in
    1/e + x (ln n)^-2, and ``subcritical`` values are eps in 1/e - eps.
    """

    n_grid: tuple
    lambda_form: str
    lambda_values: tuple
    replicates: int = 1
    method: str = "heuristic"
    budget: int = DEFAULT_BUDGET
    base_seed: int = 0
    warm_start: bool = True

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        vals = [float(v) for v in self.lambda_values]
        # store in increasing lambda order; subcritical eps runs the other way
        vals.sort(reverse=self.lambda_form == "subcritical")
        object.__setattr__(self, "lambda_values", tuple(vals))
        if not self.n_grid:
            raise InvalidArgument("n_grid is empty")
        if not vals:
            raise InvalidArgument("lambda list is empty")
        if min(self.n_grid) < 2:
            raise InvalidArgument("every n must be >= 2")
        if self.lambda_form not in LAMBDA_FORMS:
            raise InvalidArgument(f"lambda_form must be one of {LAMBDA_FORMS}")
        if self.method not in METHODS:
            raise InvalidArgument(f"method must be one of {METHODS}")
        if self.method != "heuristic" and max(self.n_grid) > EXACT_CAP:
            raise InvalidArgument(f"exact method needs n <= {EXACT_CAP}")
        if self.replicates < 1 or self.budget < 1:
            raise InvalidArgument("replicates and budget must be positive")

    def lambdas(self, n: int) -> list[float]:
        if self.lambda_form == "absolute":
            return list(self.lambda_values)
        if self.lambda_form == "window":
            return [INV_E + x / math.log(n) ** 2 for x in self.lambda_values]
        return [INV_E - e for e in self.lambda_values]

    @classmethod
    def from_config(cls, text: str) -> "ExperimentPlan":
        """Parse flat ``key = value`` lines; lists are comma separated, ``#`` starts a comment."""
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidArgument(f"line {lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            raw[k] = v
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise InvalidArgument(f"unknown config keys: {sorted(unknown)}")
        for key in ("n_grid", "lambda_form", "lambda_values"):
            if key not in raw:
                raise InvalidArgument(f"config is missing {key}")

        def as_list(v, cast):
            return [cast(x) for x in v.split(",") if x.strip()]

        try:
            kw = dict(n_grid=as_list(raw["n_grid"], int), lambda_form=raw["lambda_form"],
                      lambda_values=as_list(raw["lambda_values"], float))
            for k in ("replicates", "budget", "base_seed"):
                if k in raw:
                    kw[k] = int(raw[k], 0)
            if "method" in raw:
                kw["method"] = raw["method"]
            if "warm_start" in raw:
                kw["warm_start"] = raw["warm_start"].lower() in ("1", "true", "yes", "on")
        except ValueError as e:
            raise InvalidArgument(f"bad config value: {e}") from None
        return cls(**kw)


@dataclass
class ExperimentRecord:
    n: int
    lam: float
    lambda_index: int
    replicate: int
    seed: int             # instance seed
    search_seed: int      # heuristic stream; equals seed for exact records
    method: str
    L: int
    upper_certificate: int | None
    budget_used: int
    runtime_ms: float = math.nan


_COLUMNS = [f.name for f in fields(ExperimentRecord)]


def _run_cell(plan: ExperimentPlan, n_idx: int, replicate: int) -> list[ExperimentRecord]:
    """All records of one (n, replicate) pair, lambda grid in increasing order."""
    n = plan.n_grid[n_idx]
    seed = rng.mix(plan.base_seed, n, replicate)
    inst = generate_instance(n, seed=seed)
    methods = ["exact", "heuristic"] if plan.method == "both" else [plan.method]
    profile = None
    if "exact" in methods:
        t0 = time.perf_counter()
        profile = min_weight_per_length(inst, witnesses=False)
        dp_ms = (time.perf_counter() - t0) * 1e3
    out = []
    prev = None
    for li, lam in enumerate(plan.lambdas(n)):
        cert = first_moment_upper_certificate(n, lam, CERT_FAIL_PROB)
        for m in methods:
            if m == "exact":
                t0 = time.perf_counter()
                L = profile.longest_light(lam)
                ms = dp_ms + (time.perf_counter() - t0) * 1e3
                out.append(ExperimentRecord(n, lam, li, replicate, seed, seed, m, L, cert, 0, ms))
            else:
                s2 = rng.mix(plan.base_seed, n, li, replicate)
                t0 = time.perf_counter()
                res = heuristic_search(inst, lam, plan.budget, s2,
                                       start=prev if plan.warm_start else None)
                ms = (time.perf_counter() - t0) * 1e3
                prev = res.witness if res.witness is not None else prev
                out.append(ExperimentRecord(n, lam, li, replicate, seed, s2, m, res.L, cert,
                                            res.steps, ms))
    return out


def _cell_args(plan):
    return [(plan, i, r) for i in range(len(plan.n_grid)) for r in range(plan.replicates)]


class _CsvSink:
    def __init__(self, out: TextIO, include_timing: bool):
        self.cols = _COLUMNS if include_timing else [c for c in _COLUMNS if c != "runtime_ms"]
        self.out = out
        out.write(CSV_HEADER + "\n")
        self.w = csv.writer(out, lineterminator="\n")
        self.w.writerow(self.cols)

    def write(self, rec: ExperimentRecord):
        row = []
        for c in self.cols:
            v = getattr(rec, c)
            row.append("" if v is None else repr(v) if isinstance(v, float) else v)
        self.w.writerow(row)
        self.out.flush()


def run_sweep(plan: ExperimentPlan, out: TextIO | None = None, include_timing: bool = False,
              workers: int = 1) -> list[ExperimentRecord]:
    """Run every (n, lambda, replicate) of the plan; optionally stream CSV to ``out``.

    Records come out ordered by (n index, replicate, lambda index, method)
    whatever ``workers`` is.  Without ``include_timing`` the CSV is
    byte-identical across reruns.
    """
    sink = _CsvSink(out, include_timing) if out is not None else None
    records: list[ExperimentRecord] = []
    args = _cell_args(plan)
    if workers > 1:
        ex = ProcessPoolExecutor(workers)
        chunks = ex.map(_run_cell, *zip(*args))
    else:
        ex = None
        chunks = (_run_cell(*a) for a in args)
    try:
        for chunk in chunks:
            for rec in chunk:
                if sink:
                    sink.write(rec)
                records.append(rec)
    finally:
        if ex is not None:
            ex.shutdown()
    return records


def read_records(text: str) -> list[ExperimentRecord]:
    """Parse CSV written by :func:`run_sweep`."""
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise InvalidArgument("not a lightpath sweep CSV (missing or wrong version header)")
    recs = []
    for row in csv.DictReader(io.StringIO("\n".join(lines[1:]))):
        cert = row["upper_certificate"]
        recs.append(ExperimentRecord(
            int(row["n"]), float(row["lam"]), int(row["lambda_index"]), int(row["replicate"]),
            int(row["seed"]), int(row["search_seed"]), row["method"], int(row["L"]),
            int(cert) if cert else None, int(row["budget_used"]),
            float(row.get("runtime_ms") or "nan")))
    return recs


# -- scaling fits ------------------------------------------------------------------

REGIMES = ("critical", "subcritical", "supercritical")
THEORY = {
    "critical": "L between c (ln n)^3 and C (ln n)^3: exponent of ln ln n is 3",
    "subcritical": "L of order (1/e - lam)^-1 ln n: slope of L (1/e - lam) on ln n is constant",
    "supercritical": "L at least n^(1/4) and at most C n (lam - 1/e): exponent in [1/4, 1]",
}


@dataclass
class FitReport:
    regime: str
    estimate: float
    ci: tuple[float, float]
    n_values: list
    groups: dict = field(default_factory=dict)
    lower_bound_only: bool = False
    theory: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, default=float)


def _linfit(x, y, level=0.95):
    x, y = np.asarray(x, float), np.asarray(y, float)
    fit = stats.linregress(x, y)
    dof = len(x) - 2
    if dof > 0 and np.isfinite(fit.stderr):
        h = stats.t.ppf(0.5 + level / 2, dof) * fit.stderr
    else:
        h = math.inf
    return float(fit.slope), (float(fit.slope - h), float(fit.slope + h)), float(fit.intercept)


def fit_scaling(records: Iterable[ExperimentRecord], regime: str, level: float = 0.95) -> FitReport:
    """Fit the measured L against the growth law of ``regime``.

    critical: ln L on ln ln n; subcritical: L eps on ln n separately for each
    eps = 1/e - lam, reporting every slope and their max/min ratio;
    supercritical: ln L on ln n.  L is averaged over replicates first and
    zero values are dropped from log fits.  Heuristic values are lower
    bounds on L, which the report flags.
    """
    if regime not in REGIMES:
        raise InvalidArgument(f"regime must be one of {REGIMES}")
    recs = list(records)
    ns = sorted({r.n for r in recs})
    if len(ns) < 3:
        raise InvalidArgument("need at least three distinct n")
    lower = any(r.method == "heuristic" for r in recs)

    def mean_by(keyf, pred=lambda r: True):
        acc: dict = {}
        for r in recs:
            if pred(r):
                acc.setdefault(keyf(r), []).append(float(r.L))
        return {k: float(np.mean(v)) for k, v in sorted(acc.items())}

    if regime == "subcritical":
        groups = {}
        for eps in sorted({round(INV_E - r.lam, 12) for r in recs}):
            if eps <= 0:
                raise InvalidArgument("subcritical records need lambda < 1/e")
            m = mean_by(lambda r: r.n, lambda r: round(INV_E - r.lam, 12) == eps)
            if len(m) < 3:
                raise InvalidArgument(f"eps={eps}: need at least three distinct n")
            slope, ci, icpt = _linfit(np.log(list(m)), np.array(list(m.values())) * eps, level)
            groups[repr(eps)] = {"slope": slope, "ci": ci, "intercept": icpt, "mean_L": m}
        slopes = [g["slope"] for g in groups.values()]
        ratio = max(slopes) / min(slopes) if min(slopes) > 0 else math.inf
        return FitReport(regime, float(np.mean(slopes)), (min(slopes), max(slopes)), ns,
                         {"per_eps": groups, "slope_ratio": ratio}, lower, THEORY[regime])

    m = {n: L for n, L in mean_by(lambda r: r.n).items() if L > 0}
    if len(m) < 3:
        raise InvalidArgument("need at least three distinct n with L > 0")
    x = np.log(list(m))
    if regime == "critical":
        x = np.log(x)
    slope, ci, icpt = _linfit(x, np.log(list(m.values())), level)
    return FitReport(regime, slope, ci, ns, {"intercept": icpt, "mean_L": m}, lower, THEORY[regime])
