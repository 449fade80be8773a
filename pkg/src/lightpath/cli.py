"""Command line: ``lightpath {gen,solve,sweep,verify,tails,deviation}``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from . import analytics, deviation, experiments, solvers, verify
from .errors import CapacityExceeded, DomainError, InvalidArgument, InvalidPath
from .model import generate_instance, path_stats

TAIL_QUANTITIES = ("gamma_cdf", "bridge", "certificate", "union_bound")


def _gen(a):
    inst = generate_instance(a.n, a.edge_mean, a.seed, dense=False)
    print(inst.to_json())
    return 0


def _solve(a):
    inst = generate_instance(a.n, a.edge_mean, a.seed)
    rec = {"n": a.n, "seed": a.seed, "lambda": a.lam, "method": a.method}
    if a.method == "exact":
        prof = solvers.min_weight_per_length(inst)
        L = prof.longest_light(a.lam)
        wit = prof.witnesses.get(L)
    else:
        res = solvers.heuristic_search(inst, a.lam, a.budget, a.search_seed)
        L, wit = res.L, res.witness
        rec["budget_used"] = res.steps
    rec["L"] = L
    rec["witness"] = list(wit.vertices) if wit is not None and L > 0 else None
    if rec["witness"]:
        st = path_stats(inst, wit)
        rec["total_weight"] = st.total_weight
        rec["deviation"] = st.deviation
    if a.edge_mean is None:
        rec["upper_certificate"] = analytics.first_moment_upper_certificate(
            a.n, a.lam, experiments.CERT_FAIL_PROB)
    print(json.dumps(rec))
    return 0


def _sweep(a):
    try:
        with open(a.config) as fh:
            plan = experiments.ExperimentPlan.from_config(fh.read())
    except OSError as e:
        raise InvalidArgument(f"cannot read config: {e}") from None
    out = open(a.out, "w", newline="") if a.out else sys.stdout
    try:
        experiments.run_sweep(plan, out, include_timing=a.timing, workers=a.workers)
    finally:
        if a.out:
            out.close()
    return 0


def _verify(a):
    if a.max_n < 2:
        raise InvalidArgument("--max-n must be >= 2")
    if a.max_n > 8:
        raise CapacityExceeded("--max-n is capped at 8")
    rows = verify.run_all(a.max_n, a.seed)
    if a.json:
        print(json.dumps([r.__dict__ for r in rows], indent=2, default=str))
    else:
        print(f"{'suite':<22}{'result':<8}{'checked':>12}  counterexample")
        for r in rows:
            ce = "" if r.passed else str(r.counterexample)
            print(f"{r.name:<22}{'PASS' if r.passed else 'FAIL':<8}{r.checked:>12}  {ce}")
    return 0 if all(r.passed for r in rows) else 1


def _tails(a):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["quantity", "params", "value", "log_value"])

    def emit(params, log_value=None, value=None):
        if value is None:
            value = math.exp(log_value)
        if log_value is None:
            log_value = math.log(value) if value > 0 else -math.inf
        w.writerow([a.quantity, params, repr(float(value)), repr(float(log_value))])

    need = {"gamma_cdf": ("k", "z"), "bridge": ("delta",),
            "certificate": ("n", "lam"), "union_bound": ("n",)}[a.quantity]
    missing = [f"--{x.replace('lam', 'lambda')}" for x in need if getattr(a, x) is None]
    if missing:
        raise InvalidArgument(f"{a.quantity} needs {' '.join(missing)}")
    if a.quantity == "gamma_cdf":
        for z in a.z:
            emit(f"theta={a.theta};k={a.k};z={z}",
                 log_value=analytics.gamma_log_cdf((a.theta, a.k), z))
    elif a.quantity == "bridge":
        for d in a.delta:
            emit(f"delta={d};mode={a.mode}", value=analytics.bridge_lowertail(d, a.mode))
    elif a.quantity == "certificate":
        for lam in a.lam:
            c = analytics.first_moment_upper_certificate(a.n, lam, a.fail_prob)
            emit(f"n={a.n};lambda={lam};fail_prob={a.fail_prob}",
                 value=math.nan if c is None else c)
    else:
        emit(f"n={a.n}", log_value=analytics.atypical_union_bound(a.n))
    return 0


def _deviation(a):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["s", "r", "rho", "p_hat", "std_err", "reps"])
    for idx, s in enumerate(a.s_grid):
        est = deviation.estimate_p(deviation.ConditionedSequenceSpec(s, a.rho), a.r, a.reps,
                                   a.seed + idx, a.method, workers=a.workers)
        w.writerow([s, a.r, a.rho, repr(est.p_hat), repr(est.std_err), est.reps])
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lightpath",
                                description="Longest light paths in K_n with exponential weights.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="print an instance header (weights regenerate from it)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--edge-mean", type=float, default=None, help="default: n")
    g.set_defaults(fn=_gen)

    s = sub.add_parser("solve", help="L(n, lambda) for one seeded instance, as JSON")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--edge-mean", type=float, default=None)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--method", choices=("exact", "heuristic"), default="heuristic")
    s.add_argument("--budget", type=int, default=solvers.DEFAULT_BUDGET)
    s.add_argument("--search-seed", type=int, default=0)
    s.set_defaults(fn=_solve)

    w = sub.add_parser("sweep", help="run a key=value plan file, CSV to stdout or --out")
    w.add_argument("--config", required=True)
    w.add_argument("--out")
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--timing", action="store_true", help="add runtime_ms (breaks byte-identity)")
    w.set_defaults(fn=_sweep)

    v = sub.add_parser("verify", help="exhaustive small-n identity and solver suites")
    v.add_argument("--max-n", type=int, default=7)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(fn=_verify)

    t = sub.add_parser("tails", help="analytic tail values as CSV")
    t.add_argument("--quantity", choices=TAIL_QUANTITIES, required=True)
    t.add_argument("--theta", type=float, default=1.0)
    t.add_argument("--k", type=int)
    t.add_argument("--z", type=float, nargs="+")
    t.add_argument("--delta", type=float, nargs="+")
    t.add_argument("--mode", choices=("series", "asymptotic"), default="series")
    t.add_argument("--n", type=int)
    t.add_argument("--lambda", dest="lam", type=float, nargs="+")
    t.add_argument("--fail-prob", type=float, default=0.01)
    t.set_defaults(fn=_tails)

    d = sub.add_parser("deviation", help="estimates of p_s = P(M_s <= r) as CSV")
    d.add_argument("--rho", type=float, default=1.0)
    d.add_argument("--r", type=float, default=2.0)
    d.add_argument("--s-grid", type=int, nargs="+", required=True)
    d.add_argument("--reps", type=int, default=100_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--method", choices=("splitting", "naive"), default="splitting")
    d.add_argument("--workers", type=int, default=1)
    d.set_defaults(fn=_deviation)
    return p


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (InvalidArgument, InvalidPath, DomainError, CapacityExceeded) as e:
        print(f"lightpath {args.command}: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
