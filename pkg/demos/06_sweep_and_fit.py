"""A reproducible sweep and a scaling fit in the subcritical regime.

The same plan can be run from the shell with
``lightpath sweep --config demos/sweep_subcritical.cfg``; the CSV is
byte-identical across runs and worker counts.
"""
import io
import os
from pathlib import Path

from lightpath import ExperimentPlan, fit_scaling, read_records, run_sweep

plan = ExperimentPlan.from_config((Path(__file__).parent / "sweep_subcritical.cfg").read_text())
buf = io.StringIO()
run_sweep(plan, buf, workers=os.cpu_count() or 1)
records = read_records(buf.getvalue())
print(buf.getvalue().splitlines()[1])
print(f"{len(records)} records")

rep = fit_scaling(records, "subcritical")
print(f"\nL * eps against ln n, per eps (theory: a constant slope):")
for eps, g in sorted(rep.groups["per_eps"].items()):
    print(f"  eps = {eps}: slope {g['slope']:.2f}")
print("largest / smallest slope:", round(rep.groups["slope_ratio"], 2))
print("heuristic values are lower bounds only:", rep.lower_bound_only)
