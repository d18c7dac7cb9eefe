"""
A reproducible comparison sweep
===============================

The same sweep is available from the command line:

    census --seed 3 sweep --config cfg.json --out report.csv
"""
from census import SweepConfig, run_compare_sweep
from census.harness import report_csv

cfg = SweepConfig(family="near_regular", sizes=[(6, 6), (8, 8), (10, 10)], density="1/2",
                  pattern="single_edge", seed=3, instances_per_size=2)
rows = run_compare_sweep(cfg)
print(report_csv(rows))

# %%
# Sizes beyond the exact engines keep their estimate and record the error.
[row] = run_compare_sweep(SweepConfig(sizes=[(30, 30)]))
print(row.estimate_log, row.errors)
