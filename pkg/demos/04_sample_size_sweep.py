"""Precision and recall as the labeled sample grows.

A scaled-down version of the repeated split protocol: split the data into
a pool T and an evaluation set S, draw the labeled sample from the class
members of T, solve over S, score S.  Recall climbs with the sample size
while its 10%-90% band narrows.
"""
from maxprob import ModeConfig
from maxprob.data import gen_halfspace
from maxprob.evaluation import SweepConfig, aggregate, run_sweep

data = gen_halfspace(2000, 800, 1200)
config = SweepConfig(sizes=(25, 50, 100, 200, 300), repetitions=10, base_seed=1,
                     mode=ModeConfig(), t_size=1000, s_size=1000, threads=4)
rows = aggregate(run_sweep(data, config))

print(f"{'l':>4} {'metric':<10} {'mean':>6} {'q10':>6} {'q90':>6}")
for row in rows:
    print(f"{row.sample_size:>4} {row.metric:<10} {row.mean:>6.3f} {row.q10:>6.3f} {row.q90:>6.3f}")
