"""The three synthetic scenarios: a halfspace, a Gaussian blob and a ring.

Each one is solved in the feature space that makes the class linearly
separable: raw coordinates, coordinates plus pairwise products, and RBF
kernel evaluations against 200 landmark points.
"""
import time

import numpy as np

from maxprob import Mode, ModeConfig, harden, transduce
from maxprob.data import draw_labeled, gen_gaussian, gen_halfspace, gen_ring, make_rng
from maxprob.evaluation import precision_recall

seed = 3
cases = [
    ("halfspace", gen_halfspace(seed, 300, 750), 100, ModeConfig(mode=Mode.LINEAR)),
    ("gaussian", gen_gaussian(seed, 300, 750), 100, ModeConfig(mode=Mode.SECOND_ORDER)),
    ("ring", gen_ring(seed, 450, 600), 150, ModeConfig(mode=Mode.KERNEL, landmarks=200)),
]

print(f"{'scenario':<10} {'mode':<13} {'rows':>5} {'mass':>8} {'precision':>10} {'recall':>8} {'ms':>7}")
for name, data, l, config in cases:
    labeled = draw_labeled(data, np.arange(len(data)), l, make_rng(seed, 1))
    t0 = time.perf_counter()
    labeling = transduce(data, labeled, config)
    ms = (time.perf_counter() - t0) * 1e3
    unlabeled = np.setdiff1d(np.arange(len(data)), labeled)
    p, r = precision_recall(harden(labeling), data.truth, unlabeled)
    print(f"{name:<10} {config.mode.value:<13} {labeling.problem.n_rows:>5} {labeling.objective:>8.2f} "
          f"{p:>10.3f} {r:>8.3f} {ms:>7.1f}")

# at most one fractional value per row survives at the optimum
for name, data, l, config in cases:
    labeled = draw_labeled(data, np.arange(len(data)), l, make_rng(seed, 1))
    lab = transduce(data, labeled, config)
    frac = int(np.count_nonzero((lab.values > 1e-7) & (lab.values < 1 - 1e-7)))
    print(f"{name:<10} fractional values: {frac} (rows: {lab.problem.n_rows})")
