"""The smallest interesting case: three points on a line.

Points -3, 1, 1 and a target mean of 0.  The largest fuzzy set with that
mean keeps both points at 1 and takes 2/3 of the point at -3, so the
optimum sits on a vertex with one fractional value (one row, one
fractional variable).
"""
import numpy as np

from maxprob import Dataset, ModeConfig, certify, recover_hyperplane, transduce

data = Dataset(np.array([[-3.0], [1.0], [1.0]]))

# a symmetric labeled pair fixes the mean at 0 without being part of the data
labeling = transduce(data, None, ModeConfig(epsilon=0.0), sample=[[-1.0], [1.0]])
print("fuzzy values  ", labeling.values)
print("total mass    ", labeling.objective)
print("row dual      ", labeling.solution.row_duals)

# the reduced cost of point i is 1 - y * (x_i - alpha); it vanishes at -3
report = certify(labeling.problem, labeling.solution)
for check in report.checks:
    print(f"{check.name:<24} {'ok' if check.passed else 'FAILED'}  worst {check.worst_violation:.1e}")

plane = recover_hyperplane(labeling.problem, labeling.solution, data)
print("hyperplane     x =", -plane.offset / plane.normal[0], " members on the side x >", -plane.offset / plane.normal[0])
