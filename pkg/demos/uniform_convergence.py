"""
Empirical calibration errors converge uniformly
================================================

Draw samples of growing size from a random distribution and track the worst
gap between empirical and true calibration error over all interesting
categories of all predictors.
"""

import numpy as np

from multical import BoundParams, ConvergenceSetup, finite_class_bound
from multical.synthetic import random_setup

setup = random_setup(0, n_points=50, n_predictors=20, n_groups=5)
cs = ConvergenceSetup(setup.D, setup.H, setup.groups, setup.partition, gamma=0.2, psi=0.2)
print("interesting categories:", cs.n_interesting)

for m in (100, 1_000, 10_000, 100_000):
    sups = np.array([o.sup_deviation for o in cs.run(m, 50, master_seed=1)])
    finite = sups[np.isfinite(sups)]
    print(f"m={m:>6}: empty-category trials {np.sum(~np.isfinite(sups)):2d}, "
          f"median sup {np.median(finite) if finite.size else float('nan'):.4f}")

p = BoundParams(epsilon=0.1, delta=0.1, gamma=0.2, psi=0.2, lam=0.25, card_gamma=5, card_h=20)
print("the bound asks for", finite_class_bound(p), "samples at epsilon=0.1")
