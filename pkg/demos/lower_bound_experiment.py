"""
Telling two coins apart
=======================

With few samples the two distributions of the audit demo cannot be told
apart, so no audit can certify multicalibration from them.
"""

from multical import BoundParams, build_lower_bound_fixture, lower_bound
from multical.convergence import run_distinguishing

f = build_lower_bound_fixture(0.1, 0.5, 0.5)
lb = lower_bound(BoundParams(epsilon=0.1, delta=0.01, gamma=0.5, psi=0.5))
print("lower bound:", lb)

for factor in (1 / 64, 1 / 16, 1 / 4, 1, 4):
    m = max(1, int(factor * lb))
    r = run_distinguishing(f, m, 500, master_seed=0)
    print(f"m={m:>5}: accuracy {r.accuracy:.3f} ({r.coin_flips} coin flips)")
