"""
How many samples does a multicalibration audit need?
=====================================================

The finite-class bound next to the lower bound, and how each reacts to the
thresholds.
"""

import numpy as np

from multical import BoundParams, achievable_epsilon, finite_class_bound, graph_dim_bound, lower_bound

p = BoundParams(epsilon=0.1, delta=0.1, gamma=0.2, psi=0.2, lam=0.25, card_gamma=4, card_h=16)
print("finite class:", finite_class_bound(p))
print("lower bound :", lower_bound(p))
print("graph dim d=3, |Y|=4:", graph_dim_bound(p.replace(d=3, card_y=4)))

# each threshold halved in turn
for name in ("epsilon", "gamma", "psi"):
    q = p.replace(**{name: getattr(p, name) / 2})
    print(f"{name} halved: x{finite_class_bound(q) / finite_class_bound(p):.2f}")

# the other direction: what accuracy does a fixed budget buy
for m in np.logspace(4, 7, 4).astype(int):
    print(f"m={m:>9}: epsilon={achievable_epsilon(int(m), p):.4f}")
