"""
Auditing a predictor on two nearly identical distributions
===========================================================

Two distributions that differ only in the label bias of a single point.
The same predictor is perfectly multicalibrated on one and off by
``2 * epsilon`` on the other.
"""

from multical import audit, build_lower_bound_fixture, true_calibration_error

eps, gamma, psi = 0.1, 0.5, 0.5
f = build_lower_bound_fixture(eps, gamma, psi)

# the outcome tables: (point, label, probability)
for name, D in (("D1", f.D1), ("D2", f.D2)):
    print(name, [(o.point, o.label, round(float(o.prob), 4)) for o in D.support])

# the category where h predicts 1/2 + eps inside U
U, I = f.groups["U"], f.target_interval
print("error under D1:", true_calibration_error(f.h, U, I, f.D1))
print("error under D2:", true_calibration_error(f.h, U, I, f.D2))

# the verdict flips exactly at alpha = 2 eps
for alpha in (0.0, 0.19, 0.2):
    r1 = audit(f.h, f.groups, f.partition, alpha, gamma, psi, f.D1)
    r2 = audit(f.h, f.groups, f.partition, alpha, gamma, psi, f.D2)
    print(f"alpha={alpha}: D1 {r1.verdict}, D2 {r2.verdict}",
          [str(e.category) for e in r2.violations])
