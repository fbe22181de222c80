"""
Metric exponents of the cat map
===============================

Bowen-ball distortion growth on the torus, read off at three ball sizes.
"""

import math

from bowenlyap import Point, ToralAutomorphism, point_exponents

cat = ToralAutomorphism([[2, 3], [3, 5]], metric="eigen")
print("unstable eigenvalue", cat.lam_u, "log", math.log(cat.lam_u))

x = Point.torus(0.3141592653589793, 0.2718281828459045)
report = point_exponents(cat, x, n_max=8, count=512)

# one row per (delta, n); the columns match the CSV export
for run in report.runs:
    last = run.rows[7]
    print(f"delta={run.delta:g}  n={last.n}  logA/n={last.logA_over_n:.7f}  loga/n={last.loga_over_n:.7f}")

print("Lambda+ =", report.Lambda_plus, " lambda+ =", report.lambda_plus)
print("Lambda- =", report.Lambda_minus, " lambda- =", report.lambda_minus)
print("converged at delta", report.delta_used)
