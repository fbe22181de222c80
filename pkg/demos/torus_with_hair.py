"""
A negative top exponent
=======================

On the torus with a hair attached, every point near the fixed point q lies
on the hair and is pulled in at the stable rate, so even the maximal
distortion shrinks.
"""

import math

from bowenlyap import Point, TorusWithHair, point_exponents
from bowenlyap.space import sample_near

X = TorusWithHair(epsilon=0.5)
q = X.q
print("q is fixed:", X.forward(q) == q, " log(stable eigenvalue) =", math.log(X.lam))

# nearby points are all hair points: the torus is at distance epsilon
near = sample_near(X, q, 0.1, 200, seed=0)
print("charts within 0.1 of q:", sorted({p.chart.value for p in near}))

report = point_exponents(X, q, n_max=8, count=512)
print("Lambda+(q) =", report.Lambda_plus)

# a torus point of X behaves like the cat map
report = point_exponents(X, Point.torus(0.25, 0.6), n_max=8, count=512)
print("Lambda+ at a torus point =", report.Lambda_plus)
