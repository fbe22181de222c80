"""
Sets that attract and sets that repel
=====================================

Distance-to-set distortion decides the label; a direct basin count is
printed next to it as an independent check.
"""

import math

from bowenlyap import NorthSouthCircle, Point, TorusWithHair
from bowenlyap.invariant_sets import InvariantSet, classify, set_exponents

X = TorusWithHair(epsilon=0.5)
ns = NorthSouthCircle(2.0)
cases = {
    "{q} in X": (X, InvariantSet.finite(X, [X.q])),
    "torus in X": (X, InvariantSet.torus_in(X)),
    "{pi} north-south": (ns, InvariantSet.finite(ns, [Point.circle(math.pi)])),
    "{0} north-south": (ns, InvariantSet.finite(ns, [Point.circle(0.0)])),
}

for name, (system, K) in cases.items():
    rep = set_exponents(system, K, n_max=8, count=512)
    c = classify(system, K, rep)
    print(f"{name:18s} {c.label.value:9s} Lambda+={c.Lambda_plus:+.4f} Lambda-={c.Lambda_minus:+.4f} "
          f"basin={c.basin_fraction:.2f} literal-rule-says-repeller={c.literal_repeller_hypothesis}")
