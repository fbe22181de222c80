"""
Metric versus derivative exponents
==================================
"""

from bowenlyap import IrrationalRotation, NorthSouthCircle, Point, ToralAutomorphism, point_exponents
from bowenlyap.classical import compare, jacobian_exponents

cases = [
    (ToralAutomorphism([[2, 3], [3, 5]], metric="eigen"), Point.torus(0.1, 0.8)),
    (IrrationalRotation(), Point.circle(2.0)),
    (NorthSouthCircle(2.0), Point.circle(3.0)),
]

for system, x in cases:
    chi = jacobian_exponents(system, x, 32)
    rep = point_exponents(system, x, n_max=8, count=256)
    cmp_ = compare(rep, chi, 0.1)
    print(f"{system.name:10s} chi=({chi.chi_max:+.6f}, {chi.chi_min:+.6f}) "
          f"metric=({rep.Lambda_plus:+.6f}, {rep.lambda_plus:+.6f}) pass={cmp_.passed}")
