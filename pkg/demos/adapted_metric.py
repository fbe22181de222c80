"""
Why the eigen metric is needed
==============================

The one-step expansion inequality holds for every close pair in the
eigen-coordinate metric and fails often in the flat metric.
"""

from bowenlyap import ToralAutomorphism
from bowenlyap.adapted import chain_metric, expansivity_pseudometric, verify_hyperbolic_inequality
from bowenlyap.space import make_rng

cat = ToralAutomorphism([[2, 3], [3, 5]])

for metric in ("eigen", "ambient"):
    rep = verify_hyperbolic_inequality(cat, 5000, seed=1, k=cat.lam_u, metric=metric)
    print(f"{metric:8s} pairs={rep.pairs} violations={rep.violations} K={rep.lipschitz_K:.9f}")

# the generic route: expansivity times turned into a metric on a small cloud
eig = cat.with_metric("eigen")
rng = make_rng(0)
cloud = [eig.random_point(rng) for _ in range(40)]
D = expansivity_pseudometric(eig, 0.1, 10)
d = chain_metric(cloud, D)
print("chain metric on 40 points, largest entry", d.max(), "smallest off-diagonal", d[d > 0].min())
