"""Hyperbolic adapted metrics and an empirical check of their defining inequality.

For linear toral maps the eigen-coordinate sup metric is exact
(``ToralAutomorphism(metric="eigen")``). For anything else a finite-cloud
surrogate is available: the pseudometric ``k**(-expansivity_time)`` followed
by shortest-path (chain) metrization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path

from .errors import CloudTooLarge
from .space import DynamicalSystem, Point, make_rng
from .systems import ToralAutomorphism

MAX_CLOUD = 5000
INFINITE = math.inf


class AdaptedMode(enum.Enum):
    EIGEN_EXACT = "eigen_exact"
    EXPANSIVITY_CHAIN = "expansivity_chain"


@dataclass(frozen=True)
class AdaptedMetricSpec:
    mode: AdaptedMode
    k: float
    epsilon0: float
    expansivity: float | None = None
    horizon: int | None = None
    cloud_size: int | None = None

    def __post_init__(self):
        if not self.k > 1:
            raise ValueError("k must exceed 1")
        if not self.epsilon0 > 0:
            raise ValueError("epsilon0 must be positive")
        if self.mode is AdaptedMode.EXPANSIVITY_CHAIN and (self.expansivity is None or self.horizon is None):
            raise ValueError("chain mode needs an expansivity constant and a horizon")

    @classmethod
    def for_toral(cls, system: ToralAutomorphism) -> "AdaptedMetricSpec":
        eig = system.with_metric("eigen")
        return cls(AdaptedMode.EIGEN_EXACT, eig.adapted_k, eig.epsilon0)


@dataclass
class HyperbolicityReport:
    pairs: int
    violations: int
    empirical_k: float
    lipschitz_K: float
    epsilon0: float
    k: float

    def to_json(self):
        return asdict(self)


def eigen_adapted_distance(system: ToralAutomorphism, p: Point, q: Point) -> float:
    if system.metric != "eigen":
        system = system.with_metric("eigen")
    return system.distance(p, q)


def expansivity_time(system: DynamicalSystem, p: Point, q: Point, c: float, n_max: int):
    """Largest ``n <= n_max`` with ``dist(f^j p, f^j q) <= c`` for all ``|j| <= n``.

    Returns ``math.inf`` when the pair is never separated within the horizon
    and ``-1`` when it is already separated at time 0.
    """
    if not c > 0 or n_max < 1:
        raise ValueError("need c > 0 and n_max >= 1")
    if system.distance(p, q) > c:
        return -1
    fp, fq, bp, bq = p, q, p, q
    for n in range(1, n_max + 1):
        fp, fq = system.forward(fp), system.forward(fq)
        bp, bq = system.backward(bp), system.backward(bq)
        if system.distance(fp, fq) > c or system.distance(bp, bq) > c:
            return n - 1
    return INFINITE


def expansivity_pseudometric(system, c, n_max, k_target=math.sqrt(2)):
    """``D(p, q) = k_target**(-expansivity_time)``; never-separated pairs get 0."""
    if not 1 < k_target <= math.sqrt(2):
        raise ValueError("k_target must lie in (1, sqrt 2]")

    def D(p, q):
        if p == q:
            return 0.0
        n = expansivity_time(system, p, q, c, n_max)
        return 0.0 if n == INFINITE else k_target ** (-n)

    return D


def chain_metric(cloud, D) -> np.ndarray:
    """Shortest-path metric on the complete graph over ``cloud`` weighted by ``D``.

    ``D`` is either a callable pseudometric or a precomputed square matrix.
    """
    n = len(cloud)
    if n > MAX_CLOUD:
        raise CloudTooLarge(f"cloud of {n} points exceeds {MAX_CLOUD}")
    if callable(D):
        W = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                W[i, j] = W[j, i] = D(cloud[i], cloud[j])
    else:
        W = np.array(D, dtype=float)
        if W.shape != (n, n):
            raise ValueError("distance table does not match cloud size")
    # zero weights are real edges of the pseudometric, only inf means "absent"
    graph = csgraph_from_dense(W, null_value=np.inf)
    return shortest_path(graph, method="D", directed=False)


def chain_failures(cloud, D_table) -> int:
    """Distinct cloud pairs at pseudo-distance 0 (expansiveness failures)."""
    D_table = np.asarray(D_table)
    iu = np.triu_indices(len(cloud), 1)
    return int(np.count_nonzero(D_table[iu] == 0.0))


def verify_hyperbolic_inequality(system: DynamicalSystem, n_pairs: int, seed: int,
                                 k: float | None = None, epsilon0: float | None = None,
                                 metric: str | None = None) -> HyperbolicityReport:
    """Sample close pairs and test ``max{d(fx,fy), d(f^-1x,f^-1y)} >= min{k d(x,y), eps0}``.

    Also records the largest observed one-step distortion of ``f`` and
    ``f^-1`` (a Lipschitz constant estimate).
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    if metric is not None and isinstance(system, ToralAutomorphism):
        system = system.with_metric("eigen" if metric in ("eigen", "adapted") else "ambient")
    k = k if k is not None else system.adapted_k
    eps0 = epsilon0 if epsilon0 is not None else (system.epsilon0 or 0.1)
    if k is None:
        raise ValueError("no k given and the system has no adapted constant")
    rng = make_rng(seed, 7)
    violations = 0
    emp_k = math.inf
    lip = 0.0
    tested = 0
    for _ in range(n_pairs):
        p = system.random_point(rng)
        r = math.exp(rng.uniform(math.log(eps0 * 1e-6), math.log(eps0)))
        u = rng.uniform()
        n_dirs = system.n_directions(p)
        # a quarter of the pairs lie along distinguished directions, where the sup is attained
        if n_dirs and rng.uniform() < 0.25:
            k_dir = int(u * n_dirs)
            make = lambda s: system.probe(p, s, k_dir)  # noqa: E731
        else:
            make = lambda s: system.displace(p, s, u)  # noqa: E731
        q = make(r)
        d = system.distance(p, q)
        for _ in range(60):
            if d < eps0:
                break
            r *= 0.5
            q = make(r)
            d = system.distance(p, q)
        if d == 0.0 or d >= eps0:
            continue
        tested += 1
        df = system.distance(system.forward(p), system.forward(q))
        db = system.distance(system.backward(p), system.backward(q))
        lhs = max(df, db)
        lip = max(lip, lhs / d)
        if lhs < min(k * d, eps0) * (1 - 1e-9):
            violations += 1
        if lhs < eps0:
            emp_k = min(emp_k, lhs / d)
    if emp_k == math.inf:
        emp_k = lip
    return HyperbolicityReport(tested, violations, float(emp_k), float(lip), float(eps0), float(k))
