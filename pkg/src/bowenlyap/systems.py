"""Built-in example systems.

* :class:`ToralAutomorphism` -- hyperbolic linear maps of the 2-torus, with
  either the flat metric or the eigen-coordinate adapted metric.
* :class:`TorusWithHair` -- the torus plus one stable-manifold curve lifted
  off the torus, ``X = T^2 u H``, carrying a Lyapunov-stable fixed point ``q``.
* :class:`NorthSouthCircle` -- Moebius conjugate of ``x -> mu*x`` on the circle.
* :class:`IrrationalRotation` -- non-expansive isometric control.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotHyperbolic
from .space import (
    TWO_PI,
    Chart,
    DynamicalSystem,
    Germ,
    Point,
    circle_distance,
    flat_torus_distance,
    flat_torus_norm,
)

CAT_MATRIX = ((2, 3), (3, 5))
HAIR_H_MIN = 1e-6


def _eigvec(a, b, c, d, lam):
    if abs(b) >= abs(c) and b != 0:
        v = (float(b), lam - a)
    elif c != 0:
        v = (lam - d, float(c))
    else:
        v = (1.0, 0.0) if abs(a - lam) < abs(d - lam) else (0.0, 1.0)
    n = math.hypot(*v)
    return (v[0] / n, v[1] / n)


class ToralAutomorphism(DynamicalSystem):
    """``x -> A x mod 1`` for an integer matrix with det 1 and |trace| > 2.

    ``metric="ambient"`` uses the flat torus distance; ``metric="eigen"``
    uses the sup of the eigen-coordinates of the shortest lattice translate,
    under which ``f`` expands the unstable coordinate by exactly ``|lam_u|``.
    """

    name = "toral"

    def __init__(self, matrix=CAT_MATRIX, metric="ambient"):
        A = np.asarray(matrix)
        if A.shape != (2, 2) or not np.all(np.equal(np.mod(A, 1), 0)):
            raise NotHyperbolic("matrix must be a 2x2 integer matrix")
        a, b, c, d = (int(v) for v in A.ravel())
        det = a * d - b * c
        tr = a + d
        if det != 1 or abs(tr) <= 2:
            raise NotHyperbolic(f"det={det}, trace={tr}: not a hyperbolic automorphism")
        if metric not in ("ambient", "eigen"):
            raise ValueError(f"unknown metric {metric!r}")
        self.matrix = ((a, b), (c, d))
        self.metric = metric
        root = math.sqrt(tr * tr - 4)
        # larger-modulus root first; both share the sign of the trace
        self.lam_u = (tr + math.copysign(root, tr)) / 2
        self.lam_s = 1.0 / self.lam_u
        self.v_u = _eigvec(a, b, c, d, self.lam_u)
        self.v_s = _eigvec(a, b, c, d, self.lam_s)
        V = np.array([self.v_u, self.v_s]).T
        Vinv = np.linalg.inv(V)
        self.u_star = tuple(Vinv[0])
        self.s_star = tuple(Vinv[1])
        self._inv = ((d, -b), (-c, a))
        row_sum = max(abs(a) + abs(b), abs(c) + abs(d))
        self._grid = float(2 ** (52 - math.ceil(math.log2(row_sum + 1))))
        self.rate = abs(self.lam_u)
        self.rate_hint = self.rate
        self.shortest_lattice = self._shortest_lattice()
        if metric == "eigen":
            self.lipschitz = self.rate
            self.adapted_k = self.rate
            self.epsilon0 = self.shortest_lattice / 4
        else:
            self.lipschitz = float(np.linalg.norm(np.array(self.matrix, float), 2))

    def with_metric(self, metric):
        return ToralAutomorphism(self.matrix, metric)

    def descriptor(self):
        return {"type": "toral", "matrix": [list(r) for r in self.matrix], "metric": self.metric}

    # -- eigen coordinates -------------------------------------------------
    def eigen_coords(self, w):
        return (w[0] * self.u_star[0] + w[1] * self.u_star[1],
                w[0] * self.s_star[0] + w[1] * self.s_star[1])

    def lift(self, offset):
        al, be = offset
        return (al * self.v_u[0] + be * self.v_s[0], al * self.v_u[1] + be * self.v_s[1])

    def _eigen_norm(self, w):
        du, dv = w
        du -= math.floor(du + 0.5)
        dv -= math.floor(dv + 0.5)
        best = math.inf
        for m in (-1.0, 0.0, 1.0):
            for n in (-1.0, 0.0, 1.0):
                al, be = self.eigen_coords((du + m, dv + n))
                best = min(best, max(abs(al), abs(be)))
        return best

    def _shortest_lattice(self):
        best = math.inf
        for m in range(-6, 7):
            for n in range(-6, 7):
                if m or n:
                    al, be = self.eigen_coords((m, n))
                    best = min(best, max(abs(al), abs(be)))
        return best

    def vector_norm(self, w):
        """Metric length of the torus displacement represented by ``w``."""
        if self.metric == "eigen":
            return self._eigen_norm(w)
        return flat_torus_norm(*w)

    def germ_norm(self, offset):
        al, be = offset
        if self.metric == "eigen":
            m = max(abs(al), abs(be))
            if m <= self.shortest_lattice / 2:
                return m
        else:
            w = self.lift(offset)
            e = math.hypot(*w)
            if e <= 0.5:
                return e
        return self.vector_norm(self.lift(offset))

    # -- dynamics ----------------------------------------------------------
    def _apply(self, M, c):
        return (M[0][0] * c[0] + M[0][1] * c[1], M[1][0] * c[0] + M[1][1] * c[1])

    def _snap(self, c):
        # on this dyadic grid the integer map and mod 1 are exact, so orbits invert bit-for-bit
        g = self._grid
        return (round(c[0] * g) / g, round(c[1] * g) / g)

    def _step(self, p, M, su, ss):
        coords = self._snap(self._apply(M, p.coords))
        germ = None
        if p.germ is not None:
            anchor = Point(Chart.TORUS2, self._snap(self._apply(M, p.germ.anchor))).coords
            al, be = p.germ.offset[0] * su, p.germ.offset[1] * ss
            # past lattice scale the coordinates are as good as the offset; drop it before it overflows
            if max(abs(al), abs(be)) <= 1.0:
                germ = Germ(anchor, (al, be))
        return Point(Chart.TORUS2, coords, germ)

    def forward(self, p):
        return self._step(p, self.matrix, self.lam_u, self.lam_s)

    def backward(self, p):
        return self._step(p, self._inv, self.lam_s, self.lam_u)

    def distance(self, p, q):
        gp, gq = p.germ, q.germ
        if gq is not None and gq.anchor == p.coords:
            return self.germ_norm(gq.offset)
        if gp is not None and gp.anchor == q.coords:
            return self.germ_norm(gp.offset)
        if gp is not None and gq is not None and gp.anchor == gq.anchor:
            return self.germ_norm((gq.offset[0] - gp.offset[0], gq.offset[1] - gp.offset[1]))
        return self.vector_norm((q.coords[0] - p.coords[0], q.coords[1] - p.coords[1]))

    def contains(self, p):
        return p.chart is Chart.TORUS2

    def _offset_point(self, x, offset):
        w = self.lift(offset)
        return Point(Chart.TORUS2, (x.coords[0] + w[0], x.coords[1] + w[1]), Germ(x.coords, offset))

    def displace(self, x, r, u):
        phi = TWO_PI * u
        w = (r * math.cos(phi), r * math.sin(phi))
        return self._offset_point(x, self.eigen_coords(w))

    def n_directions(self, x):
        return 4

    def probe(self, x, r, k):
        offset = ((r, 0.0), (-r, 0.0), (0.0, r), (0.0, -r))[k]
        return self._offset_point(x, offset)

    def random_point(self, rng):
        u, v = rng.uniform(0.0, 1.0, size=2)
        return Point(Chart.TORUS2, (u, v))

    def jacobian(self, p):
        return np.array(self.matrix, dtype=float)


def make_toral(matrix, metric="ambient") -> ToralAutomorphism:
    return ToralAutomorphism(matrix, metric)


class TorusWithHair(DynamicalSystem):
    """The space ``X = T^2 u H`` with the extension of a hyperbolic toral map.

    Hair points carry their curve parameter ``t``; the point ``t`` sits above
    the torus point ``t * v_p mod 1`` at height ``epsilon / (t^2 + 1)``, where
    ``v_p`` is the contracting eigenvector scaled to first coordinate 1.
    Distances are the product of the flat torus metric and the height gap.
    """

    name = "torus_with_hair"

    def __init__(self, matrix=CAT_MATRIX, epsilon=0.5):
        if not 0 < epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        self.base = ToralAutomorphism(matrix, "ambient")
        self.epsilon = float(epsilon)
        self.lam = self.base.lam_s
        vs = self.base.v_s
        self.v_p = (1.0, vs[1] / vs[0]) if vs[0] != 0 else vs
        self.vp_norm = math.hypot(*self.v_p)
        self.t_max = math.sqrt(self.epsilon / HAIR_H_MIN) - 1
        self.rate_hint = self.base.rate
        self.q = Point.hair(0.0)

    def descriptor(self):
        return {"type": "torus_with_hair", "matrix": [list(r) for r in self.base.matrix],
                "epsilon": self.epsilon}

    def height(self, t):
        return self.epsilon / (t * t + 1.0)

    def shadow(self, t):
        return Point(Chart.TORUS2, (t * self.v_p[0], t * self.v_p[1])).coords

    def forward(self, p):
        if p.chart is Chart.HAIR:
            return Point(Chart.HAIR, (self.lam * p.coords[0],))
        return self.base.forward(p)

    def backward(self, p):
        if p.chart is Chart.HAIR:
            return Point(Chart.HAIR, (p.coords[0] / self.lam,))
        return self.base.backward(p)

    def distance(self, p, q):
        if p.chart is Chart.TORUS2 and q.chart is Chart.TORUS2:
            return self.base.distance(p, q)
        if p.chart is Chart.HAIR and q.chart is Chart.HAIR:
            t1, t2 = p.coords[0], q.coords[0]
            dt = t2 - t1
            d_torus = flat_torus_norm(dt * self.v_p[0], dt * self.v_p[1])
            dh = self.epsilon * dt * (t1 + t2) / ((1.0 + t1 * t1) * (1.0 + t2 * t2))
            return math.hypot(d_torus, dh)
        if p.chart is Chart.HAIR:
            p, q = q, p
        t = q.coords[0]
        return math.hypot(flat_torus_distance(p.coords, self.shadow(t)), self.height(t))

    def contains(self, p):
        return p.chart in (Chart.TORUS2, Chart.HAIR)

    def speed(self, t):
        dh = -2.0 * self.epsilon * t / (1.0 + t * t) ** 2
        return math.hypot(self.vp_norm, dh)

    def _hair_offset(self, x, r, sign):
        t0 = x.coords[0]
        t = t0 + sign * r / self.speed(t0)
        return Point(Chart.HAIR, (min(max(t, -self.t_max), self.t_max),))

    def displace(self, x, r, u):
        if x.chart is Chart.HAIR:
            return self._hair_offset(x, r, 1.0 if u < 0.5 else -1.0)
        return self.base.displace(x, r, u)

    def n_directions(self, x):
        return 2 if x.chart is Chart.HAIR else self.base.n_directions(x)

    def probe(self, x, r, k):
        if x.chart is Chart.HAIR:
            return self._hair_offset(x, r, (1.0, -1.0)[k])
        return self.base.probe(x, r, k)

    def random_point(self, rng):
        if rng.uniform() < 0.5:
            return self.base.random_point(rng)
        mag = math.exp(rng.uniform(math.log(1e-4), math.log(self.t_max)))
        return Point.hair(mag if rng.uniform() < 0.5 else -mag)


def hair_map(system: TorusWithHair, t: float, n: int) -> float:
    """Hair parameter of ``f^n`` applied to the hair point ``t``."""
    return system.lam ** n * t


def hair_distance(system: TorusWithHair, p: Point, q: Point) -> float:
    return system.distance(p, q)


class _CircleSystem(DynamicalSystem):
    def distance(self, p, q):
        return circle_distance(p.coords[0], q.coords[0])

    def contains(self, p):
        return p.chart is Chart.CIRCLE

    def displace(self, x, r, u):
        return Point.circle(x.coords[0] + (r if u < 0.5 else -r))

    def n_directions(self, x):
        return 2

    def probe(self, x, r, k):
        return Point.circle(x.coords[0] + (r, -r)[k])

    def random_point(self, rng):
        return Point.circle(rng.uniform(0.0, TWO_PI))


class NorthSouthCircle(_CircleSystem):
    """``theta -> 2 atan(mu tan(theta/2))``: repeller at 0, attractor at pi."""

    name = "north_south"

    def __init__(self, mu=2.0):
        if not mu > 1:
            raise ValueError("mu must exceed 1")
        self.mu = float(mu)
        self.lipschitz = self.mu
        self.rate_hint = self.mu

    def descriptor(self):
        return {"type": "north_south", "mu": self.mu}

    # Points carry a chart value: chart 0 holds tan(theta/2), chart 1 holds
    # tan((theta - pi)/2), with |value| <= 1. In either chart the map is
    # multiplication by mu (resp. 1/mu), so orbits and small separations near
    # both fixed points stay exact instead of losing bits against 2*pi.
    def _local(self, p):
        if p.germ is not None:
            return p.germ.offset
        th = p.coords[0]
        if th <= 0.5 * math.pi or th >= 1.5 * math.pi:
            return (0, math.tan(0.5 * (th if th < math.pi else th - TWO_PI)))
        return (1, math.tan(0.5 * (th - math.pi)))

    def _make(self, chart, v):
        if abs(v) > 1.0:
            chart, v = 1 - chart, -1.0 / v
        centre = 0.0 if chart == 0 else math.pi
        return Point(Chart.CIRCLE, (centre + 2.0 * math.atan(v),), Germ((), (chart, v)))

    def _step(self, p, m):
        chart, v = self._local(p)
        return self._make(chart, v * m if chart == 0 else v / m)

    def forward(self, p):
        return self._step(p, self.mu)

    def backward(self, p):
        return self._step(p, 1.0 / self.mu)

    def distance(self, p, q):
        cp, vp = self._local(p)
        cq, vq = self._local(q)
        if cp == cq:
            # both within a quarter turn of the same centre: the chart arc is the short arc
            return abs(2.0 * math.atan(vp) - 2.0 * math.atan(vq))
        return circle_distance(p.coords[0], q.coords[0])

    def _shifted(self, x, r):
        if abs(r) >= 1.0:
            return Point.circle(x.coords[0] + r)
        chart, v = self._local(x)
        return self._make(chart, math.tan(math.atan(v) + 0.5 * r))

    def displace(self, x, r, u):
        return self._shifted(x, r if u < 0.5 else -r)

    def probe(self, x, r, k):
        return self._shifted(x, (r, -r)[k])

    def derivative(self, theta, inverse=False):
        m = 1.0 / self.mu if inverse else self.mu
        h = 0.5 * theta
        return m / (math.cos(h) ** 2 + m * m * math.sin(h) ** 2)

    def jacobian(self, p):
        return np.array([[self.derivative(p.coords[0])]])

    def grid_lipschitz(self, m=1000):
        """Largest derivative of ``f`` and ``f^-1`` on an ``m``-point grid (includes 0 and pi)."""
        grid = np.linspace(0.0, TWO_PI, m, endpoint=False)
        return max(max(self.derivative(t), self.derivative(t, inverse=True)) for t in grid)


class IrrationalRotation(_CircleSystem):
    """Rigid rotation by ``alpha``; an isometry, hence not expansive."""

    name = "rotation"
    lipschitz = 1.0
    rate_hint = 1.0

    def __init__(self, alpha=(math.sqrt(5) - 1) * math.pi):
        self.alpha = float(alpha)

    def descriptor(self):
        return {"type": "rotation", "alpha": self.alpha}

    def _shift(self, p, a):
        germ = None
        if p.germ is not None:
            germ = Germ(Point.circle(p.germ.anchor[0] + a).coords, p.germ.offset)
        return Point(Chart.CIRCLE, (p.coords[0] + a,), germ)

    def forward(self, p):
        return self._shift(p, self.alpha)

    def backward(self, p):
        return self._shift(p, -self.alpha)

    def distance(self, p, q):
        gp, gq = p.germ, q.germ
        off = None
        if gq is not None and gq.anchor == p.coords:
            off = gq.offset[0]
        elif gp is not None and gp.anchor == q.coords:
            off = gp.offset[0]
        elif gp is not None and gq is not None and gp.anchor == gq.anchor:
            off = gq.offset[0] - gp.offset[0]
        if off is not None and abs(off) <= math.pi:
            return abs(off)
        return circle_distance(p.coords[0], q.coords[0])

    def _offset_point(self, x, off):
        return Point(Chart.CIRCLE, (x.coords[0] + off,), Germ(x.coords, (off,)))

    def displace(self, x, r, u):
        return self._offset_point(x, r if u < 0.5 else -r)

    def probe(self, x, r, k):
        return self._offset_point(x, (r, -r)[k])

    def jacobian(self, p):
        return np.array([[1.0]])


def from_descriptor(desc: dict, metric: str | None = None) -> DynamicalSystem:
    """Build a system from a JSON descriptor ``{"type": ..., ...}``."""
    kind = desc.get("type")
    if kind == "toral":
        m = metric or desc.get("metric", "ambient")
        return ToralAutomorphism(desc.get("matrix", CAT_MATRIX), "eigen" if m in ("adapted", "eigen") else "ambient")
    if kind == "torus_with_hair":
        return TorusWithHair(desc.get("matrix", CAT_MATRIX), desc.get("epsilon", 0.5))
    if kind == "north_south":
        return NorthSouthCircle(desc.get("mu", 2.0))
    if kind == "rotation":
        return IrrationalRotation(desc.get("alpha", (math.sqrt(5) - 1) * math.pi))
    raise KeyError(f"type: unknown system type {kind!r}")
