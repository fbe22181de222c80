"""Points, homeomorphisms, orbits and candidate sampling.

Every concrete system in :mod:`bowenlyap.systems` derives from
:class:`DynamicalSystem`. Points are immutable and always carry reduced
coordinates; a point may additionally carry a :class:`Germ`, an exact
displacement from an anchor point, which linear systems use to keep pair
separations free of round-off when orbits separate by many orders of
magnitude.
"""

from __future__ import annotations

import enum
import math
import os
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidRadius

TWO_PI = 2.0 * math.pi
REDUCTION_TOL = 1e-12
N_PROBE_RADII = 8


class Chart(enum.Enum):
    TORUS2 = "torus2"
    HAIR = "hair"
    CIRCLE = "circle"


def _wrap(value: float, period: float) -> float:
    r = value % period
    # -1e-17 % 1.0 == 1.0 in floating point
    return 0.0 if r >= period else r


@dataclass(frozen=True)
class Germ:
    """Exact displacement ``offset`` of a point from ``anchor`` (system-specific coordinates)."""

    anchor: tuple
    offset: tuple


@dataclass(frozen=True)
class Point:
    chart: Chart
    coords: tuple
    germ: Germ | None = field(default=None, compare=False)

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        if self.chart is Chart.TORUS2:
            if len(c) != 2:
                raise ValueError("torus points need two coordinates")
            c = (_wrap(c[0], 1.0), _wrap(c[1], 1.0))
        elif self.chart is Chart.CIRCLE:
            if len(c) != 1:
                raise ValueError("circle points need one angle")
            c = (_wrap(c[0], TWO_PI),)
        else:
            if len(c) != 1 or not math.isfinite(c[0]):
                raise ValueError("hair points need one finite parameter")
        object.__setattr__(self, "coords", c)

    @classmethod
    def torus(cls, u, v):
        return cls(Chart.TORUS2, (u, v))

    @classmethod
    def hair(cls, t):
        return cls(Chart.HAIR, (t,))

    @classmethod
    def circle(cls, theta):
        return cls(Chart.CIRCLE, (theta,))

    def label(self) -> str:
        return f"{self.chart.value}:" + "/".join(repr(c) for c in self.coords)

    def to_json(self) -> dict:
        return {"chart": self.chart.value, "coords": list(self.coords)}

    @classmethod
    def from_json(cls, obj) -> "Point":
        chart = Chart(obj["chart"])
        return cls(chart, tuple(obj["coords"]))


# ----------------------------------------------------------------------
# geometry helpers


def torus_delta(p, q):
    """Representative of q - p in [-1/2, 1/2)^2."""
    du = q[0] - p[0]
    dv = q[1] - p[1]
    du -= math.floor(du + 0.5)
    dv -= math.floor(dv + 0.5)
    return du, dv


def flat_torus_norm(du, dv):
    """Euclidean length of the shortest lattice translate of (du, dv)."""
    du -= math.floor(du + 0.5)
    dv -= math.floor(dv + 0.5)
    best = math.inf
    for m in (-1.0, 0.0, 1.0):
        for n in (-1.0, 0.0, 1.0):
            best = min(best, math.hypot(du + m, dv + n))
    return best


def flat_torus_distance(p, q):
    du = q[0] - p[0]
    dv = q[1] - p[1]
    return flat_torus_norm(du, dv)


def circle_distance(a, b):
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


# ----------------------------------------------------------------------
# systems


class DynamicalSystem(ABC):
    """A homeomorphism of a compact metric space.

    Subclasses provide ``forward``, ``backward`` and ``distance`` on
    :class:`Point` objects, plus the hooks used by :func:`sample_near`.
    """

    name = "system"
    expansivity: float | None = None
    lipschitz: float | None = None
    adapted_k: float | None = None
    epsilon0: float | None = None
    # growth-rate bound used to size probe radii so probes survive n_max steps
    rate_hint: float = 2.0

    @abstractmethod
    def forward(self, p: Point) -> Point: ...

    @abstractmethod
    def backward(self, p: Point) -> Point: ...

    @abstractmethod
    def distance(self, p: Point, q: Point) -> float: ...

    @abstractmethod
    def contains(self, p: Point) -> bool: ...

    @abstractmethod
    def displace(self, x: Point, r: float, u: float) -> Point:
        """Point at chart displacement ``r`` from ``x`` in the direction encoded by ``u`` in [0, 1)."""

    @abstractmethod
    def random_point(self, rng: np.random.Generator) -> Point: ...

    def n_directions(self, x: Point) -> int:
        return 0

    def probe(self, x: Point, r: float, k: int) -> Point:
        raise IndexError(k)

    def descriptor(self) -> dict:
        return {"type": self.name}


@dataclass(frozen=True)
class OrbitSegment:
    base: Point
    n_min: int
    n_max: int
    images: tuple

    def __getitem__(self, j: int) -> Point:
        if not self.n_min <= j <= self.n_max:
            raise IndexError(j)
        return self.images[j - self.n_min]


def iterate(system: DynamicalSystem, p: Point, n: int) -> Point:
    step = system.forward if n > 0 else system.backward
    for _ in range(abs(n)):
        p = step(p)
    return p


def orbit(system: DynamicalSystem, p: Point, n_min: int, n_max: int) -> OrbitSegment:
    if not n_min <= 0 <= n_max:
        raise ValueError("orbit range must contain 0")
    back = [p]
    for _ in range(-n_min):
        back.append(system.backward(back[-1]))
    fwd = [p]
    for _ in range(n_max):
        fwd.append(system.forward(fwd[-1]))
    images = tuple(reversed(back[1:])) + tuple(fwd)
    return OrbitSegment(p, n_min, n_max, images)


def distance(system: DynamicalSystem, p: Point, q: Point) -> float:
    return system.distance(p, q)


def make_rng(seed: int, *salt: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *salt]))


def sample_near(system: DynamicalSystem, x: Point, radius: float, count: int, seed: int,
                probe_floor: float | None = None) -> list[Point]:
    """Deterministic candidates ``y != x`` with ``distance(x, y) <= radius``.

    ``count`` random points with log-uniform radii in ``[radius*1e-4, radius]``
    and uniform chart directions, followed by one probe per distinguished
    direction at each of 8 radii log-spaced between ``probe_floor``
    (default ``radius*1e-4``) and ``radius``.
    """
    if not radius > 0:
        raise InvalidRadius(f"radius must be positive, got {radius!r}")
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = make_rng(seed)
    radii = np.exp(rng.uniform(math.log(radius * 1e-4), math.log(radius), size=count))
    dirs = rng.uniform(0.0, 1.0, size=count)
    out = []
    for r, u in zip(radii, dirs):
        y = _within(system, x, radius, lambda s: system.displace(x, s, float(u)), float(r))
        if y is not None:
            out.append(y)
    floor = probe_floor if probe_floor is not None else radius * 1e-4
    floor = min(floor, radius)
    probe_radii = np.geomspace(floor, radius, N_PROBE_RADII)
    for k in range(system.n_directions(x)):
        for r in probe_radii:
            y = _within(system, x, radius, lambda s: system.probe(x, s, k), float(r))
            if y is not None:
                out.append(y)
    return out


def _within(system, x, radius, make, r):
    # shrink until the metric (not just the chart) displacement fits the ball
    for _ in range(60):
        y = make(r)
        d = system.distance(x, y)
        if 0.0 < d <= radius:
            return y
        if d == 0.0:
            return None
        r *= 0.999 * radius / d
    return None


# ----------------------------------------------------------------------
# parallel helpers


def thread_count() -> int:
    try:
        n = int(os.environ.get("LYAP_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def parallel_map(fn, items):
    """Order-preserving map, threaded when LYAP_THREADS > 1."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
