"""Lyapunov exponents of compact invariant sets and attractor/repeller classification.

The pointwise machinery carries over with ``dist(f^j y, K)`` in place of the
pair separation: candidates live off ``K`` and must stay ``delta``-close to
``K`` along the orbit segment.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import EmptyBowenSample
from .pointwise import (
    CONVERGENCE_TOL,
    DEFAULT_CANDIDATES,
    DEFAULT_DELTAS,
    DEFAULT_N_MAX,
    DEFAULT_SEED,
    _check_params,
    _oscillation,
    probe_floor,
)
from .space import N_PROBE_RADII, Chart, DynamicalSystem, Point, make_rng, orbit, parallel_map, sample_near
from .systems import TorusWithHair

SET_CSV_HEADER = ["system", "set", "delta", "n", "A_hat", "a_hat"]


class SetKind(enum.Enum):
    FINITE_POINTS = "points"
    WHOLE_TORUS_IN_X = "torus"


@dataclass(frozen=True)
class InvariantSet:
    kind: SetKind
    system: DynamicalSystem = field(repr=False)
    points: tuple = ()

    @classmethod
    def finite(cls, system, points, tol=1e-10):
        points = tuple(points)
        if not points:
            raise ValueError("a finite invariant set needs at least one point")
        for p in points:
            fp = system.forward(p)
            if min(system.distance(fp, q) for q in points) > tol:
                raise ValueError(f"{p.label()} is not mapped into the set")
        return cls(SetKind.FINITE_POINTS, system, points)

    @classmethod
    def torus_in(cls, system: TorusWithHair):
        if not isinstance(system, TorusWithHair):
            raise TypeError("the whole-torus set only exists inside the torus-with-hair space")
        return cls(SetKind.WHOLE_TORUS_IN_X, system)

    def label(self) -> str:
        if self.kind is SetKind.WHOLE_TORUS_IN_X:
            return "torus"
        return "points:" + "|".join(p.label() for p in self.points)

    def to_json(self):
        if self.kind is SetKind.WHOLE_TORUS_IN_X:
            return {"kind": "torus"}
        return {"kind": "points", "points": [p.to_json() for p in self.points]}


def dist_to_set(K: InvariantSet, x: Point) -> float:
    if K.kind is SetKind.WHOLE_TORUS_IN_X:
        # the shadow point on the torus realizes the infimum under the product metric
        return 0.0 if x.chart is Chart.TORUS2 else K.system.height(x.coords[0])
    return min(K.system.distance(x, p) for p in K.points)


def set_candidates(system, K, delta, count, seed, floor=None):
    """Points off ``K`` within ``delta`` of it."""
    if K.kind is SetKind.FINITE_POINTS:
        out = []
        for i, p in enumerate(K.points):
            out.extend(sample_near(system, p, delta, count, seed + 1000 * i, floor))
        return [y for y in out if dist_to_set(K, y) > 0]
    # hair points by height: h = eps / (t^2 + 1)
    eps = system.epsilon
    top = min(delta, eps * 0.999)
    low = floor if floor is not None else top * 1e-4
    rng = make_rng(seed)
    heights = list(np.exp(rng.uniform(math.log(low), math.log(top), size=count)))
    signs = list(np.where(rng.uniform(size=count) < 0.5, 1.0, -1.0))
    for h in np.geomspace(low, top, N_PROBE_RADII):
        heights += [h, h]
        signs += [1.0, -1.0]
    return [Point.hair(s * math.sqrt(eps / h - 1.0)) for h, s in zip(heights, signs)]


class SetProfile:
    """``dist(f^j y, K)`` for every candidate and ``n_lo <= j <= n_hi``."""

    def __init__(self, system, K, candidates, n_lo, n_hi):
        self.n_lo, self.n_hi = n_lo, n_hi
        self.candidates = list(candidates)

        def row(y):
            return [dist_to_set(K, z) for z in orbit(system, y, n_lo, n_hi).images]

        rows = parallel_map(row, self.candidates)
        self.table = np.array(rows, dtype=float).reshape(len(self.candidates), n_hi - n_lo + 1)
        self.valid = self.table[:, -n_lo] > 0

    def mask(self, delta, n):
        lo, hi = min(0, n), max(0, n)
        block = self.table[:, lo - self.n_lo: hi - self.n_lo + 1]
        # orbits off K never reach K; a zero here is underflow
        return self.valid & np.all((block <= delta) & (block > 0), axis=1)

    def ratios(self, n):
        return self.table[:, n - self.n_lo] / self.table[:, -self.n_lo]

    def estimate(self, delta, n):
        m = self.mask(delta, n)
        if not m.any():
            raise EmptyBowenSample(n, delta)
        r = self.ratios(n)[m]
        return float(r.max()), float(r.min())


def set_bowen_filter(system, K, delta, n, candidates):
    prof = SetProfile(system, K, candidates, min(0, n), max(0, n))
    return [c for c, keep in zip(prof.candidates, prof.mask(delta, n)) if keep]


def set_distortion(system, K, delta, n, candidates):
    """``(A_hat(K, n), a_hat(K, n))``."""
    if n == 0:
        raise ValueError("set_distortion needs n != 0")
    return SetProfile(system, K, candidates, min(0, n), max(0, n)).estimate(delta, n)


def _closed_sup(table, delta, n):
    # sup over the forward-orbit-closed pool: every shift m of every row
    N = table.shape[1] - 1
    best = -math.inf
    for m in range(0, N - n + 1):
        win = table[:, m: m + n + 1]
        ok = np.all((win <= delta) & (win > 0), axis=1)
        if ok.any():
            best = max(best, float((win[ok, n] / win[ok, 0]).max()))
    if best == -math.inf:
        raise EmptyBowenSample(n, delta)
    return best


def subadditivity_check(system, K, delta, pairs, candidates=None, count=DEFAULT_CANDIDATES,
                        seed=DEFAULT_SEED):
    """``max log A(n+k) - log A(n) - log A(k)`` on one forward-orbit-closed candidate pool."""
    pairs = [(int(n), int(k)) for n, k in pairs]
    if any(n <= 0 or k <= 0 for n, k in pairs):
        raise ValueError("n and k must be positive")
    N = max(n + k for n, k in pairs)
    if candidates is None:
        candidates = set_candidates(system, K, delta, count, seed, _set_floor(system, K, delta, N))
    table = SetProfile(system, K, candidates, 0, N).table
    cache = {}

    def logA(n):
        if n not in cache:
            cache[n] = math.log(_closed_sup(table, delta, n))
        return cache[n]

    return max(logA(n + k) - logA(n) - logA(k) for n, k in pairs)


def set_duality_check(system, K, delta, n, candidates) -> float:
    """``|a(K, n) * A(K, -n) - 1|`` with the backward ball sampled on ``f^n`` of the forward sample."""
    if n <= 0:
        raise ValueError("n must be positive")
    a_hat = set_distortion(system, K, delta, n, candidates)[1]
    moved = [orbit(system, y, 0, n)[n] for y in candidates]
    A_back = set_distortion(system, K, delta, -n, moved)[0]
    return abs(a_hat * A_back - 1.0)


@dataclass
class SetRow:
    delta: float
    n: int
    A_hat: float
    a_hat: float


@dataclass
class SetDeltaRun:
    delta: float
    rows: list
    Lambda_plus: float
    lambda_plus: float
    Lambda_minus: float
    lambda_minus: float
    oscillation: dict
    converged: bool
    duality_residuals: tuple


@dataclass
class SetExponentReport:
    system: str
    set: str
    n_max: int
    runs: list
    Lambda_plus: float
    lambda_plus: float
    Lambda_minus: float
    lambda_minus: float
    converged: bool
    delta_used: float
    subadditivity_residual: float
    duality_residuals: tuple

    def to_json(self):
        return asdict(self)

    def csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SET_CSV_HEADER)
        for run in self.runs:
            for r in run.rows:
                w.writerow([self.system, self.set, repr(r.delta), r.n, repr(r.A_hat), repr(r.a_hat)])
        return buf.getvalue()


def _set_floor(system, K, delta, n_max):
    power = 2 if K.kind is SetKind.WHOLE_TORUS_IN_X else 1
    return probe_floor(system, delta, n_max, power)


def _summarize(delta, rows):
    fwd = [r for r in rows if r.n > 0]
    bwd = [r for r in rows if r.n < 0]
    seqs = {
        "Lambda_plus": [math.log(r.A_hat) / r.n for r in fwd],
        "lambda_plus": [math.log(r.a_hat) / r.n for r in fwd],
        "Lambda_minus": [-math.log(r.A_hat) / r.n for r in bwd],
        "lambda_minus": [-math.log(r.a_hat) / r.n for r in bwd],
    }
    osc = {k: _oscillation(v) for k, v in seqs.items()}
    lim = {k: v[-1] for k, v in seqs.items()}
    res = (abs(lim["Lambda_plus"] + lim["lambda_minus"]), abs(lim["lambda_plus"] + lim["Lambda_minus"]))
    return SetDeltaRun(delta, rows, lim["Lambda_plus"], lim["lambda_plus"], lim["Lambda_minus"],
                       lim["lambda_minus"], osc, all(o < CONVERGENCE_TOL for o in osc.values()), res)


def set_exponents(system, K, delta_list=DEFAULT_DELTAS, n_max=DEFAULT_N_MAX, count=DEFAULT_CANDIDATES,
                  seed=DEFAULT_SEED, candidates=None) -> SetExponentReport:
    delta_list = _check_params(delta_list, n_max)
    if candidates is None:
        floor = _set_floor(system, K, min(delta_list), n_max)
        candidates = []
        for i, d in enumerate(delta_list):
            candidates.extend(set_candidates(system, K, d, count, seed + i, floor))
    prof = SetProfile(system, K, candidates, -n_max, n_max)
    runs = []
    for d in delta_list:
        rows = []
        for n in list(range(1, n_max + 1)) + list(range(-1, -n_max - 1, -1)):
            A, a = prof.estimate(d, n)
            rows.append(SetRow(d, n, A, a))
        runs.append(_summarize(d, rows))
    best = next((r for r in reversed(runs) if r.converged), None)
    ok = best is not None
    best = best or runs[-1]
    # forward half of the profile, read as an orbit-closed pool
    fwd = prof.table[:, n_max:]
    logs = {n: math.log(_closed_sup(fwd, best.delta, n)) for n in range(1, n_max + 1)}
    sub = max(logs[n + k] - logs[n] - logs[k] for n in range(1, n_max) for k in range(1, n_max - n + 1))
    return SetExponentReport(system.name, K.label(), n_max, runs, best.Lambda_plus, best.lambda_plus,
                             best.Lambda_minus, best.lambda_minus, ok, best.delta, sub,
                             best.duality_residuals)


class Label(enum.Enum):
    ATTRACTOR = "Attractor"
    REPELLER = "Repeller"
    NEITHER = "Neither"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Classification:
    label: Label
    Lambda_plus: float
    lambda_plus: float
    Lambda_minus: float
    lambda_minus: float
    basin_fraction: float | None
    margin: float
    # the literal "lambda-(K) > 0" repeller hypothesis, reported for audit only
    literal_repeller_hypothesis: bool = False

    def to_json(self):
        out = asdict(self)
        out["label"] = self.label.value
        return out


def empirical_basin_check(system, K, delta_start, n_steps=60, n_probes=200, seed=DEFAULT_SEED,
                          backward=False) -> float:
    """Fraction of probes within ``delta_start`` of ``K`` that come within ``delta_start/100`` of it.

    Forward time tests attraction; ``backward=True`` tests repulsion.
    """
    if not delta_start > 0:
        raise ValueError("delta_start must be positive")
    target = delta_start / 100
    # probes already inside the target band would count as converged without moving
    probes = [y for y in set_candidates(system, K, delta_start, n_probes, seed, floor=target)
              if target < dist_to_set(K, y) <= delta_start]
    if not probes:
        return 0.0
    step = system.backward if backward else system.forward
    hits = 0
    for y in probes:
        for _ in range(n_steps):
            y = step(y)
            if dist_to_set(K, y) < target:
                hits += 1
                break
    return hits / len(probes)


def classify(system, K, report: SetExponentReport, margin=0.1, delta_start=0.1, n_steps=60,
             n_probes=200, seed=DEFAULT_SEED) -> Classification:
    """Attractor if ``Lambda+(K) < -margin``; repeller if ``Lambda-(K) < -margin``.

    The repeller rule is the attractor rule for the inverse map. The basin
    fraction is measured in the direction matching the label.
    """
    if not margin > 0:
        raise ValueError("margin must be positive")
    Lp, lp, Lm, lm = report.Lambda_plus, report.lambda_plus, report.Lambda_minus, report.lambda_minus
    if not report.converged:
        label = Label.INCONCLUSIVE
    elif Lp < -margin and not Lm < -margin:
        label = Label.ATTRACTOR
    elif Lm < -margin and not Lp < -margin:
        label = Label.REPELLER
    elif Lp > margin and Lm > margin:
        label = Label.NEITHER
    else:
        label = Label.INCONCLUSIVE
    basin = empirical_basin_check(system, K, delta_start, n_steps, n_probes, seed,
                                  backward=label is Label.REPELLER)
    return Classification(label, Lp, lp, Lm, lm, basin, margin, lm > margin)
