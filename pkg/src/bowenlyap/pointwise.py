"""Pointwise distortion estimates and metric Lyapunov exponents.

For a point ``x``, ball size ``delta`` and time ``n`` the Bowen ball is the set
of ``y != x`` whose orbit stays ``delta``-close to the orbit of ``x`` for
every ``j`` between 0 and ``n``. The maximal and minimal distortion over the
ball are estimated on a finite candidate sample; growth rates of their logs
give the four exponents ``Lambda+``, ``lambda+``, ``Lambda-``, ``lambda-``.

All candidates of a run share one separation profile
``d(f^j x, f^j y), -n_max <= j <= n_max``, so the balls are nested in ``n``
and in ``delta`` by construction.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import EmptyBowenSample
from .space import DynamicalSystem, Point, orbit, parallel_map, sample_near

DEFAULT_DELTAS = (1e-1, 1e-2, 1e-3)
DEFAULT_N_MAX = 10
DEFAULT_CANDIDATES = 4096
DEFAULT_SEED = 42
CONVERGENCE_TOL = 0.05
POINT_CSV_HEADER = ["system", "point", "delta", "n", "A_hat", "a_hat", "logA_over_n", "loga_over_n"]


@dataclass
class DistortionEstimate:
    A_hat: float
    a_hat: float
    witness_max: Point
    witness_min: Point
    in_ball_count: int


class SeparationProfile:
    """``d(f^j x, f^j y)`` for every candidate ``y`` and ``n_lo <= j <= n_hi``."""

    def __init__(self, system: DynamicalSystem, x: Point, candidates, n_lo: int, n_hi: int):
        self.system = system
        self.x = x
        self.n_lo, self.n_hi = n_lo, n_hi
        x_orb = orbit(system, x, n_lo, n_hi).images

        def row(y):
            y_orb = orbit(system, y, n_lo, n_hi).images
            return [system.distance(a, b) for a, b in zip(x_orb, y_orb)]

        self.candidates = list(candidates)
        rows = parallel_map(row, self.candidates)
        self.table = np.array(rows, dtype=float).reshape(len(self.candidates), n_hi - n_lo + 1)
        # y == x is not a Bowen-ball member
        self.valid = self.table[:, -n_lo] > 0

    def col(self, j):
        return self.table[:, j - self.n_lo]

    def mask(self, delta, n):
        lo, hi = min(0, n), max(0, n)
        block = self.table[:, lo - self.n_lo: hi - self.n_lo + 1]
        # f is injective, so a zero separation after time 0 is underflow and cannot be resolved
        return self.valid & np.all((block <= delta) & (block > 0), axis=1)

    def ratios(self, n):
        return self.col(n) / self.col(0)

    def estimate(self, delta, n) -> DistortionEstimate:
        m = self.mask(delta, n)
        idx = np.flatnonzero(m)
        if idx.size == 0:
            raise EmptyBowenSample(n, delta)
        r = self.ratios(n)[idx]
        imax, imin = idx[np.argmax(r)], idx[np.argmin(r)]
        return DistortionEstimate(float(r.max()), float(r.min()), self.candidates[imax],
                                  self.candidates[imin], int(idx.size))


def probe_floor(system: DynamicalSystem, delta_min: float, n_max: int, power: int = 1) -> float:
    """Smallest probe radius: small enough that a probe survives ``n_max`` expanding steps."""
    floor = delta_min * max(system.rate_hint, 1.0) ** (-power * n_max) / 2
    # long horizons underflow; stay positive so probes remain distinct from x
    return max(floor, 1e-300)


def bowen_filter(system, x, delta, n, candidates):
    prof = SeparationProfile(system, x, candidates, min(0, n), max(0, n))
    return [c for c, keep in zip(prof.candidates, prof.mask(delta, n)) if keep]


def distortion(system, x, delta, n, candidates) -> DistortionEstimate:
    if n == 0:
        raise ValueError("distortion needs n != 0")
    prof = SeparationProfile(system, x, candidates, min(0, n), max(0, n))
    return prof.estimate(delta, n)


def _default_candidates(system, x, delta, n_extent, count, seed):
    return sample_near(system, x, delta, count, seed, probe_floor(system, delta, n_extent))


def exponent_sequence(system, x, delta, n_list, candidates=None, count=DEFAULT_CANDIDATES,
                      seed=DEFAULT_SEED):
    """``[(n, log(A)/n, log(a)/n), ...]`` over one nested candidate sample."""
    n_list = list(n_list)
    if not n_list or 0 in n_list:
        raise ValueError("n_list must be non-empty and exclude 0")
    inc = all(b > a for a, b in zip(n_list, n_list[1:]))
    dec = all(b < a for a, b in zip(n_list, n_list[1:]))
    if not ((inc and n_list[0] > 0) or (dec and n_list[0] < 0)):
        raise ValueError("n_list must be strictly increasing positive or strictly decreasing negative")
    ext = max(abs(n) for n in n_list)
    if candidates is None:
        candidates = _default_candidates(system, x, delta, ext, count, seed)
    prof = SeparationProfile(system, x, candidates, min(0, *n_list), max(0, *n_list))
    out = []
    for n in n_list:
        est = prof.estimate(delta, n)
        out.append((n, math.log(est.A_hat) / n, math.log(est.a_hat) / n))
    return out


@dataclass
class ExponentRow:
    delta: float
    n: int
    A_hat: float
    a_hat: float
    logA_over_n: float
    loga_over_n: float


@dataclass
class DeltaRun:
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
class ExponentReport:
    system: str
    point: str
    n_max: int
    candidates: int
    runs: list
    Lambda_plus: float
    lambda_plus: float
    Lambda_minus: float
    lambda_minus: float
    converged: bool
    delta_used: float
    diagnostics: dict = field(default_factory=dict)

    def rows(self):
        return [r for run in self.runs for r in run.rows]

    def to_json(self) -> dict:
        return asdict(self)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(POINT_CSV_HEADER)
        for r in self.rows():
            w.writerow([self.system, self.point, repr(r.delta), r.n, repr(r.A_hat), repr(r.a_hat),
                        repr(r.logA_over_n), repr(r.loga_over_n)])
        return buf.getvalue()


def _oscillation(values):
    tail = values[-3:]
    return max((abs(b - a) for a, b in zip(tail, tail[1:])), default=0.0)


def summarize_run(delta, rows, n_max):
    """Per-delta limits (value at +-n_max) with oscillation diagnostics."""
    fwd = [r for r in rows if r.n > 0]
    bwd = [r for r in rows if r.n < 0]
    seqs = {
        "Lambda_plus": [r.logA_over_n for r in fwd],
        "lambda_plus": [r.loga_over_n for r in fwd],
        "Lambda_minus": [-r.logA_over_n for r in bwd],
        "lambda_minus": [-r.loga_over_n for r in bwd],
    }
    osc = {k: _oscillation(v) for k, v in seqs.items()}
    lim = {k: v[-1] for k, v in seqs.items()}
    converged = all(o < CONVERGENCE_TOL for o in osc.values())
    residuals = (abs(lim["Lambda_plus"] + lim["lambda_minus"]), abs(lim["lambda_plus"] + lim["Lambda_minus"]))
    return DeltaRun(delta, rows, lim["Lambda_plus"], lim["lambda_plus"], lim["Lambda_minus"],
                    lim["lambda_minus"], osc, converged, residuals)


def pick_limit(runs):
    """The run at the smallest delta that converged (runs ordered by decreasing delta)."""
    for run in reversed(runs):
        if run.converged:
            return run, True
    return runs[-1], False


def rows_from_profile(prof, delta, n_max):
    rows = []
    for n in list(range(1, n_max + 1)) + list(range(-1, -n_max - 1, -1)):
        est = prof.estimate(delta, n)
        rows.append(ExponentRow(delta, n, est.A_hat, est.a_hat,
                                math.log(est.A_hat) / n, math.log(est.a_hat) / n))
    return rows


def _check_params(delta_list, n_max):
    delta_list = [float(d) for d in delta_list]
    if not delta_list or any(d <= 0 for d in delta_list):
        raise ValueError("delta_list must hold positive values")
    if any(b >= a for a, b in zip(delta_list, delta_list[1:])):
        raise ValueError("delta_list must be strictly decreasing")
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    return delta_list


def candidate_pool(system, x, delta_list, n_max, count, seed):
    floor = probe_floor(system, min(delta_list), n_max)
    pool = []
    for i, d in enumerate(delta_list):
        pool.extend(sample_near(system, x, d, count, seed + i, floor))
    return pool


def point_exponents(system: DynamicalSystem, x: Point, delta_list=DEFAULT_DELTAS, n_max=DEFAULT_N_MAX,
                    count=DEFAULT_CANDIDATES, seed=DEFAULT_SEED, candidates=None) -> ExponentReport:
    """Forward and backward distortion sequences for every delta, with limits.

    One candidate pool (the union of the per-delta samples) serves every
    delta, so the estimates are monotone in delta exactly.
    """
    delta_list = _check_params(delta_list, n_max)
    if candidates is None:
        candidates = candidate_pool(system, x, delta_list, n_max, count, seed)
    prof = SeparationProfile(system, x, candidates, -n_max, n_max)
    runs = [summarize_run(d, rows_from_profile(prof, d, n_max), n_max) for d in delta_list]
    best, ok = pick_limit(runs)
    diag = {"pool_size": len(prof.candidates),
            "duality_residuals": {repr(r.delta): list(r.duality_residuals) for r in runs}}
    return ExponentReport(system.name, x.label(), n_max, count, runs, best.Lambda_plus, best.lambda_plus,
                          best.Lambda_minus, best.lambda_minus, ok, best.delta, diag)


def mirrored_duality_check(system, x, delta, n, candidates) -> float:
    """``|a(x, n) * A(f^n x, -n) - 1|`` with the second ball sampled on ``f^n`` of the first sample."""
    if n <= 0:
        raise ValueError("n must be positive")
    a_hat = distortion(system, x, delta, n, candidates).a_hat
    xn = orbit(system, x, 0, n)[n]
    moved = [orbit(system, y, 0, n)[n] for y in candidates]
    A_back = distortion(system, xn, delta, -n, moved).A_hat
    return abs(a_hat * A_back - 1.0)


def lipschitz_bound_check(system, x, delta, n_max, K_lip=None, candidates=None,
                          count=DEFAULT_CANDIDATES, seed=DEFAULT_SEED) -> float:
    """``max_n |log A(x, n)| - |n| log K`` over ``0 < |n| <= n_max``; ``<= 0`` means the bound holds."""
    K = K_lip if K_lip is not None else system.lipschitz
    if K is None:
        raise ValueError("no Lipschitz constant given or known for this system")
    if candidates is None:
        candidates = _default_candidates(system, x, delta, n_max, count, seed)
    prof = SeparationProfile(system, x, candidates, -n_max, n_max)
    worst = -math.inf
    for n in list(range(1, n_max + 1)) + list(range(-1, -n_max - 1, -1)):
        m = prof.mask(delta, n)
        if not m.any():
            continue
        A = prof.ratios(n)[m].max()
        worst = max(worst, abs(math.log(A)) - abs(n) * math.log(K))
    return worst
