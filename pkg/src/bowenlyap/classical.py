"""Derivative-based Lyapunov exponents for the smooth built-in systems.

Tangent frames are pushed along the orbit and re-orthonormalized by QR at
every step; the log of the diagonal of R accumulates the growth rates. The
first ``n`` steps are discarded as a transient so that the frame has aligned
with the Oseledets directions before accumulation starts.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NotDifferentiable
from .space import make_rng


@dataclass
class ClassicalExponents:
    chi_max: float
    chi_min: float
    n_used: int

    def to_json(self):
        return asdict(self)


def jacobian_exponents(system, x, n, n_vectors=None, seed=0, warmup=None) -> ClassicalExponents:
    if not hasattr(system, "jacobian"):
        raise NotDifferentiable(f"{system.name} has no derivative")
    if n < 8:
        raise ValueError("n must be >= 8")
    dim = system.jacobian(x).shape[0]
    k = dim if n_vectors is None else min(int(n_vectors), dim)
    warmup = n if warmup is None else warmup
    Q = np.linalg.qr(make_rng(seed).standard_normal((dim, k)))[0]
    sums = np.zeros(k)
    p = x
    for step in range(warmup + n):
        Q, R = np.linalg.qr(system.jacobian(p) @ Q)
        if step >= warmup:
            sums += np.log(np.abs(np.diag(R)))
        p = system.forward(p)
    chi = sums / n
    return ClassicalExponents(float(chi.max()), float(chi.min()), n)


@dataclass
class Comparison:
    passed: bool
    delta_max: float
    delta_min: float
    tol: float

    def to_json(self):
        return {"pass": self.passed, "delta_max": self.delta_max, "delta_min": self.delta_min, "tol": self.tol}


def compare(report, classical: ClassicalExponents, tol: float) -> Comparison:
    """Metric ``Lambda+``/``lambda+`` against ``chi_max``/``chi_min``."""
    dmax = abs(report.Lambda_plus - classical.chi_max)
    dmin = abs(report.lambda_plus - classical.chi_min)
    return Comparison(bool(dmax <= tol and dmin <= tol), dmax, dmin, tol)
