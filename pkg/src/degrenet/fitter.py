"""Estimating the degree-decrease rate from an observed degree distribution.

The fit scans a 64-point log-spaced grid of ``mu`` values, brackets the best
grid point by its neighbours and refines with golden-section search to an
absolute tolerance of 1e-4.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import distmetrics as dm
from .degree_law import DEFAULT_K_MAX, RatePolicy, stationarity_holds, stationary_pmf
from .empirical import EmpiricalPmf
from .exceptions import DomainError, TruncationError

__all__ = ["Objective", "FitReport", "fit_mu", "evaluate_fit", "theoretical_pmf", "DEFAULT_BOUNDS"]

log = logging.getLogger(__name__)

GRID_POINTS = 64
MU_TOL = 1e-4
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_K_MAX_CEILING = 1 << 22

DEFAULT_BOUNDS = {
    RatePolicy.LINEAR: (1.01, 20.0),
    RatePolicy.LOGARITHMIC: (0.05, 20.0),
}


class Objective(enum.Enum):
    JS_MIDPOINT = "js"
    KL = "kl"
    NEG_PEARSON = "negpearson"

    @classmethod
    def _missing_(cls, value):
        aliases = {"jsmidpoint": cls.JS_MIDPOINT, "js_midpoint": cls.JS_MIDPOINT, "neg_pearson": cls.NEG_PEARSON}
        return aliases.get(str(value).lower())


@dataclass(frozen=True)
class FitReport:
    policy: RatePolicy
    mu_star: float
    objective: Objective
    objective_value: float
    rho: float
    kl: float
    js: float
    search_trace: tuple  # ((mu, objective value), ...) in evaluation order
    k_max_used: int
    mu_bounds: tuple
    boundary_pinned: bool = False
    multimodal: bool = False
    dropped_zero_mass: float = 0.0

    def __post_init__(self):
        if not self.search_trace:
            raise DomainError("a fit report needs a non-empty search trace")
        if not self.mu_star > 0:
            raise DomainError("mu_star must be positive")


def theoretical_pmf(policy, mu, k_max):
    """``stationary_pmf`` with ``k_max`` enlarged until the tail is within tolerance."""
    while True:
        try:
            return stationary_pmf(policy, mu, k_max)
        except TruncationError as err:
            if k_max >= _K_MAX_CEILING:
                raise
            k_max = min(max(2 * k_max, err.suggested_k_max or 0), _K_MAX_CEILING)


def _prepare(empirical):
    if not isinstance(empirical, EmpiricalPmf):
        raise TypeError("empirical must be an EmpiricalPmf")
    cleaned, dropped = empirical.without_zero()
    if dropped:
        log.info("dropped degree-0 mass %.6g before fitting", dropped)
    return cleaned, dropped


def _k_max_for(empirical):
    return max(DEFAULT_K_MAX, 2 * max(empirical.probs))


def _metrics(empirical, pmf):
    pair = dm.align(empirical, pmf)
    return dm.pearson(pair), dm.kl(pair), dm.js_midpoint(pair)


def evaluate_fit(empirical, policy, mu):
    """(Pearson rho, KL in nats, midpoint JS in bits) of the data against the model at ``mu``."""
    policy = RatePolicy(policy)
    if not stationarity_holds(policy, mu):
        raise DomainError(f"mu={mu!r} lies outside the stationary region of the {policy.value} law")
    empirical, _ = _prepare(empirical)
    return _metrics(empirical, theoretical_pmf(policy, mu, _k_max_for(empirical)))


def _objective_value(objective, rho, kl, js):
    if objective is Objective.JS_MIDPOINT:
        return js
    if objective is Objective.KL:
        return kl
    return -rho


def fit_mu(empirical, policy, objective=Objective.JS_MIDPOINT, mu_bounds=None):
    """Best-fitting decrease rate for ``policy`` on ``[lo, hi]``.

    Raises DomainError if the interval leaves the stationary region. When the
    grid shows more than one local minimum the best one is refined and the
    report is flagged ``multimodal``; a minimum on the interval edge is
    flagged ``boundary_pinned``.
    """
    policy = RatePolicy(policy)
    objective = Objective(objective)
    lo, hi = mu_bounds if mu_bounds is not None else DEFAULT_BOUNDS[policy]
    lo, hi = float(lo), float(hi)
    if not (0 < lo < hi):
        raise DomainError(f"invalid mu bounds ({lo}, {hi})")
    if not stationarity_holds(policy, lo):
        raise DomainError(
            f"lower bound mu={lo} is outside the stationary region of the {policy.value} law"
        )
    empirical, dropped = _prepare(empirical)
    k_base = _k_max_for(empirical)

    trace = []
    cache = {}

    def f(mu):
        if mu not in cache:
            pmf = theoretical_pmf(policy, mu, k_base)
            rho, kl, js = _metrics(empirical, pmf)
            cache[mu] = _objective_value(objective, rho, kl, js)
            trace.append((mu, cache[mu]))
        return cache[mu]

    grid = np.geomspace(lo, hi, GRID_POINTS)
    values = np.array([f(float(mu)) for mu in grid])
    i = int(np.argmin(values))
    interior = values[1:-1]
    local_min = np.nonzero((interior < values[:-2]) & (interior < values[2:]))[0]
    multimodal = local_min.size > 1
    if multimodal:
        log.warning("objective has %d local minima on the grid; refining the best", local_min.size)

    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, GRID_POINTS - 1)])
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > MU_TOL:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)

    mu_star, best = min(cache.items(), key=lambda kv: (kv[1], kv[0]))
    pinned = mu_star - lo < MU_TOL or hi - mu_star < MU_TOL
    pmf = theoretical_pmf(policy, mu_star, k_base)
    rho, kl, js = _metrics(empirical, pmf)
    return FitReport(
        policy, mu_star, objective, best, rho, kl, js, tuple(trace), pmf.k_max,
        (lo, hi), pinned, multimodal, dropped,
    )
