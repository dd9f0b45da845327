"""Rate laws and stationary degree distributions of the degree birth-death chain.

A vertex's degree ``k`` lives on {1, 2, ...}. It grows at rate ``rate(policy, k)``
and shrinks at rate ``k * mu`` (no death out of state 1). Detailed balance

    rate(k - 1) * P[k - 1] = k * mu * P[k],    k >= 2

fixes the stationary law up to normalisation. The linear law has a closed-form
log-series solution; the logarithmic law is normalised numerically.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp

from .exceptions import (
    DomainError,
    ExistenceError,
    TruncationError,
    UnsupportedPolicyError,
)

__all__ = [
    "RatePolicy",
    "StationaryPmf",
    "ThresholdReport",
    "SeriesSum",
    "rate",
    "stationarity_holds",
    "stationary_pmf",
    "series_S_log",
    "expected_degree",
    "adjacent_crossing_mu",
    "crossing_by_root_finding",
    "DEFAULT_K_MAX",
    "DEFAULT_TAIL_TOL",
    "UNDERFLOW_LOG_GUARD",
]

DEFAULT_K_MAX = 500
DEFAULT_TAIL_TOL = 1e-9
# exp() of anything below this underflows to a subnormal or zero in float64
UNDERFLOW_LOG_GUARD = -745.0

# terms more than this many nats below the running maximum are negligible
_NEGLIGIBLE_NATS = 60.0
_MAX_NORMALISATION_K = 1 << 24


class RatePolicy(enum.Enum):
    """Degree-increase law: ``LINEAR`` is k, ``LOGARITHMIC`` is ln(1 + k)."""

    LINEAR = "linear"
    LOGARITHMIC = "log"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            key = value.strip().lower()
            aliases = {"lin": cls.LINEAR, "logarithmic": cls.LOGARITHMIC, "ln": cls.LOGARITHMIC}
            if key in aliases:
                return aliases[key]
            for member in cls:
                if member.value == key or member.name.lower() == key:
                    return member
        return None


class StationaryPmf:
    """Truncated stationary degree distribution over degrees 1..k_max.

    ``probs[k - 1]`` is the probability of degree ``k``. Values are the exact
    closed-form or recursion values, not renormalised over the truncated range;
    the mass beyond ``k_max`` is reported as ``tail_mass``.
    """

    __slots__ = ("policy", "mu", "k_max", "probs", "tail_mass", "tail_tol")

    def __init__(self, policy, mu, k_max, probs, tail_mass, tail_tol=DEFAULT_TAIL_TOL):
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (k_max,):
            raise DomainError(f"expected {k_max} probabilities, got shape {probs.shape}")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise DomainError("probabilities must be finite and non-negative")
        if tail_mass < 0 or tail_mass > tail_tol:
            raise DomainError(f"tail mass {tail_mass!r} outside [0, {tail_tol!r}]")
        if abs(math.fsum(probs) + tail_mass - 1.0) > 1e-12:
            raise DomainError("probabilities and tail mass do not sum to one")
        probs.setflags(write=False)
        self.policy = RatePolicy(policy)
        self.mu = float(mu)
        self.k_max = int(k_max)
        self.probs = probs
        self.tail_mass = float(tail_mass)
        self.tail_tol = float(tail_tol)

    @property
    def degrees(self):
        return np.arange(1, self.k_max + 1)

    def __getitem__(self, k):
        """Probability of degree ``k`` (zero outside 1..k_max)."""
        if 1 <= k <= self.k_max:
            return float(self.probs[k - 1])
        return 0.0

    def as_dict(self):
        return {int(k): float(p) for k, p in zip(self.degrees, self.probs)}

    def __eq__(self, other):
        if not isinstance(other, StationaryPmf):
            return NotImplemented
        return (
            self.policy is other.policy
            and self.mu == other.mu
            and self.k_max == other.k_max
            and self.tail_mass == other.tail_mass
            and self.tail_tol == other.tail_tol
            and np.array_equal(self.probs, other.probs)
        )

    def __repr__(self):
        return (
            f"StationaryPmf(policy={self.policy.value!r}, mu={self.mu!r}, "
            f"k_max={self.k_max}, tail_mass={self.tail_mass:.3g})"
        )


@dataclass(frozen=True)
class ThresholdReport:
    """Decrease rate at which P[lower_index] == P[upper_index]."""

    lower_index: int
    upper_index: int
    mu_star: float
    policy: RatePolicy = field(default=RatePolicy.LOGARITHMIC)


class SeriesSum(NamedTuple):
    value: float
    skipped: int


def _check_mu(mu):
    if not (isinstance(mu, (int, float, np.floating, np.integer)) and math.isfinite(mu)) or mu <= 0:
        raise DomainError(f"mu must be a positive finite real, got {mu!r}")
    return float(mu)


def rate(policy, k):
    """Degree-increase rate of a vertex with degree ``k`` (k >= 1)."""
    policy = RatePolicy(policy)
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"degree must be an integer >= 1, got {k!r}")
    k = int(k)
    if policy is RatePolicy.LINEAR:
        return float(k)
    return math.log1p(k)


def rates(policy, ks):
    """Vectorised ``rate``; degree 0 maps to 0 (a vertex that is about to leave)."""
    ks = np.asarray(ks, dtype=float)
    if RatePolicy(policy) is RatePolicy.LINEAR:
        return ks.copy()
    return np.log1p(ks)


def stationarity_holds(policy, mu):
    """True when the degree chain has a stationary distribution.

    The linear law needs ``mu > 1`` strictly; at ``mu == 1`` the normalising
    series is harmonic. The logarithmic law is stationary for every ``mu > 0``.
    """
    policy = RatePolicy(policy)
    mu = _check_mu(mu)
    if policy is RatePolicy.LINEAR:
        return mu > 1.0
    return True


def _require_stationary(policy, mu):
    if not stationarity_holds(policy, mu):
        raise ExistenceError(
            f"no stationary degree distribution for the linear law at mu={mu!r}: "
            "requires mu > 1"
        )


def _log_ratio_terms(policy, mu, k_hi, k_lo=1):
    """log(P[k] / P[1]) for k = k_lo..k_hi."""
    ks = np.arange(k_lo, k_hi + 1, dtype=float)
    log_mu = math.log(mu)
    if policy is RatePolicy.LINEAR:
        return -np.log(ks) - (ks - 1.0) * log_mu
    # sum_{j=1}^{k-1} ln ln(1 + j); j = 1 contributes ln ln 2 < 0
    js = np.arange(1, k_hi, dtype=float)
    cum = np.concatenate(([0.0], np.cumsum(np.log(np.log1p(js)))))
    return cum[k_lo - 1:] - gammaln(ks + 1.0) - (ks - 1.0) * log_mu


def _log_terms_until_negligible(policy, mu, k_min):
    """Log-terms from k=1 far enough out that the remaining tail is negligible.

    Past the mode the consecutive-term ratio rate(k-1)/(k mu) is decreasing for
    both laws, so once the ratio is below one and the last term sits
    ``_NEGLIGIBLE_NATS`` below the maximum, the geometric bound on the rest is
    far below double precision.
    """
    k_hi = max(2 * k_min, 64)
    while True:
        terms = _log_ratio_terms(policy, mu, k_hi)
        last_ratio = math.exp(terms[-1] - terms[-2])
        if last_ratio < 1.0:
            remaining = terms[-1] + math.log(last_ratio) - math.log1p(-last_ratio)
            if remaining < terms.max() - _NEGLIGIBLE_NATS:
                return terms
        if k_hi >= _MAX_NORMALISATION_K:
            raise TruncationError(
                f"normalising series for {policy.value} law at mu={mu!r} "
                f"has not converged by k={k_hi}"
            )
        k_hi *= 2


def _suggest_k_max(log_probs, tail_tol):
    """Smallest k whose tail (from the long log-prob array) is within tolerance."""
    probs = np.exp(log_probs)
    tails = np.cumsum(probs[::-1])[::-1]  # tails[i] = sum_{j >= i} p_j
    ok = np.nonzero(tails <= tail_tol)[0]
    return int(ok[0]) if ok.size else int(log_probs.size)


def stationary_pmf(policy, mu, k_max=DEFAULT_K_MAX, tail_tol=DEFAULT_TAIL_TOL):
    """Stationary degree distribution truncated at ``k_max``.

    Linear law: P[k] = -1 / (k mu^k ln(1 - 1/mu)), evaluated in log space.
    Logarithmic law: P[k] = prod_{j<k} ln(1+j) / (k! mu^(k-1)) * P[1], with
    P[1] = 1 / (1 + S(mu)) and every term built from its logarithm.

    Raises
    ------
    ExistenceError
        ``(policy, mu)`` admits no stationary distribution.
    TruncationError
        More than ``tail_tol`` of the mass lies beyond ``k_max``. The error
        carries ``suggested_k_max``.
    """
    policy = RatePolicy(policy)
    mu = _check_mu(mu)
    if int(k_max) != k_max or k_max < 2:
        raise DomainError(f"k_max must be an integer >= 2, got {k_max!r}")
    if not tail_tol > 0:
        raise DomainError(f"tail_tol must be positive, got {tail_tol!r}")
    k_max = int(k_max)
    _require_stationary(policy, mu)

    if policy is RatePolicy.LINEAR:
        ks = np.arange(1, k_max + 1, dtype=float)
        # -ln(1 - 1/mu) > 0 for mu > 1
        log_norm = math.log(-math.log1p(-1.0 / mu))
        probs = np.exp(-np.log(ks) - ks * math.log(mu) - log_norm)
        tail = 1.0 - math.fsum(probs)
        if tail > tail_tol:
            long_terms = _log_terms_until_negligible(policy, mu, k_max)
            raise TruncationError(
                f"tail mass {tail:.3g} beyond k_max={k_max} exceeds {tail_tol:g}",
                tail_mass=tail,
                suggested_k_max=_suggest_k_max(long_terms - logsumexp(long_terms), tail_tol),
            )
        return StationaryPmf(policy, mu, k_max, probs, max(tail, 0.0), tail_tol)

    terms = _log_terms_until_negligible(policy, mu, k_max)
    log_probs = terms - logsumexp(terms)
    probs = np.exp(log_probs[:k_max])
    tail = math.fsum(np.exp(log_probs[k_max:]))
    if tail > tail_tol:
        raise TruncationError(
            f"tail mass {tail:.3g} beyond k_max={k_max} exceeds {tail_tol:g}",
            tail_mass=tail,
            suggested_k_max=_suggest_k_max(log_probs, tail_tol),
        )
    return StationaryPmf(policy, mu, k_max, probs, max(tail, 0.0), tail_tol)


def series_S_log(mu, k_cap, log_guard=UNDERFLOW_LOG_GUARD):
    """Partial sum of the logarithmic-law normalising series, k = 2..k_cap.

    Each term prod_{j=1}^{k-1} ln(1+j) / (k! mu^(k-1)) is formed as the exp of
    its logarithm. Terms whose log falls below ``log_guard`` are dropped and
    counted in ``skipped``. For very small ``mu`` the sum overflows to ``inf``;
    ``stationary_pmf`` normalises in log space and is not affected.
    """
    mu = _check_mu(mu)
    if int(k_cap) != k_cap or k_cap < 2:
        raise DomainError(f"k_cap must be an integer >= 2, got {k_cap!r}")
    logs = _log_ratio_terms(RatePolicy.LOGARITHMIC, mu, int(k_cap), k_lo=2)
    keep = logs >= log_guard
    with np.errstate(over="ignore"):
        terms = np.exp(logs[keep])
    try:
        value = math.fsum(terms)
    except OverflowError:
        value = math.inf
    return SeriesSum(value, int(np.count_nonzero(~keep)))


def expected_degree(policy, mu):
    """Mean stationary degree.

    Linear: -1 / ((mu - 1) ln(1 - 1/mu)). Logarithmic: sum of k P[k] over a
    range long enough that the neglected tail is below double precision.
    """
    policy = RatePolicy(policy)
    mu = _check_mu(mu)
    _require_stationary(policy, mu)
    if policy is RatePolicy.LINEAR:
        return -1.0 / ((mu - 1.0) * math.log1p(-1.0 / mu))
    terms = _log_terms_until_negligible(policy, mu, DEFAULT_K_MAX)
    ks = np.arange(1, terms.size + 1, dtype=float)
    return float(np.exp(logsumexp(terms, b=ks) - logsumexp(terms)))


def adjacent_crossing_mu(policy, k):
    """Decrease rate where P[k-1] == P[k] under the logarithmic law.

    The ratio P[k] / P[k-1] = ln(k) / (k mu), so the crossing is exactly
    ln(k) / k. Below it P[k] > P[k-1]; above it P[k] < P[k-1]. The linear law
    never crosses: its ratio (k-1) / (k mu) is below one whenever mu > 1.
    """
    policy = RatePolicy(policy)
    if isinstance(k, bool) or int(k) != k or k < 2:
        raise DomainError(f"crossing index must be an integer >= 2, got {k!r}")
    if policy is not RatePolicy.LOGARITHMIC:
        raise UnsupportedPolicyError(
            "the linear law has strictly decreasing stationary probabilities; no crossing"
        )
    k = int(k)
    return ThresholdReport(k - 1, k, math.log(k) / k, policy)


def _pmf_at(policy, mu, k_needed):
    k_max = max(DEFAULT_K_MAX, k_needed)
    while True:
        try:
            return stationary_pmf(policy, mu, k_max)
        except TruncationError as err:
            k_max = max(2 * k_max, err.suggested_k_max or 0)


def crossing_by_root_finding(policy, k, xtol=1e-14):
    """Locate the P[k-1] == P[k] crossing numerically from computed PMFs.

    Works only from ``stationary_pmf`` output: it walks ``mu`` down from 1
    until the sign of P[k] - P[k-1] flips, then refines with Brent's method.
    Used to cross-check ``adjacent_crossing_mu``.
    """
    policy = RatePolicy(policy)
    if isinstance(k, bool) or int(k) != k or k < 2:
        raise DomainError(f"crossing index must be an integer >= 2, got {k!r}")
    if policy is not RatePolicy.LOGARITHMIC:
        raise UnsupportedPolicyError("the linear law has no crossing")
    k = int(k)

    def gap(mu):
        pmf = _pmf_at(policy, mu, k + 1)
        return math.log(pmf[k]) - math.log(pmf[k - 1])

    hi = 1.0
    if gap(hi) >= 0:
        raise DomainError(f"no sign change below mu=1 for k={k}")
    lo = hi / 2
    while gap(lo) <= 0:
        hi, lo = lo, lo / 2
        if lo < 1e-6:
            raise DomainError(f"crossing for k={k} not bracketed above 1e-6")
    return brentq(gap, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
