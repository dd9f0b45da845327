"""Comparing degree distributions: Pearson correlation, KL and JS divergences.

Two PMFs are first aligned on the union of their supports. Missing degrees
become zeros, every entry is floored at ``epsilon`` and each vector is
renormalised, so divergences stay finite when one side misses a degree.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr

from .degree_law import StationaryPmf
from .empirical import EmpiricalPmf
from .exceptions import DomainError, UndefinedCorrelationError

__all__ = ["AlignedPair", "LogBase", "align", "pearson", "kl", "js", "js_midpoint", "DEFAULT_EPSILON"]

DEFAULT_EPSILON = 1e-12


class LogBase(enum.Enum):
    NATURAL = "natural"
    TWO = "two"


@dataclass(frozen=True, eq=False)
class AlignedPair:
    support: np.ndarray
    p: np.ndarray
    q: np.ndarray
    smoothing_epsilon: float

    def swapped(self):
        return AlignedPair(self.support, self.q, self.p, self.smoothing_epsilon)


def _as_mapping(pmf):
    if isinstance(pmf, StationaryPmf):
        # tail mass beyond k_max is left out, not folded into the last bin
        return {int(k): float(p) for k, p in zip(pmf.degrees, pmf.probs) if p > 0}
    if isinstance(pmf, EmpiricalPmf):
        return pmf.probs
    if isinstance(pmf, dict):
        return {int(k): float(p) for k, p in pmf.items()}
    raise TypeError(f"cannot align object of type {type(pmf).__name__}")


def _smooth(vec, epsilon):
    total = math.fsum(vec)
    if total != 1.0:
        vec = vec / total
    low = vec < epsilon
    if epsilon > 0 and low.any():
        # floored entries stay exactly at epsilon and the rest absorb the rescaling,
        # so smoothing an already smoothed vector is a no-op
        vec = vec.copy()
        rest = ~low
        vec[rest] *= (1.0 - epsilon * np.count_nonzero(low)) / math.fsum(vec[rest])
        vec[low] = epsilon
    return vec


def align(a, b, epsilon=DEFAULT_EPSILON):
    """Put two PMFs on a common ascending support."""
    if epsilon < 0:
        raise DomainError(f"epsilon must be non-negative, got {epsilon!r}")
    ma, mb = _as_mapping(a), _as_mapping(b)
    if not ma and not mb:
        raise DomainError("both distributions are empty")
    if not ma or not mb:
        raise DomainError("cannot align against an empty distribution")
    support = np.array(sorted(set(ma) | set(mb)), dtype=int)
    p = np.array([ma.get(int(k), 0.0) for k in support])
    q = np.array([mb.get(int(k), 0.0) for k in support])
    return AlignedPair(support, _smooth(p, epsilon), _smooth(q, epsilon), float(epsilon))


def pearson(pair):
    """Sample Pearson correlation of the two probability vectors."""
    if pair.support.size < 2:
        raise DomainError("correlation needs at least two support points")
    dp = pair.p - pair.p.mean()
    dq = pair.q - pair.q.mean()
    sp = math.fsum(dp * dp)
    sq = math.fsum(dq * dq)
    if sp == 0 or sq == 0:
        raise UndefinedCorrelationError("correlation is undefined for a constant vector")
    # sqrt(s * s) == s exactly, so identical vectors give exactly 1
    r = math.fsum(dp * dq) / math.sqrt(sp * sq)
    return min(1.0, max(-1.0, r))


def _kl(p, q, base):
    # rel_entr gives inf where q == 0 < p, which is the intended signal
    with np.errstate(divide="ignore"):
        terms = rel_entr(p, q)
    if np.isinf(terms).any():
        return math.inf
    value = math.fsum(terms)
    if base is LogBase.TWO:
        value /= math.log(2)
    return max(value, 0.0)


def kl(pair, log_base=LogBase.NATURAL):
    """KL(p || q); ``inf`` when q has a zero where p does not."""
    return _kl(pair.p, pair.q, LogBase(log_base))


def js(pair):
    """Symmetrised KL, 0.5 KL(p||q) + 0.5 KL(q||p), in bits.

    Not bounded by 1. Use ``js_midpoint`` for the bounded divergence.
    """
    return 0.5 * _kl(pair.p, pair.q, LogBase.TWO) + 0.5 * _kl(pair.q, pair.p, LogBase.TWO)


def js_midpoint(pair):
    """Jensen-Shannon divergence against the midpoint mixture, in bits; lies in [0, 1]."""
    m = 0.5 * (pair.p + pair.q)
    value = 0.5 * _kl(pair.p, m, LogBase.TWO) + 0.5 * _kl(pair.q, m, LogBase.TWO)
    return min(value, 1.0)
