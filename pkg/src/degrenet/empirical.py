"""Observed degree distributions."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError


class Weighting(enum.Enum):
    TIME_WEIGHTED = "time_weighted"
    VERTEX_COUNT = "vertex_count"


@dataclass(frozen=True)
class EmpiricalPmf:
    """Degree -> probability, with how it was weighted and where it came from.

    ``total_weight`` is the raw mass before normalisation: elapsed time for a
    time-weighted occupancy, the number of vertices for a snapshot.
    """

    probs: dict[int, float]
    weighting: Weighting
    total_weight: float
    source: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.probs:
            raise DomainError("empirical PMF has empty support")
        clean = {}
        for k, p in sorted(self.probs.items()):
            if int(k) != k or k < 0:
                raise DomainError(f"degree {k!r} is not a non-negative integer")
            if not (p >= 0 and math.isfinite(p)):
                raise DomainError(f"probability {p!r} for degree {k} is invalid")
            clean[int(k)] = float(p)
        if abs(math.fsum(clean.values()) - 1.0) > 1e-12:
            raise DomainError("empirical probabilities do not sum to one")
        if self.weighting is Weighting.TIME_WEIGHTED and 0 in clean and clean[0] > 0:
            raise DomainError("time-weighted chain occupancy cannot visit degree 0")
        object.__setattr__(self, "probs", clean)
        object.__setattr__(self, "weighting", Weighting(self.weighting))

    @classmethod
    def from_weights(cls, weights, weighting, source="", metadata=None):
        """Normalise a degree -> non-negative weight mapping.

        Zero-weight degrees are dropped from the support.
        """
        items = [(int(k), float(w)) for k, w in weights.items() if w > 0]
        if not items:
            raise DomainError("no positive weight to normalise")
        total = math.fsum(w for _, w in items)
        probs = {k: w / total for k, w in items}
        # fold the rounding residue into the heaviest bin so the sum is exact to 1e-15
        residue = 1.0 - math.fsum(probs.values())
        if residue:
            kmax = max(probs, key=probs.get)
            probs[kmax] += residue
        return cls(probs, Weighting(weighting), total, source, dict(metadata or {}))

    @property
    def support(self):
        return sorted(self.probs)

    def arrays(self):
        ks = np.array(self.support, dtype=int)
        return ks, np.array([self.probs[k] for k in ks], dtype=float)

    def mode(self):
        """Most probable degree (smallest one on ties)."""
        best = max(self.probs.values())
        return min(k for k, p in self.probs.items() if p == best)

    def mean(self):
        return math.fsum(k * p for k, p in self.probs.items())

    def without_zero(self):
        """Renormalised copy with degree 0 removed, and the mass that was dropped."""
        dropped = self.probs.get(0, 0.0)
        if not dropped:
            return self, 0.0
        rest = {k: p for k, p in self.probs.items() if k != 0}
        out = EmpiricalPmf.from_weights(
            rest, self.weighting, self.source, {**self.metadata, "dropped_zero_mass": dropped}
        )
        return out, dropped
