"""Exact simulation of one vertex's degree as a birth-death chain."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .degree_law import RatePolicy, _check_mu, rate
from .empirical import EmpiricalPmf, Weighting
from .exceptions import DomainError, ResourceError
from .rng import RandomStream, make_rng

__all__ = ["DegreeTrajectory", "simulate_chain", "occupancy_pmf", "holding_times", "DEFAULT_EVENT_CAP"]

DEFAULT_EVENT_CAP = 10**8


@dataclass(frozen=True, eq=False)
class DegreeTrajectory:
    """Piecewise-constant degree path on [0, t_end].

    ``jump_times[0] == 0`` and ``states[0]`` is the starting degree; every
    later entry is a jump and the degree held after it. A run with no jumps
    therefore has ``jump_times == [0.0]`` and ``states == [k0]``.
    """

    jump_times: np.ndarray
    states: np.ndarray
    t_end: float
    seed: int
    policy: RatePolicy
    mu: float
    replica: int = 0

    @property
    def k0(self):
        return int(self.states[0])

    @property
    def n_jumps(self):
        return len(self.states) - 1


def simulate_chain(policy, mu, t_end, k0=1, seed=0, *, replica=0, max_events=DEFAULT_EVENT_CAP):
    """Run the degree chain from ``k0`` until ``t_end``.

    At degree k the chain jumps up at rate ``rate(policy, k)`` and down at
    rate ``k * mu``; the down move is switched off at k = 1. Holding times are
    exponential in the total rate and the move is picked in proportion to the
    two rates.
    """
    policy = RatePolicy(policy)
    mu = _check_mu(mu)
    if not (t_end >= 0 and math.isfinite(t_end)):
        raise DomainError(f"t_end must be a finite non-negative real, got {t_end!r}")
    if isinstance(k0, bool) or int(k0) != k0 or k0 < 1:
        raise DomainError(f"k0 must be an integer >= 1, got {k0!r}")

    stream = RandomStream(make_rng(seed, replica))
    birth_cache = [0.0]

    def birth(k):
        while len(birth_cache) <= k:
            birth_cache.append(rate(policy, len(birth_cache)))
        return birth_cache[k]

    times = [0.0]
    states = [int(k0)]
    t = 0.0
    k = int(k0)
    n = 0
    while True:
        up = birth(k)
        down = k * mu if k > 1 else 0.0
        total = up + down
        t += stream.exponential() / total
        if t > t_end:
            break
        k = k + 1 if stream.uniform() * total < up else k - 1
        times.append(t)
        states.append(k)
        n += 1
        if n >= max_events:
            partial = DegreeTrajectory(
                np.array(times), np.array(states, dtype=np.int64), t, int(seed), policy, mu, replica
            )
            raise ResourceError(f"event cap {max_events} reached at t={t:g}", partial=partial)
    return DegreeTrajectory(
        np.array(times), np.array(states, dtype=np.int64), float(t_end), int(seed), policy, mu, replica
    )


def occupancy_pmf(traj, burn_in=None):
    """Fraction of time spent at each degree over (burn_in, t_end].

    ``burn_in`` defaults to 1% of the horizon. A zero-length trajectory
    yields a point mass at its starting degree.
    """
    t_end = traj.t_end
    if burn_in is None:
        burn_in = 0.01 * t_end
    if t_end == 0 and burn_in == 0:
        return EmpiricalPmf({traj.k0: 1.0}, Weighting.TIME_WEIGHTED, 0.0, _source(traj))
    if not (0 <= burn_in < t_end):
        raise DomainError(f"burn_in must satisfy 0 <= burn_in < t_end={t_end!r}, got {burn_in!r}")

    starts = traj.jump_times
    ends = np.append(starts[1:], t_end)
    dwell = np.maximum(ends, burn_in) - np.maximum(starts, burn_in)
    weights = np.bincount(traj.states, weights=dwell)
    occupied = {int(k): float(w) for k, w in enumerate(weights) if w > 0}
    return EmpiricalPmf.from_weights(
        occupied, Weighting.TIME_WEIGHTED, _source(traj), {"burn_in": float(burn_in)}
    )


def holding_times(traj):
    """Completed sojourn lengths grouped by the degree held (last one is censored and dropped)."""
    durations = np.diff(traj.jump_times)
    held = traj.states[:-1]
    return {int(k): durations[held == k] for k in np.unique(held)}


def _source(traj):
    return (
        f"chain:{traj.policy.value}:mu={traj.mu!r}:t_end={traj.t_end!r}:"
        f"k0={traj.k0}:seed={traj.seed}:replica={traj.replica}"
    )
