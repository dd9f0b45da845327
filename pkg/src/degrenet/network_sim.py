"""Whole-network growth and reduction as a discrete-event simulation.

New vertices arrive carrying ``m`` edges whose endpoints are drawn in
proportion to ``rate(policy, degree)``. Each edge lives an independent
Exponential(mu) time, so deletions fire at total rate ``mu * edge_count`` and
remove a uniformly chosen edge. A vertex left with no edges is removed.

The arrival rate is ``sum_i rate(k_i) / m`` in ``exact`` mode, which gives each
existing vertex a degree-growth rate of exactly ``rate(k_i)``, and
``sum_i rate(k_i)`` in ``aggregate`` mode.
"""
from __future__ import annotations

import enum
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .degree_law import RatePolicy, _check_mu, rate
from .empirical import EmpiricalPmf, Weighting
from .exceptions import DomainError, InfeasibleArrivalError, ResourceError
from .rng import RandomStream, make_rng

__all__ = [
    "ArrivalMode",
    "SimConfig",
    "EvolvingGraph",
    "Event",
    "Snapshot",
    "EvolutionResult",
    "init_network",
    "select_endpoints",
    "step",
    "sample_event",
    "apply_event",
    "evolve",
    "snapshot_degrees",
    "parse_init_mode",
]

log = logging.getLogger(__name__)

DEFAULT_EVENT_CAP = 10**8
# cached weight sums are rebuilt from scratch this often to stop float drift
_REBUILD_EVERY = 20000


class ArrivalMode(enum.Enum):
    EXACT = "exact"
    AGGREGATE = "aggregate"

    @classmethod
    def _missing_(cls, value):
        aliases = {"per_vertex_exact": cls.EXACT, "pervertexexact": cls.EXACT}
        return aliases.get(str(value).lower())


def parse_init_mode(mode):
    """``'ring'``, ``'clique'`` or ``'er:<p>'`` -> (kind, p)."""
    text = str(mode).strip().lower()
    if text in ("ring", "clique"):
        return text, None
    if text.startswith("er:") or text.startswith("erdos_renyi:"):
        try:
            p = float(text.split(":", 1)[1])
        except ValueError:
            raise DomainError(f"bad edge probability in init mode {mode!r}") from None
        if not 0 <= p <= 1:
            raise DomainError(f"edge probability must lie in [0, 1], got {p}")
        return "er", p
    raise DomainError(f"unknown init mode {mode!r}; expected ring, clique or er:<p>")


@dataclass(frozen=True)
class SimConfig:
    m0: int = 10
    m: int = 3
    policy: RatePolicy = RatePolicy.LINEAR
    mu: float = 1.41
    t_end: float = 3.5
    init_mode: str = "er:0.5"
    seed: int = 0
    snapshot_times: tuple = ()
    arrival_mode: ArrivalMode = ArrivalMode.EXACT
    replica: int = 0
    max_events: int = DEFAULT_EVENT_CAP
    # per-degree exposure and growth counters, plus completed edge lifetimes
    instrument: bool = False
    record_degree_series: bool = True

    def __post_init__(self):
        object.__setattr__(self, "policy", RatePolicy(self.policy))
        object.__setattr__(self, "arrival_mode", ArrivalMode(self.arrival_mode))
        object.__setattr__(self, "mu", _check_mu(self.mu))
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")
        if self.m0 < 2 or self.m0 <= self.m:
            raise DomainError(f"need m0 >= 2 and m0 > m, got m0={self.m0}, m={self.m}")
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise DomainError(f"t_end must be finite and non-negative, got {self.t_end!r}")
        ts = self.snapshot_times
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise DomainError("snapshot_times must be ascending")
        if ts and (ts[0] < 0 or ts[-1] > self.t_end):
            raise DomainError("snapshot_times must lie within [0, t_end]")
        parse_init_mode(self.init_mode)


class _SumTree:
    """Fenwick tree over per-slot weights with prefix-sum search."""

    __slots__ = ("tree", "w", "size", "total")

    def __init__(self, size=16):
        self.size = size
        self.tree = [0.0] * (size + 1)
        self.w = [0.0] * size
        self.total = 0.0

    def _grow(self, needed):
        size = self.size
        while size <= needed:
            size *= 2
        self.w.extend([0.0] * (size - self.size))
        self.size = size
        self.rebuild()

    def rebuild(self):
        tree = [0.0] + list(self.w)
        n = self.size
        for i in range(1, n + 1):
            j = i + (i & -i)
            if j <= n:
                tree[j] += tree[i]
        self.tree = tree
        self.total = math.fsum(self.w)

    def set(self, slot, weight):
        if slot >= self.size:
            self._grow(slot)
        delta = weight - self.w[slot]
        if delta == 0:
            return
        self.w[slot] = weight
        self.total += delta
        i = slot + 1
        tree = self.tree
        n = self.size
        while i <= n:
            tree[i] += delta
            i += i & -i

    def find(self, u):
        """Slot whose cumulative interval contains ``u`` (0 <= u < total)."""
        pos = 0
        tree = self.tree
        step = 1 << (self.size.bit_length() - 1)
        while step:
            nxt = pos + step
            if nxt <= self.size and tree[nxt] <= u:
                pos = nxt
                u -= tree[nxt]
            step >>= 1
        return min(pos, self.size - 1)


class EvolvingGraph:
    """Simple undirected graph with vertex arrival, edge deletion and vertex removal.

    Keeps a uniform-samplable edge list and a Fenwick tree of attachment
    weights ``rate(policy, degree)`` indexed by vertex id. Vertex ids are never
    reused, so an edge ``(u, v)`` can exist at most once over a run.
    """

    def __init__(self, policy):
        self.policy = RatePolicy(policy)
        self.adjacency: dict[int, set[int]] = {}
        self.next_id = 0
        self._edges: list[tuple[int, int]] = []
        self._edge_pos: dict[tuple[int, int], int] = {}
        self._edge_birth: list[float] = []
        self._tree = _SumTree()
        self._rate_cache = [0.0]
        self.degree_counts: Counter = Counter()
        self._updates = 0

    # -- bookkeeping -------------------------------------------------------
    @property
    def edge_count(self):
        return len(self._edges)

    @property
    def vertex_count(self):
        return len(self.adjacency)

    @property
    def weight_sum(self):
        return self._tree.total

    def degree(self, v):
        return len(self.adjacency[v])

    def edges(self):
        return list(self._edges)

    def _rate(self, k):
        cache = self._rate_cache
        while len(cache) <= k:
            cache.append(rate(self.policy, len(cache)))
        return cache[k]

    def _reweight(self, v, old_k, new_k):
        counts = self.degree_counts
        counts[old_k] -= 1
        if not counts[old_k]:
            del counts[old_k]
        counts[new_k] += 1
        self._tree.set(v, self._rate(new_k) if new_k > 0 else 0.0)
        self._updates += 1
        if self._updates >= max(_REBUILD_EVERY, self._tree.size):
            self._tree.rebuild()
            self._updates = 0

    def add_vertex(self):
        v = self.next_id
        self.next_id += 1
        self.adjacency[v] = set()
        self.degree_counts[0] += 1
        return v

    def add_edge(self, u, v, now=0.0):
        if u == v:
            raise DomainError("self-loops are not allowed")
        key = (u, v) if u < v else (v, u)
        if key in self._edge_pos:
            raise DomainError(f"edge {key} already present")
        au, av = self.adjacency[u], self.adjacency[v]
        self._reweight(u, len(au), len(au) + 1)
        self._reweight(v, len(av), len(av) + 1)
        au.add(v)
        av.add(u)
        self._edge_pos[key] = len(self._edges)
        self._edges.append(key)
        self._edge_birth.append(now)

    def remove_edge_at(self, idx):
        """Remove the edge at list position ``idx``; returns (edge, birth time)."""
        key = self._edges[idx]
        birth = self._edge_birth[idx]
        last = self._edges.pop()
        last_birth = self._edge_birth.pop()
        if idx < len(self._edges):
            self._edges[idx] = last
            self._edge_birth[idx] = last_birth
            self._edge_pos[last] = idx
        del self._edge_pos[key]
        u, v = key
        for a, b in ((u, v), (v, u)):
            na = self.adjacency[a]
            self._reweight(a, len(na), len(na) - 1)
            na.discard(b)
        return key, birth

    def remove_vertex(self, v):
        if self.adjacency[v]:
            raise DomainError(f"vertex {v} still has edges")
        del self.adjacency[v]
        self.degree_counts[0] -= 1
        if not self.degree_counts[0]:
            del self.degree_counts[0]

    def audit(self):
        """Check every structural invariant; raises AssertionError on violation."""
        deg_total = 0
        for v, nbrs in self.adjacency.items():
            assert v not in nbrs, f"self-loop at {v}"
            for u in nbrs:
                assert v in self.adjacency[u], f"asymmetric adjacency {v}-{u}"
            deg_total += len(nbrs)
        assert deg_total == 2 * self.edge_count, "edge count out of sync"
        assert len(set(self._edges)) == len(self._edges), "parallel edges"
        for i, (u, v) in enumerate(self._edges):
            assert self._edge_pos[(u, v)] == i and u < v and v in self.adjacency[u]
        expected = math.fsum(self._rate(len(n)) for n in self.adjacency.values() if n)
        assert abs(expected - self.weight_sum) <= 1e-9 * max(1.0, expected), "weight cache drift"
        assert Counter(len(n) for n in self.adjacency.values()) == self.degree_counts, "degree counts"
        return True


class Event(NamedTuple):
    kind: str  # "arrival", "deletion" or "infeasible"
    dt: float
    vertex: Optional[int] = None
    endpoints: tuple = ()
    endpoint_degrees: tuple = ()
    removed: tuple = ()
    lifetime: Optional[float] = None


@dataclass(frozen=True, eq=False)
class Snapshot:
    time: float
    pmf: Optional[EmpiricalPmf]
    vertex_count: int
    edge_count: int


@dataclass(eq=False)
class EvolutionResult:
    config: SimConfig
    snapshots: list
    total_degree_series: np.ndarray  # shape (n, 2): time, D(t) = 2 * edge_count
    event_counts: dict
    final_graph: EvolvingGraph
    extinct: bool
    end_time: float
    edge_lifetimes: np.ndarray = field(default_factory=lambda: np.empty(0))
    growth_events: dict = field(default_factory=dict)
    degree_exposure: dict = field(default_factory=dict)


def init_network(m0, init_mode="er:0.5", seed=0, policy=RatePolicy.LINEAR, *, rng=None):
    """Initial graph on ``m0`` vertices with no isolated vertex.

    ``er:<p>`` links each pair with probability p and, if any vertex is left
    isolated, overlays a cycle through all vertices in random order (skipping
    pairs already linked). ``ring`` and ``clique`` are deterministic; a ring on
    two vertices is a single edge.
    """
    if isinstance(m0, bool) or int(m0) != m0 or m0 < 2:
        raise DomainError(f"m0 must be an integer >= 2, got {m0!r}")
    kind, p = parse_init_mode(init_mode)
    g = EvolvingGraph(policy)
    vs = [g.add_vertex() for _ in range(int(m0))]
    if kind == "clique":
        for i in range(m0):
            for j in range(i + 1, m0):
                g.add_edge(vs[i], vs[j])
    elif kind == "ring":
        pairs = {tuple(sorted((vs[i], vs[(i + 1) % m0]))) for i in range(m0)}
        for u, v in sorted(pairs):
            g.add_edge(u, v)
    else:
        rng = rng if rng is not None else make_rng(seed)
        draws = rng.random(m0 * (m0 - 1) // 2)
        idx = 0
        for i in range(m0):
            for j in range(i + 1, m0):
                if draws[idx] < p:
                    g.add_edge(vs[i], vs[j])
                idx += 1
        if any(not g.adjacency[v] for v in vs):
            order = [vs[i] for i in rng.permutation(m0)]
            for a, b in zip(order, order[1:] + order[:1]):
                if a != b and b not in g.adjacency[a]:
                    g.add_edge(a, b)
    return g


def select_endpoints(graph, m, stream):
    """Draw ``m`` distinct vertices, each draw proportional to its attachment weight.

    Chosen vertices are zeroed out for the remaining draws (sampling without
    replacement with renormalisation) and restored afterwards.
    """
    if graph.vertex_count < m:
        raise InfeasibleArrivalError(f"only {graph.vertex_count} vertices for {m} endpoints")
    tree = graph._tree
    chosen = []
    saved = []
    try:
        for _ in range(m):
            total = tree.total
            if total <= 0:
                raise InfeasibleArrivalError("no vertex has positive attachment weight")
            while True:
                slot = tree.find(stream.uniform() * total)
                w = tree.w[slot]
                if w > 0:
                    break
            chosen.append(slot)
            saved.append(w)
            tree.set(slot, 0.0)
    finally:
        for slot, w in zip(chosen, saved):
            tree.set(slot, w)
    return tuple(chosen)


def _next_event(stream, arrival_rate, deletion_rate):
    """Competing exponential clocks; returns (kind, dt) or (None, inf) if both rates vanish."""
    dt_arr = stream.exponential() / arrival_rate if arrival_rate > 0 else math.inf
    dt_del = stream.exponential() / deletion_rate if deletion_rate > 0 else math.inf
    if dt_arr == math.inf and dt_del == math.inf:
        return None, math.inf
    if dt_arr < dt_del:
        return "arrival", dt_arr
    return "deletion", dt_del


def arrival_rate(graph, config):
    total = graph.weight_sum
    if config.arrival_mode is ArrivalMode.EXACT:
        return total / config.m
    return total


def sample_event(graph, config, stream):
    """Draw the next event type and its waiting time without changing the graph."""
    if graph.vertex_count == 0:
        return None, math.inf
    return _next_event(stream, arrival_rate(graph, config), config.mu * graph.edge_count)


def apply_event(graph, config, stream, kind, dt, t):
    """Carry out an event of ``kind`` firing at time ``t``."""
    if kind == "arrival":
        try:
            ends = select_endpoints(graph, config.m, stream)
        except InfeasibleArrivalError as err:
            log.debug("arrival skipped at t=%g: %s", t, err)
            return Event("infeasible", dt)
        degrees = tuple(graph.degree(v) for v in ends)
        v = graph.add_vertex()
        for u in ends:
            graph.add_edge(v, u, t)
        return Event("arrival", dt, v, ends, degrees)

    idx = min(int(stream.uniform() * graph.edge_count), graph.edge_count - 1)
    (u, v), birth = graph.remove_edge_at(idx)
    removed = []
    for w in (u, v):
        if not graph.adjacency[w]:
            graph.remove_vertex(w)
            removed.append(w)
    return Event("deletion", dt, None, (u, v), (), tuple(removed), t - birth)


def step(graph, config, stream, now=0.0, horizon=math.inf):
    """Sample and apply the next event.

    Returns ``None`` without touching the graph when the sampled event would
    land after ``horizon`` or no event can ever fire.
    """
    kind, dt = sample_event(graph, config, stream)
    if kind is None or now + dt > horizon:
        return None
    return apply_event(graph, config, stream, kind, dt, now + dt)


def snapshot_degrees(graph, source="network"):
    """Vertex-count degree distribution of the current graph."""
    if graph.vertex_count == 0:
        raise DomainError("cannot take a degree snapshot of an empty graph")
    counts = Counter(len(n) for n in graph.adjacency.values())
    return EmpiricalPmf.from_weights(counts, Weighting.VERTEX_COUNT, source)


def evolve(config):
    """Run the network from its initial graph to ``t_end`` or extinction.

    A snapshot is always taken at t = 0; further ones at each requested time
    (defaulting to ``t_end``) show the graph after all events up to that time.
    Snapshots falling after extinction carry ``pmf=None``.
    """
    rng = make_rng(config.seed, config.replica)
    graph = init_network(config.m0, config.init_mode, policy=config.policy, rng=rng)
    stream = RandomStream(rng)

    requested = config.snapshot_times or (config.t_end,)
    pending = [t for t in requested if t > 0]
    source = f"network:{config.policy.value}:mu={config.mu!r}:seed={config.seed}:replica={config.replica}"

    def snap(t):
        if graph.vertex_count:
            pmf = snapshot_degrees(graph, f"{source}:t={t!r}")
        else:
            pmf = None
        return Snapshot(float(t), pmf, graph.vertex_count, graph.edge_count)

    snapshots = [snap(0.0)]
    series_t = [0.0]
    series_d = [2 * graph.edge_count]
    counts = {"arrivals": 0, "edge_deletions": 0, "vertex_removals": 0, "infeasible_arrivals": 0}
    lifetimes = []
    growth = Counter()
    exposure = Counter()
    instrument = config.instrument
    now = 0.0
    n_events = 0
    extinct = False

    def result(end_time):
        return EvolutionResult(
            config,
            snapshots,
            np.column_stack([np.array(series_t, dtype=float), np.array(series_d, dtype=float)]),
            dict(counts),
            graph,
            extinct,
            end_time,
            np.array(lifetimes, dtype=float),
            dict(sorted(growth.items())),
            dict(sorted(exposure.items())),
        )

    while True:
        kind, dt = sample_event(graph, config, stream)
        if kind is None or now + dt > config.t_end:
            break
        t = now + dt
        while pending and pending[0] < t:
            snapshots.append(snap(pending.pop(0)))
        if instrument:
            for k, n in graph.degree_counts.items():
                exposure[k] += n * dt
        event = apply_event(graph, config, stream, kind, dt, t)
        now = t
        n_events += 1
        if event.kind == "arrival":
            counts["arrivals"] += 1
            if instrument:
                growth.update(event.endpoint_degrees)
        elif event.kind == "deletion":
            counts["edge_deletions"] += 1
            counts["vertex_removals"] += len(event.removed)
            if instrument:
                lifetimes.append(event.lifetime)
        else:
            counts["infeasible_arrivals"] += 1
        if config.record_degree_series:
            series_t.append(now)
            series_d.append(2 * graph.edge_count)
        if graph.vertex_count == 0:
            extinct = True
            break
        if n_events >= config.max_events:
            raise ResourceError(f"event cap {config.max_events} reached at t={now:g}", partial=result(now))

    end_time = now if extinct else config.t_end
    if instrument and not extinct:
        # exposure of the last, event-free stretch up to t_end
        for k, n in graph.degree_counts.items():
            exposure[k] += n * (config.t_end - now)
    for t in pending:
        snapshots.append(snap(t))
    if not config.record_degree_series or series_t[-1] != end_time:
        series_t.append(end_time)
        series_d.append(2 * graph.edge_count)
    return result(end_time)
