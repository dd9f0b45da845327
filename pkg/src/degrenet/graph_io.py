"""Edge-list ingestion and result serialisation.

Edge lists: one ``u v`` pair per line, separated by whitespace, commas or
tabs (detected from the first data line). Lines starting with ``#`` or ``%``
are comments; extra columns such as weights or timestamps are ignored.

Results: JSON objects tagged ``"schema": "degrenet/v1/<type>"``, or CSV
``k,probability`` for PMFs.
"""
from __future__ import annotations

import io
import json
import os
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .degree_law import RatePolicy, StationaryPmf, ThresholdReport
from .empirical import EmpiricalPmf, Weighting
from .exceptions import DomainError, EmptyInputError, MalformedLineError
from .fitter import FitReport, Objective
from .network_sim import ArrivalMode, EvolutionResult, EvolvingGraph, SimConfig, Snapshot

__all__ = [
    "SimpleGraphData",
    "read_edge_list",
    "degree_histogram",
    "write_result",
    "read_result",
    "to_json_dict",
    "from_json_dict",
    "pmf_to_csv",
    "read_pmf",
    "SCHEMA_PREFIX",
]

SCHEMA_PREFIX = "degrenet/v1/"
_COMMENT = ("#", "%")


@dataclass(frozen=True)
class SimpleGraphData:
    """Deduplicated simple graph with dense ids 0..vertex_count-1.

    ``labels[i]`` is the original label of vertex ``i``.
    """

    vertex_count: int
    edges: frozenset
    labels: tuple
    discarded: dict = field(default_factory=dict)

    def degrees(self):
        deg = np.zeros(self.vertex_count, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @property
    def isolated_count(self):
        return int(np.count_nonzero(self.degrees() == 0))


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8", newline=None), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8")), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8"), False


def _detect_delimiter(line):
    if "," in line:
        return ","
    if "\t" in line:
        return "\t"
    return None  # any run of whitespace


def read_edge_list(source, strict=False, delimiter="auto"):
    """Parse an undirected edge list into a ``SimpleGraphData``.

    Self-loops, repeated undirected edges and lines with fewer than two
    tokens are dropped and counted in ``discarded``; with ``strict=True`` a
    short line raises ``MalformedLineError`` instead. Vertex labels are kept
    as strings and numbered in order of first appearance.
    """
    stream, close = _open_text(source)
    ids = {}
    labels = []
    edges = set()
    discarded = Counter(self_loops=0, duplicates=0, malformed=0)
    sep = None if delimiter == "auto" else delimiter
    detected = delimiter != "auto"
    try:
        for lineno, raw in enumerate(stream, 1):
            line = raw.strip()
            if not line or line.startswith(_COMMENT):
                continue
            if not detected:
                sep = _detect_delimiter(line)
                detected = True
            tokens = [t.strip() for t in line.split(sep)]
            tokens = [t for t in tokens if t]
            if len(tokens) < 2:
                if strict:
                    raise MalformedLineError(f"line {lineno}: expected two vertex labels, got {line!r}")
                discarded["malformed"] += 1
                continue
            pair = []
            for label in tokens[:2]:
                if label not in ids:
                    ids[label] = len(labels)
                    labels.append(label)
                pair.append(ids[label])
            u, v = pair
            if u == v:
                discarded["self_loops"] += 1
                continue
            key = (u, v) if u < v else (v, u)
            if key in edges:
                discarded["duplicates"] += 1
                continue
            edges.add(key)
    finally:
        if close:
            stream.close()
    if not labels:
        raise EmptyInputError("edge list contains no usable lines")
    return SimpleGraphData(len(labels), frozenset(edges), tuple(labels), dict(discarded))


def degree_histogram(data, source="edge_list"):
    """Vertex-count degree distribution; isolated vertices show up as degree 0."""
    if data.vertex_count < 1:
        raise DomainError("graph has no vertices")
    counts = Counter(int(d) for d in data.degrees())
    return EmpiricalPmf.from_weights(
        counts, Weighting.VERTEX_COUNT, source, {"isolated": counts.get(0, 0)}
    )


# -- serialisation ----------------------------------------------------------

def _schema(name):
    return SCHEMA_PREFIX + name


def _pmf_dict(pmf):
    if isinstance(pmf, StationaryPmf):
        return {
            "schema": _schema("stationary_pmf"),
            "policy": pmf.policy.value,
            "mu": pmf.mu,
            "k_max": pmf.k_max,
            "tail_tol": pmf.tail_tol,
            "tail_mass": pmf.tail_mass,
            "probs": [float(p) for p in pmf.probs],
        }
    return {
        "schema": _schema("empirical_pmf"),
        "weighting": pmf.weighting.value,
        "total_weight": pmf.total_weight,
        "source": pmf.source,
        "attributes": _plain(pmf.metadata),
        "probs": [[k, p] for k, p in sorted(pmf.probs.items())],
    }


def _plain(obj):
    """Recursively convert numpy scalars and tuples to JSON-native types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def _config_dict(cfg):
    return {
        "m0": cfg.m0,
        "m": cfg.m,
        "policy": cfg.policy.value,
        "mu": cfg.mu,
        "t_end": cfg.t_end,
        "init_mode": cfg.init_mode,
        "seed": cfg.seed,
        "replica": cfg.replica,
        "snapshot_times": list(cfg.snapshot_times),
        "arrival_mode": cfg.arrival_mode.value,
        "max_events": cfg.max_events,
        "instrument": cfg.instrument,
        "record_degree_series": cfg.record_degree_series,
    }


def to_json_dict(value):
    """Schema-tagged plain dict for any serialisable result."""
    if isinstance(value, (StationaryPmf, EmpiricalPmf)):
        return _pmf_dict(value)
    if isinstance(value, FitReport):
        return {
            "schema": _schema("fit_report"),
            "policy": value.policy.value,
            "mu_star": value.mu_star,
            "objective": value.objective.value,
            "objective_value": value.objective_value,
            "rho": value.rho,
            "kl": value.kl,
            "js": value.js,
            "k_max_used": value.k_max_used,
            "mu_bounds": list(value.mu_bounds),
            "boundary_pinned": value.boundary_pinned,
            "multimodal": value.multimodal,
            "dropped_zero_mass": value.dropped_zero_mass,
            "search_trace": [list(p) for p in value.search_trace],
        }
    if isinstance(value, ThresholdReport):
        return {
            "schema": _schema("threshold_report"),
            "policy": value.policy.value,
            "lower_index": value.lower_index,
            "upper_index": value.upper_index,
            "mu_star": value.mu_star,
        }
    if isinstance(value, EvolutionResult):
        g = value.final_graph
        return {
            "schema": _schema("evolution_result"),
            "config": _config_dict(value.config),
            "extinct": value.extinct,
            "end_time": value.end_time,
            "event_counts": dict(value.event_counts),
            "snapshots": [
                {
                    "time": s.time,
                    "vertex_count": s.vertex_count,
                    "edge_count": s.edge_count,
                    "pmf": None if s.pmf is None else _pmf_dict(s.pmf),
                }
                for s in value.snapshots
            ],
            "total_degree_series": _plain(value.total_degree_series),
            "final_graph": {
                "policy": g.policy.value,
                "next_id": g.next_id,
                "vertices": sorted(g.adjacency),
                "edges": [list(e) for e in sorted(g.edges())],
            },
            "edge_lifetimes": _plain(value.edge_lifetimes),
            "growth_events": _plain(value.growth_events),
            "degree_exposure": _plain(value.degree_exposure),
        }
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _rebuild_graph(d):
    g = EvolvingGraph(d["policy"])
    for v in d["vertices"]:
        g.next_id = v
        g.add_vertex()
    g.next_id = d["next_id"]
    for u, v in d["edges"]:
        g.add_edge(u, v)
    return g


def from_json_dict(d):
    """Inverse of ``to_json_dict``; unknown top-level keys such as ``metadata`` are ignored."""
    schema = d.get("schema", "")
    if not schema.startswith(SCHEMA_PREFIX):
        raise DomainError(f"unrecognised schema {schema!r}")
    kind = schema[len(SCHEMA_PREFIX):]
    if kind == "stationary_pmf":
        return StationaryPmf(
            RatePolicy(d["policy"]), d["mu"], d["k_max"], d["probs"], d["tail_mass"], d["tail_tol"]
        )
    if kind == "empirical_pmf":
        return EmpiricalPmf(
            {int(k): float(p) for k, p in d["probs"]},
            Weighting(d["weighting"]),
            d["total_weight"],
            d.get("source", ""),
            dict(d.get("attributes", {})),
        )
    if kind == "fit_report":
        return FitReport(
            RatePolicy(d["policy"]),
            d["mu_star"],
            Objective(d["objective"]),
            d["objective_value"],
            d["rho"],
            d["kl"],
            d["js"],
            tuple(tuple(p) for p in d["search_trace"]),
            d["k_max_used"],
            tuple(d["mu_bounds"]),
            d["boundary_pinned"],
            d["multimodal"],
            d.get("dropped_zero_mass", 0.0),
        )
    if kind == "threshold_report":
        return ThresholdReport(d["lower_index"], d["upper_index"], d["mu_star"], RatePolicy(d["policy"]))
    if kind == "evolution_result":
        c = d["config"]
        cfg = SimConfig(
            m0=c["m0"], m=c["m"], policy=c["policy"], mu=c["mu"], t_end=c["t_end"],
            init_mode=c["init_mode"], seed=c["seed"], snapshot_times=tuple(c["snapshot_times"]),
            arrival_mode=ArrivalMode(c["arrival_mode"]), replica=c["replica"],
            max_events=c["max_events"], instrument=c["instrument"],
            record_degree_series=c["record_degree_series"],
        )
        snaps = [
            Snapshot(
                s["time"],
                None if s["pmf"] is None else from_json_dict(s["pmf"]),
                s["vertex_count"],
                s["edge_count"],
            )
            for s in d["snapshots"]
        ]
        series = np.array(d["total_degree_series"], dtype=float).reshape(-1, 2)
        return EvolutionResult(
            cfg,
            snaps,
            series,
            dict(d["event_counts"]),
            _rebuild_graph(d["final_graph"]),
            d["extinct"],
            d["end_time"],
            np.array(d["edge_lifetimes"], dtype=float),
            {int(k): v for k, v in d["growth_events"].items()},
            {int(k): v for k, v in d["degree_exposure"].items()},
        )
    raise DomainError(f"unknown result type {kind!r}")


def _format_prob(p):
    # fixed point keeps 15 decimals; tiny tail values switch to 15 significant digits
    if p == 0 or p >= 1e-4:
        return f"{p:.15f}"
    return f"{p:.14e}"


def pmf_to_csv(pmf):
    if isinstance(pmf, StationaryPmf):
        rows = zip(pmf.degrees.tolist(), pmf.probs.tolist())
    elif isinstance(pmf, EmpiricalPmf):
        rows = sorted(pmf.probs.items())
    else:
        raise TypeError("CSV output is only defined for PMFs")
    return "k,probability\n" + "".join(f"{k},{_format_prob(p)}\n" for k, p in rows)


def write_result(value, fmt="json", sink=None, metadata=None):
    """Serialise ``value`` to ``sink`` (path or text stream); returns the text.

    JSON floats use Python's shortest round-trip representation, so reading
    the file back reproduces every value exactly. ``metadata`` is stored under
    a top-level ``"metadata"`` key.
    """
    fmt = fmt.lower()
    if fmt == "csv":
        text = pmf_to_csv(value)
    elif fmt == "json":
        d = to_json_dict(value)
        if metadata is not None:
            d["metadata"] = _plain(metadata)
        text = json.dumps(d, indent=1, allow_nan=True) + "\n"
    else:
        raise DomainError(f"unknown format {fmt!r}")
    if sink is None:
        return text
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sink.write(text)
    return text


def read_result(source):
    """Read a JSON result written by ``write_result``."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            d = json.load(fh)
    elif isinstance(source, dict):
        d = source
    else:
        d = json.load(source)
    return from_json_dict(d)


def read_pmf(path):
    """Load a PMF from a JSON result or a ``k,probability`` CSV file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        value = from_json_dict(json.loads(text))
        if not isinstance(value, (StationaryPmf, EmpiricalPmf)):
            raise DomainError(f"{path} holds a {type(value).__name__}, not a PMF")
        return value
    lines = [ln.strip() for ln in stripped.splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "k,probability":
        raise DomainError(f"{path} is neither a JSON result nor a k,probability CSV")
    weights = {}
    for ln in lines[1:]:
        k, p = ln.split(",")
        weights[int(k)] = float(p)
    # a truncated theoretical PMF is renormalised here; its tail is treated as absent
    return EmpiricalPmf.from_weights(weights, Weighting.VERTEX_COUNT, f"csv:{os.fspath(path)}")
