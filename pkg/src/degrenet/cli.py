"""Command-line entry point: ``degrenet <command> [options]``.

Exit codes: 0 success (an extinct network run included), 2 usage or domain
error, 3 numerical or existence error, 4 I/O error.

Every JSON output carries a ``metadata`` block with the tool version, the
resolved options, the seed and wall-clock information. Set
``SOURCE_DATE_EPOCH`` to pin the wall-clock fields, which makes repeated runs
with the same seed byte-identical.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from . import distmetrics as dm
from .chain_sim import occupancy_pmf, simulate_chain
from .degree_law import (
    DEFAULT_K_MAX,
    DEFAULT_TAIL_TOL,
    RatePolicy,
    adjacent_crossing_mu,
    crossing_by_root_finding,
    stationarity_holds,
    stationary_pmf,
)
from .empirical import EmpiricalPmf, Weighting
from .exceptions import (
    DomainError,
    EmptyInputError,
    ExistenceError,
    MalformedLineError,
    ResourceError,
    TruncationError,
    UndefinedCorrelationError,
    UnsupportedPolicyError,
)
from .fitter import DEFAULT_BOUNDS, fit_mu
from .graph_io import degree_histogram, read_edge_list, read_pmf, to_json_dict, write_result
from .network_sim import SimConfig, evolve

log = logging.getLogger("degrenet")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


_GLOBAL_DEFAULTS = {"seed": 0, "output": None, "format": "json", "quiet": False}


def _common(defaults=True):
    # subcommand copies use SUPPRESS so a global flag given before the subcommand survives
    d = (lambda k: _GLOBAL_DEFAULTS[k]) if defaults else (lambda k: argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d("seed"), help="RNG seed (default 0)")
    p.add_argument("--output", "-o", default=d("output"), help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=d("format"))
    p.add_argument("--quiet", "-q", action="store_true", default=d("quiet"))
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="degrenet", description=__doc__.splitlines()[0], parents=[_common()])
    common = _common(defaults=False)
    parser.add_argument("--version", action="version", version=f"degrenet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analytic", parents=[common], help="stationary degree distribution")
    a.add_argument("--policy", default="linear", choices=("linear", "log"))
    a.add_argument("--mu", type=float, required=True)
    a.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    a.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)

    t = sub.add_parser("thresholds", parents=[common], help="mu where P[k-1] == P[k]")
    t.add_argument("--policy", default="log", choices=("linear", "log"))
    t.add_argument("--k", type=int, required=True)

    c = sub.add_parser("simulate-chain", parents=[common], help="single-vertex degree chain")
    c.add_argument("--policy", default="linear", choices=("linear", "log"))
    c.add_argument("--mu", type=float, required=True)
    c.add_argument("--t-end", type=float, default=1e5)
    c.add_argument("--k0", type=_positive_int, default=1)
    c.add_argument("--burn-in", type=float, default=None, help="default: 1%% of t-end")
    c.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    c.add_argument("--epsilon", type=float, default=dm.DEFAULT_EPSILON)
    c.add_argument("--replicas", type=_positive_int, default=1)

    n = sub.add_parser("simulate-network", parents=[common], help="whole-network evolution")
    n.add_argument("--m0", type=int, default=10)
    n.add_argument("--m", type=int, default=3)
    n.add_argument("--policy", default="linear", choices=("linear", "log"))
    n.add_argument("--mu", type=float, required=True)
    n.add_argument("--t-end", type=float, required=True)
    n.add_argument("--snapshots", type=_float_list, default=())
    n.add_argument("--init", default="er:0.5", help="ring, clique or er:<p>")
    n.add_argument("--arrival-mode", choices=("exact", "aggregate"), default="exact")
    n.add_argument("--max-events", type=int, default=10**8)
    n.add_argument("--replicas", type=_positive_int, default=1)

    f = sub.add_parser("fit", parents=[common], help="fit mu to an observed degree distribution")
    f.add_argument("--input", required=True, help="edge list or PMF file (CSV/JSON)")
    f.add_argument("--input-kind", choices=("auto", "edges", "pmf"), default="auto")
    f.add_argument("--policy", default="linear", choices=("linear", "log"))
    f.add_argument("--objective", choices=("js", "kl", "negpearson"), default="js")
    f.add_argument("--mu-lo", type=float, default=None)
    f.add_argument("--mu-hi", type=float, default=None)

    m = sub.add_parser("compare", parents=[common], help="rho, KL and JS between two PMF files")
    m.add_argument("--a", required=True)
    m.add_argument("--b", required=True)
    m.add_argument("--epsilon", type=float, default=dm.DEFAULT_EPSILON)
    return parser


def _wall_clock(started):
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        stamp = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc)
        return {"started_at": stamp.isoformat(), "elapsed_seconds": 0.0}
    stamp = _dt.datetime.fromtimestamp(started, _dt.timezone.utc)
    return {"started_at": stamp.isoformat(), "elapsed_seconds": round(time.time() - started, 6)}


def _metrics(empirical, theory, epsilon):
    pair = dm.align(empirical, theory, epsilon)
    try:
        rho = dm.pearson(pair)
    except (UndefinedCorrelationError, DomainError):
        rho = None
    return {"rho": rho, "kl": dm.kl(pair), "js": dm.js(pair), "js_midpoint": dm.js_midpoint(pair)}


def _theory_or_none(policy, mu, k_max):
    if not stationarity_holds(policy, mu):
        return None
    try:
        return stationary_pmf(policy, mu, k_max)
    except TruncationError:
        return None


def _chain_replica(args):
    policy, mu, t_end, k0, seed, replica, burn_in = args
    traj = simulate_chain(policy, mu, t_end, k0, seed, replica=replica)
    return occupancy_pmf(traj, burn_in), traj.n_jumps


def _map(fn, jobs):
    if len(jobs) == 1:
        return [fn(jobs[0])]
    with ProcessPoolExecutor(max_workers=min(len(jobs), os.cpu_count() or 1)) as pool:
        return list(pool.map(fn, jobs))


def cmd_analytic(ns, meta):
    pmf = stationary_pmf(ns.policy, ns.mu, ns.k_max, ns.tail_tol)
    return pmf, meta


def cmd_thresholds(ns, meta):
    if ns.k < 2:
        raise UsageError("--k must be at least 2 (degree 1 has no predecessor)")
    report = adjacent_crossing_mu(ns.policy, ns.k)
    meta["root_finder_mu"] = crossing_by_root_finding(ns.policy, ns.k)
    return report, meta


def cmd_simulate_chain(ns, meta):
    policy = RatePolicy(ns.policy)
    burn_in = ns.burn_in if ns.burn_in is not None else 0.01 * ns.t_end
    jobs = [(policy, ns.mu, ns.t_end, ns.k0, ns.seed, r, burn_in) for r in range(ns.replicas)]
    outputs = _map(_chain_replica, jobs)
    pmfs = [pmf for pmf, _ in outputs]
    if len(pmfs) == 1:
        result = pmfs[0]
    else:
        support = sorted(set().union(*(p.probs for p in pmfs)))
        mean = {k: float(np.mean([p.probs.get(k, 0.0) for p in pmfs])) for k in support}
        result = EmpiricalPmf.from_weights(
            mean, Weighting.TIME_WEIGHTED, f"chain:{policy.value}:mu={ns.mu!r}:replicas={len(pmfs)}"
        )
        meta["replicas"] = [to_json_dict(p) for p in pmfs]
    meta["jumps"] = [n for _, n in outputs]
    theory = _theory_or_none(policy, ns.mu, ns.k_max)
    if theory is not None:
        meta["metrics_vs_theory"] = _metrics(result, theory, ns.epsilon)
        if len(pmfs) > 1:
            meta["replica_metrics_vs_theory"] = [_metrics(p, theory, ns.epsilon) for p in pmfs]
    else:
        meta["metrics_vs_theory"] = None
    return result, meta


def _network_replica(cfg):
    return evolve(cfg)


def cmd_simulate_network(ns, meta):
    if ns.format == "csv":
        raise UsageError("simulate-network output is JSON only")
    configs = [
        SimConfig(
            m0=ns.m0, m=ns.m, policy=ns.policy, mu=ns.mu, t_end=ns.t_end,
            init_mode=ns.init, seed=ns.seed, snapshot_times=ns.snapshots,
            arrival_mode=ns.arrival_mode, replica=r, max_events=ns.max_events,
        )
        for r in range(ns.replicas)
    ]
    results = _map(_network_replica, configs)
    meta["extinct"] = results[0].extinct
    if len(results) > 1:
        meta["replicas"] = [to_json_dict(r) for r in results[1:]]
        meta["extinct_replicas"] = sum(r.extinct for r in results)
    return results[0], meta


def _load_empirical(path, kind):
    if kind in ("auto", "pmf"):
        try:
            pmf = read_pmf(path)
        except DomainError:
            if kind == "pmf":
                raise
        else:
            if not isinstance(pmf, EmpiricalPmf):
                pmf = EmpiricalPmf.from_weights(pmf.as_dict(), Weighting.VERTEX_COUNT, f"file:{path}")
            return pmf, {"input_kind": "pmf"}
    data = read_edge_list(path)
    info = {
        "input_kind": "edges",
        "vertex_count": data.vertex_count,
        "edge_count": len(data.edges),
        "discarded": data.discarded,
    }
    return degree_histogram(data, f"file:{path}"), info


def cmd_fit(ns, meta):
    if ns.format == "csv":
        raise UsageError("fit reports are JSON only")
    empirical, info = _load_empirical(ns.input, ns.input_kind)
    meta["input"] = info
    bounds = None
    if ns.mu_lo is not None or ns.mu_hi is not None:
        lo, hi = DEFAULT_BOUNDS[RatePolicy(ns.policy)]
        bounds = (ns.mu_lo if ns.mu_lo is not None else lo, ns.mu_hi if ns.mu_hi is not None else hi)
    return fit_mu(empirical, ns.policy, ns.objective, bounds), meta


class _Comparison(dict):
    pass


def cmd_compare(ns, meta):
    if ns.format == "csv":
        raise UsageError("compare output is JSON only")
    a, b = read_pmf(ns.a), read_pmf(ns.b)
    out = _Comparison(schema="degrenet/v1/comparison", **_metrics(a, b, ns.epsilon))
    out["epsilon"] = ns.epsilon
    return out, meta


COMMANDS = {
    "analytic": cmd_analytic,
    "thresholds": cmd_thresholds,
    "simulate-chain": cmd_simulate_chain,
    "simulate-network": cmd_simulate_network,
    "fit": cmd_fit,
    "compare": cmd_compare,
}

_STOCHASTIC = {"simulate-chain", "simulate-network"}


def _emit(value, ns, meta):
    if isinstance(value, _Comparison):
        d = dict(value)
        d["metadata"] = meta
        text = json.dumps(d, indent=1) + "\n"
        if ns.output:
            with open(ns.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    if ns.format == "csv":
        write_result(value, "csv", ns.output or sys.stdout)
    else:
        write_result(value, "json", ns.output or sys.stdout, metadata=meta)


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if ns.quiet else logging.INFO, format="%(message)s")
    started = time.time()
    config = {k.replace("_", "-"): v for k, v in sorted(vars(ns).items()) if k not in ("command",)}
    meta = {
        "tool": "degrenet",
        "version": __version__,
        "command": ns.command,
        "config": config,
        "seed": ns.seed,
    }
    if ns.command in _STOCHASTIC:
        meta["rng"] = "PCG64(SeedSequence(seed, spawn_key=(replica,)))"
    try:
        value, meta = COMMANDS[ns.command](ns, meta)
        meta["wall_clock"] = _wall_clock(started)
        _emit(value, ns, meta)
    except UsageError as err:
        print(f"degrenet {ns.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ExistenceError, TruncationError, UndefinedCorrelationError, ResourceError) as err:
        hint = ""
        if isinstance(err, TruncationError) and err.suggested_k_max:
            hint = f" (try --k-max {err.suggested_k_max})"
        print(f"degrenet {ns.command}: error: {err}{hint}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, EmptyInputError, MalformedLineError) as err:
        print(f"degrenet {ns.command}: I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, UnsupportedPolicyError) as err:
        print(f"degrenet {ns.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    if not ns.quiet and ns.command in _STOCHASTIC:
        log.info("seed=%d", ns.seed)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
