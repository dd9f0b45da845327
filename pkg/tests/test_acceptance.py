"""Acceptance suite: one recorded PASS/FAIL/SKIPPED line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py`` (lines printed as they run).
"""
import math
import os
import subprocess
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from degrenet import distmetrics as dm
from degrenet.chain_sim import occupancy_pmf, simulate_chain
from degrenet.degree_law import (
    adjacent_crossing_mu,
    crossing_by_root_finding,
    expected_degree,
    stationarity_holds,
    stationary_pmf,
)
from degrenet.empirical import EmpiricalPmf, Weighting
from degrenet.fitter import evaluate_fit, fit_mu
from degrenet.graph_io import degree_histogram, read_edge_list
from degrenet.network_sim import EvolvingGraph, SimConfig, evolve, select_endpoints
from degrenet.rng import RandomStream, make_rng

ACCEPTANCE_RESULTS = {}
DATA_DIR = Path(__file__).resolve().parents[1] / "data"
LINEAR_MUS = (1.5, 2.0, 2.5, 3.0, 4.0, 5.0)


def record(n, ok, detail, skipped=False):
    status = "SKIPPED" if skipped else ("PASS" if ok else "FAIL")
    line = f"[{status}] criterion {n:2d}: {detail}"
    ACCEPTANCE_RESULTS[n] = line
    print(line, flush=True)
    if skipped:
        pytest.skip(detail)
    assert ok, line


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# -- 1 ---------------------------------------------------------------------

def raw_recursion_linear(mu, k_cap=10_000):
    ks = np.arange(1, k_cap + 1, dtype=float)
    with np.errstate(under="ignore"):
        w = np.exp(-np.log(ks) - (ks - 1) * math.log(mu))
    return w / math.fsum(w)


def test_criterion_01_closed_form():
    def work():
        worst_rel, worst_norm = 0.0, 0.0
        for mu in LINEAR_MUS:
            pmf = stationary_pmf("linear", mu)
            oracle = raw_recursion_linear(mu)[:200]
            head = pmf.probs[:200]
            mask = oracle > 0
            worst_rel = max(worst_rel, float(np.max(np.abs(head[mask] - oracle[mask]) / oracle[mask])))
            worst_norm = max(worst_norm, abs(math.fsum(pmf.probs) + pmf.tail_mass - 1))
        return worst_rel, worst_norm

    (rel, norm), secs = timed(work)
    ok = rel < 1e-10 and norm <= 1e-12 and secs < 1
    record(1, ok, f"closed form vs recursion max rel err {rel:.2e} (<1e-10), "
                  f"normalisation err {norm:.1e} (<=1e-12), {secs:.2f}s")


# -- 2 ---------------------------------------------------------------------

def test_criterion_02_log_series_identity():
    def work():
        errs = []
        for x in (0.1, 0.3, 0.5, 0.9):
            partial = math.fsum(x ** (k - 1) / k for k in range(1, 201))
            errs.append(abs(partial - (-math.log1p(-x) / x)))
        return max(errs)

    err, secs = timed(work)
    record(2, err < 1e-10 and secs < 1, f"max |partial(K=200) - closed| = {err:.2e} (<1e-10), {secs:.3f}s")


# -- 3 ---------------------------------------------------------------------

def test_criterion_03_expectation():
    def work():
        worst = 0.0
        for mu in LINEAR_MUS:
            pmf = stationary_pmf("linear", mu, k_max=500)
            direct = math.fsum(pmf.degrees * pmf.probs)
            worst = max(worst, abs(expected_degree("linear", mu) - direct) / direct)
        return worst

    rel, secs = timed(work)
    record(3, rel < 1e-8 and secs < 1, f"max rel err closed vs truncated mean {rel:.2e} (<1e-8), {secs:.3f}s")


# -- 4 ---------------------------------------------------------------------

def test_criterion_04_existence_gates():
    checks = {
        ("linear", 0.5): False,
        ("linear", 1.0): False,
        ("linear", 1.0001): True,
        ("log", 0.005): True,
        ("log", 0.075): True,
        ("log", 2.5): True,
    }
    got = {key: stationarity_holds(*key) for key in checks}
    bad = [k for k in checks if got[k] is not checks[k]]
    record(4, not bad, "all six gates exact" if not bad else f"mismatches {bad}")


# -- 5 ---------------------------------------------------------------------

def test_criterion_05_thresholds():
    def work():
        rows = []
        for k, (lo, hi) in ((2, (0.346, 0.347)), (3, (0.366, 0.368))):
            closed = adjacent_crossing_mu("log", k).mu_star
            root = crossing_by_root_finding("log", k)
            rows.append((k, closed, abs(root - closed), lo <= closed <= hi))
        return rows

    rows, secs = timed(work)
    ok = all(agree < 1e-9 and inside for _, _, agree, inside in rows) and secs < 1
    detail = ", ".join(f"k={k}: {c:.7f} (|root-closed|={a:.1e}, in bracket={i})" for k, c, a, i in rows)
    record(5, ok, f"{detail}, {secs:.2f}s")


# -- 6 ---------------------------------------------------------------------

CHAIN_CASES = [
    ("linear", 3.0, 0.97, 0.02),
    ("linear", 5.0, 0.98, 0.03),
    ("log", 2.0, 0.98, 0.03),
    ("log", 0.075, 0.97, 0.02),
]


def test_criterion_06_chain_vs_theory():
    parts, ok = [], True
    for policy, mu, rho_min, js_max in CHAIN_CASES:
        emp, secs = timed(lambda: occupancy_pmf(simulate_chain(policy, mu, 1e5, seed=0)))
        rho, _, js = evaluate_fit(emp, policy, mu)
        good = rho >= rho_min and js <= js_max and secs < 60
        ok &= good
        parts.append(f"{policy} mu={mu}: rho={rho:.4f} js_mid={js:.1e} {secs:.1f}s")
    record(6, ok, "; ".join(parts))


# -- 7 ---------------------------------------------------------------------

def test_criterion_07_skew_shape():
    seeds = range(5)
    parts, ok = [], True
    for mu, head_skewed in ((0.075, True), (0.15, True), (0.75, False), (1.0, False), (2.0, False)):
        votes = sum(
            (occupancy_pmf(simulate_chain("log", mu, 1e5, seed=s)).mode() > 1) == head_skewed for s in seeds
        )
        ok &= votes >= 3
        parts.append(f"mu={mu}: {votes}/5 {'argmax>1' if head_skewed else 'argmax=1'}")
    record(7, ok, "; ".join(parts))


# -- 8 ---------------------------------------------------------------------

def pooled_bridge_run(min_events=100_000, seed=0):
    """Replicas of a Linear mu=3 network (m=3, m0=50, ring start) pooled until 1e5 events."""
    growth, exposure, snap = Counter(), Counter(), Counter()
    events = replicas = 0
    while events < min_events:
        cfg = SimConfig(m0=50, m=3, policy="linear", mu=3.0, t_end=4.0, init_mode="ring", seed=seed,
                        replica=replicas, snapshot_times=(2.0,), instrument=True, record_degree_series=False)
        res = evolve(cfg)
        replicas += 1
        c = res.event_counts
        events += c["arrivals"] + c["edge_deletions"] + c["infeasible_arrivals"]
        growth.update(res.growth_events)
        exposure.update(res.degree_exposure)
        s = next(x for x in res.snapshots if x.time == 2.0)
        if s.pmf is not None:
            for k, p in s.pmf.probs.items():
                snap[k] += round(p * s.vertex_count)
    return growth, exposure, snap, events, replicas


def test_criterion_08_network_chain_bridge():
    growth, exposure, snap, events, replicas = pooled_bridge_run()
    z = {}
    for k in sorted(growth):
        if growth[k] >= 30:
            rate = growth[k] / exposure[k]
            z[k] = (rate - k) / (math.sqrt(growth[k]) / exposure[k])
    emp = EmpiricalPmf.from_weights(snap, Weighting.VERTEX_COUNT)
    js = dm.js_midpoint(dm.align(emp, stationary_pmf("linear", 3.0)))
    worst = max(abs(v) for v in z.values())
    ok = worst < 3 and js <= 0.1 and events >= 100_000
    zs = " ".join(f"{k}:{v:+.2f}" for k, v in z.items())
    record(8, ok, f"{events} events over {replicas} replicas; growth-rate z by degree [{zs}] (|z|<3); "
                  f"snapshot t=2 js_mid={js:.3f} (<=0.1)")


# -- 9 ---------------------------------------------------------------------

def test_criterion_09_edge_lifetimes():
    lifetimes, r = [], 0
    while len(lifetimes) < 10_000:
        res = evolve(SimConfig(m0=50, m=3, policy="linear", mu=3.0, t_end=1e6, init_mode="ring", seed=0,
                               replica=r, instrument=True, record_degree_series=False))
        lifetimes.extend(res.edge_lifetimes)
        r += 1
    p = stats.kstest(lifetimes, "expon", args=(0, 1 / 3.0)).pvalue
    record(9, p >= 0.01, f"KS vs Exponential(3) on {len(lifetimes)} lifetimes from {r} runs: p={p:.3f} (>=0.01)")


# -- 10 --------------------------------------------------------------------

def test_criterion_10_endpoint_selection():
    # a: degree 1, b: degree 2, c: degree 3, plus two leaves on c
    g = EvolvingGraph("linear")
    a, b, c, x, y = (g.add_vertex() for _ in range(5))
    for u, v in ((a, b), (b, c), (c, x), (c, y)):
        g.add_edge(u, v)
    stream = RandomStream(make_rng(0))
    n = 1_000_000
    counts = Counter(select_endpoints(g, 1, stream)[0] for _ in range(n))
    tagged = np.array([counts[a], counts[b], counts[c]], dtype=float)
    m = tagged.sum()
    target = np.array([1, 2, 3]) / 6
    z = (tagged / m - target) / np.sqrt(target * (1 - target) / m)
    chi = stats.chisquare(tagged, target * m).pvalue
    ok = np.all(np.abs(z) < 3)
    record(10, ok, f"{n} draws; degree-1/2/3 shares {np.round(tagged / m, 5).tolist()} "
                   f"z={np.round(z, 2).tolist()} (|z|<3), chi-square p={chi:.3f}")


# -- 11 --------------------------------------------------------------------

def test_criterion_11_metric_properties():
    p = {1: 0.6, 2: 0.3, 3: 0.1}
    q = {1: 0.2, 2: 0.5, 4: 0.3}
    pp, pq, qp = dm.align(p, p), dm.align(p, q), dm.align(q, p)
    hand = dm.kl(dm.align({1: 0.5, 2: 0.5}, {1: 0.25, 2: 0.75}, 0.0))
    disjoint = dm.js_midpoint(dm.align({1: 1.0}, {2: 1.0}, 0.0))
    checks = {
        "rho(P,P)=1": dm.pearson(pp) == 1.0,
        "KL(P||P)=0": dm.kl(pp) == 0.0,
        "KL asymmetric": dm.kl(pq) != dm.kl(qp),
        "js symmetric": dm.js(pq) == dm.js(qp),
        "js_mid in [0,1]": 0.0 <= dm.js_midpoint(pq) <= 1.0,
        "js_mid disjoint=1": disjoint == 1.0,
        "KL hand value": abs(hand - 0.143841) <= 1e-6,
    }
    failed = [k for k, v in checks.items() if not v]
    record(11, not failed, f"{len(checks) - len(failed)}/{len(checks)} properties hold; KL hand value {hand:.6f}"
                           + (f"; failed {failed}" if failed else ""))


# -- 12 --------------------------------------------------------------------

def test_criterion_12_fitter_recovery():
    worst = 0.0
    for policy, mus in (("linear", (1.2, 1.5, 2.0, 3.0, 5.0)), ("log", (0.1, 0.4, 1.0, 2.0))):
        for mu in mus:
            pmf = stationary_pmf(policy, mu)
            emp = EmpiricalPmf.from_weights(
                {int(k): float(p) for k, p in zip(pmf.degrees, pmf.probs) if p > 0}, Weighting.VERTEX_COUNT
            )
            worst = max(worst, abs(fit_mu(emp, policy).mu_star - mu))
    sim = fit_mu(occupancy_pmf(simulate_chain("linear", 2.0, 1e5, seed=0)), "linear").mu_star
    ok = worst < 1e-3 and abs(sim - 2.0) <= 0.05
    record(12, ok, f"exact self-fit max err {worst:.1e} (<1e-3); simulated Linear mu=2 fit {sim:.4f} (2 +/- 0.05)")


# -- 13 --------------------------------------------------------------------

REAL_DATA = {
    "coauthorship.txt": (1.28, 0.58),
    "email.txt": (1.05, 0.40),
    "as.txt": (1.04, 0.44),
}


def test_criterion_13_real_data():
    present = {name: DATA_DIR / name for name in REAL_DATA if (DATA_DIR / name).exists()}
    if len(present) < len(REAL_DATA):
        missing = sorted(set(REAL_DATA) - set(present))
        record(13, False, f"datasets not supplied under data/ (missing {', '.join(missing)})", skipped=True)
    parts, ok = [], True
    for name, (lin_target, log_target) in REAL_DATA.items():
        hist = degree_histogram(read_edge_list(str(present[name])), name)
        lin, log = fit_mu(hist, "linear"), fit_mu(hist, "log")
        good = (abs(lin.mu_star - lin_target) <= 0.1 and abs(log.mu_star - log_target) <= 0.1
                and lin.rho > 0.9 and log.rho > 0.9)
        ok &= good
        parts.append(f"{name}: linear mu={lin.mu_star:.3f} rho={lin.rho:.3f}, log mu={log.mu_star:.3f} "
                     f"rho={log.rho:.3f}")
    record(13, ok, "; ".join(parts))


# -- 14 --------------------------------------------------------------------

STOCHASTIC_COMMANDS = [
    ["simulate-chain", "--policy", policy, "--mu", str(mu), "--t-end", "1e5"] for policy, mu, _, _ in CHAIN_CASES
] + [
    ["simulate-network", "--m0", "50", "--m", "3", "--policy", "linear", "--mu", "3", "--t-end", "4",
     "--init", "ring", "--snapshots", "2,4", "--replicas", "4"],
    ["simulate-network", "--m0", "10", "--m", "3", "--policy", "log", "--mu", "0.05", "--t-end", "6.5"],
]


def test_criterion_14_determinism(tmp_path):
    env = {**os.environ, "SOURCE_DATE_EPOCH": "1700000000"}
    differing = []
    for i, argv in enumerate(STOCHASTIC_COMMANDS):
        out = tmp_path / f"cmd{i}.json"
        blobs = []
        for _ in range(2):
            subprocess.run([sys.executable, "-m", "degrenet", "--seed", "3", *argv, "--output", str(out), "--quiet"],
                           check=True, env=env)
            blobs.append(out.read_bytes())
        if blobs[0] != blobs[1]:
            differing.append(" ".join(argv[:1]))
    record(14, not differing, f"{len(STOCHASTIC_COMMANDS)} stochastic commands run twice, "
                              f"{len(STOCHASTIC_COMMANDS) - len(differing)} byte-identical")


if __name__ == "__main__":
    import tempfile

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                if name.endswith("determinism"):
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except (AssertionError, pytest.skip.Exception):
                pass
