# Fitting mu to an observed graph
#
# Read an edge list, build the degree histogram and fit mu under both growth
# rules. Pass a path as the first argument, otherwise a synthetic graph is used.

import io
import sys

import numpy as np

from degrenet import degree_histogram, fit_mu, read_edge_list

if len(sys.argv) > 1:
    graph = read_edge_list(sys.argv[1])
else:
    rng = np.random.default_rng(0)
    # a heavy-tailed toy graph from a configuration-style pairing of stubs
    stubs = np.repeat(np.arange(400), rng.zipf(2.2, 400).clip(1, 60))
    rng.shuffle(stubs)
    text = "".join(f"{u} {v}\n" for u, v in stubs[: stubs.size // 2 * 2].reshape(-1, 2))
    graph = read_edge_list(io.StringIO(text))

print(f"vertices={graph.vertex_count} edges={len(graph.edges)} discarded={graph.discarded}")
hist = degree_histogram(graph)
for policy in ("linear", "log"):
    rep = fit_mu(hist, policy)
    print(f"{policy:6s} mu*={rep.mu_star:.4f} rho={rep.rho:.4f} kl={rep.kl:.4f} js={rep.js:.4f}"
          + ("  (pinned to a bound)" if rep.boundary_pinned else ""))
